"""Gauss coordinates of L-operators, currents and their relations.

Two flavors of Gauss decomposition are supported:

* ``first``:  L_{a,b} = sum_m F_{b,m} k_m E_{m,a}, i.e. the index-transposed
  matrix [L_{b,a}] factors as (lower unitriangular F)(diagonal k)(upper E).
* ``second``: L_{a,b} = sum_m Fh_{m,a} kh_m Eh_{b,m}, an upper-diagonal-lower
  factorization of [L_{a,b}] itself.

Coordinates are extracted with the boxed quasideterminant formulas, using
block elimination on flattened operator matrices.  The same code runs on
plain matrices (a sample point t) and on truncated power series (exact
current modes).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence, Union

import numpy as np

from .exact import Resample, equal, identity, invert, is_zero, zeros
from .gln_rep import LOperatorPoly
from .series import MatSeries

Elem = Union[np.ndarray, MatSeries]

FLAVORS = ("first", "second")


def _inv(x: Elem) -> Elem:
    return invert(x) if isinstance(x, np.ndarray) else x.inverse()


def _block(grid: Sequence[Sequence[Elem]]) -> Elem:
    if isinstance(grid[0][0], np.ndarray):
        return np.block([list(row) for row in grid])
    return MatSeries.block(grid)


def _piece(big: Elem, i: int, j: int, d: int) -> Elem:
    rows, cols = slice(i * d, (i + 1) * d), slice(j * d, (j + 1) * d)
    if isinstance(big, np.ndarray):
        return big[rows, cols]
    return big.sub(rows, cols)


def _dim(x: Elem) -> int:
    return x.shape[0]


def quasidet_lower_right(T: Sequence[Sequence[Elem]]) -> Elem:
    """Boxed bottom-right quasideterminant D - sum_{k,l} B_{l} (A^{-1})_{kl} C_{k}.

    Factors appear in the reversed order of the display, which matches the
    index-transposed factorization of the first flavor.  Accordingly
    (A^{-1})_{kl} is the (l,k) block of the inverse of the block transpose
    of A.
    """
    n = len(T) - 1
    D = T[n][n]
    if n == 0:
        return D
    d = _dim(D)
    at = _block([[T[j][i] for j in range(n)] for i in range(n)])
    x = _inv(at)
    out = D
    for k in range(n):
        for l in range(n):
            out = out - T[l][n] @ _piece(x, l, k, d) @ T[n][k]
    return out


def quasidet_upper_left(T: Sequence[Sequence[Elem]]) -> Elem:
    """Boxed top-left quasideterminant A - B D^{-1} C."""
    n = len(T) - 1
    A = T[0][0]
    if n == 0:
        return A
    d = _dim(A)
    x = _inv(_block([[T[i][j] for j in range(1, n + 1)] for i in range(1, n + 1)]))
    out = A
    for k in range(n):
        for l in range(n):
            out = out - T[0][k + 1] @ _piece(x, k, l, d) @ T[l + 1][0]
    return out


def _sub(L, rows: Sequence[int], cols: Sequence[int]):
    return [[L[r - 1][c - 1] for c in cols] for r in rows]


@dataclass
class GaussCoords:
    """F[(b,a)] (b>a), E[(a,b)] (a<b) and k[c] for one sign; indices 1-based."""

    F: dict = field(default_factory=dict)
    E: dict = field(default_factory=dict)
    k: dict = field(default_factory=dict)


def extract(L, N: int, flavor: str) -> GaussCoords:
    """Gauss coordinates from an N x N grid of elements L[i][j] = L_{i+1,j+1}."""
    g = GaussCoords()
    if flavor == "first":
        for a in range(1, N + 1):
            g.k[a] = quasidet_lower_right(_sub(L, range(1, a + 1), range(1, a + 1)))
        kinv = {a: _inv(g.k[a]) for a in g.k}
        for a in range(1, N + 1):
            for b in range(a + 1, N + 1):
                rows = list(range(1, a)) + [b]
                g.E[(a, b)] = kinv[a] @ quasidet_lower_right(_sub(L, rows, range(1, a + 1)))
                cols = list(range(1, a)) + [b]
                g.F[(b, a)] = quasidet_lower_right(_sub(L, range(1, a + 1), cols)) @ kinv[a]
    elif flavor == "second":
        for a in range(1, N + 1):
            g.k[a] = quasidet_upper_left(_sub(L, range(a, N + 1), range(a, N + 1)))
        kinv = {a: _inv(g.k[a]) for a in g.k}
        for a in range(1, N + 1):
            for b in range(a + 1, N + 1):
                tail = list(range(b + 1, N + 1))
                g.E[(a, b)] = kinv[b] @ quasidet_upper_left(_sub(L, [b] + tail, [a] + tail))
                g.F[(b, a)] = quasidet_upper_left(_sub(L, [a] + tail, [b] + tail)) @ kinv[b]
    else:
        raise ValueError(f"unknown flavor {flavor!r}")
    return g


def reconstruct(g: GaussCoords, N: int, flavor: str):
    """The grid L_{a,b} rebuilt from the Gauss coordinates of one sign."""
    one = identity(_dim(g.k[1]))

    def F(b, a):
        return one if a == b else g.F[(b, a)]

    def E(a, b):
        return one if a == b else g.E[(a, b)]

    out = [[None] * N for _ in range(N)]
    for a in range(1, N + 1):
        for b in range(1, N + 1):
            if flavor == "first":
                ms = range(1, min(a, b) + 1)
                terms = [F(b, m) @ g.k[m] @ E(m, a) for m in ms]
            else:
                ms = range(max(a, b), N + 1)
                terms = [F(m, a) @ g.k[m] @ E(b, m) for m in ms]
            acc = terms[0]
            for t in terms[1:]:
                acc = acc + t
            out[a - 1][b - 1] = acc
    return out


@dataclass
class GaussSample:
    flavor: str
    t: Fraction
    plus: GaussCoords
    minus: GaussCoords


def _grid_rows(grid: np.ndarray):
    N = grid.shape[0]
    return [[grid[i, j] for j in range(N)] for i in range(N)]


def gauss_extract(lplus: LOperatorPoly, lminus: LOperatorPoly, t, flavor: str) -> GaussSample:
    N = lplus.N
    plus = extract(_grid_rows(lplus(t)), N, flavor)
    minus = extract(_grid_rows(lminus(t)), N, flavor)
    return GaussSample(flavor, Fraction(t), plus, minus)


def reconstruct_l(g: GaussSample, N: int) -> tuple[list, list]:
    return reconstruct(g.plus, N, g.flavor), reconstruct(g.minus, N, g.flavor)


def ldu_blocks(G, N: int):
    """Plain block LDU of a grid G = Lo D Up (Schur complements, no quasideterminants)."""
    S = [[G[i][j] for j in range(N)] for i in range(N)]
    lo, dg, up = {}, {}, {}
    for p in range(N):
        dg[p] = S[p][p]
        dinv = _inv(dg[p])
        for i in range(p + 1, N):
            lo[(i, p)] = S[i][p] @ dinv
        for j in range(p + 1, N):
            up[(p, j)] = dinv @ S[p][j]
        for i in range(p + 1, N):
            for j in range(p + 1, N):
                S[i][j] = S[i][j] - S[i][p] @ dinv @ S[p][j]
    return lo, dg, up


def gauss_by_ldu(L, N: int, flavor: str) -> GaussCoords:
    """Independent extraction by plain block elimination, used as a cross-check."""
    g = GaussCoords()
    if flavor == "first":
        lo, dg, up = ldu_blocks([[L[j][i] for j in range(N)] for i in range(N)], N)
        for a in range(N):
            g.k[a + 1] = dg[a]
        for (b, a), x in lo.items():
            g.F[(b + 1, a + 1)] = x
        for (m, a), x in up.items():
            g.E[(m + 1, a + 1)] = x
    else:
        rev = [[L[N - 1 - i][N - 1 - j] for j in range(N)] for i in range(N)]
        lo, dg, up = ldu_blocks(rev, N)
        for p in range(N):
            g.k[N - p] = dg[p]
        # upper factor P_{a,m} = Fh_{m,a}; lower factor Q_{m,b} = Eh_{b,m}
        for (i, p), x in lo.items():
            g.F[(N - p, N - i)] = x
        for (p, j), x in up.items():
            g.E[(N - j, N - p)] = x
    return g


# Pointwise currents.  On a finite-dimensional evaluation module L^-(u) is a
# scalar multiple of L^+(u), so F^+ and F^- coincide as rational functions and
# these pointwise combinations vanish identically.  The relations are checked
# on exact modes instead (see CurrentModes).


def current_f(g: GaussSample, i: int) -> np.ndarray:
    return g.plus.F[(i + 1, i)] - g.minus.F[(i + 1, i)]


def current_e(g: GaussSample, i: int) -> np.ndarray:
    return g.plus.E[(i, i + 1)] - g.minus.E[(i, i + 1)]


def composed_current(g: GaussSample, j: int, i: int, q) -> np.ndarray:
    """(q - q^{-1})^{j-i-1} times the ordered product of simple currents.

    First flavor: F_{j-1}(t) ... F_i(t).  Second flavor: F_i(t) ... F_{j-1}(t).
    """
    if not i < j:
        raise IndexError(f"composed current needs i < j, got ({j}, {i})")
    q = Fraction(q)
    order = range(j - 1, i - 1, -1) if g.flavor == "first" else range(i, j)
    out = None
    for s in order:
        f = current_f(g, s)
        out = f if out is None else out @ f
    return (q - 1 / q) ** (j - i - 1) * out


# ---------------------------------------------------------------------------
# Exact current modes


class ModeWindow(IndexError):
    """A mode outside the computed window was requested."""


class Current:
    """Modes X[n] of a current on the module, stored for |n| <= K.

    ``support`` is "all", "nonneg" (k^+) or "nonpos" (k^-); modes outside the
    support are exactly zero.
    """

    def __init__(self, modes: dict, K: int, dim: int, support: str = "all"):
        self.modes = modes
        self.K = K
        self.support = support
        self.zero = zeros(dim)

    def __getitem__(self, n: int) -> np.ndarray:
        if self.support == "nonneg" and n < 0:
            return self.zero
        if self.support == "nonpos" and n > 0:
            return self.zero
        if abs(n) > self.K:
            raise ModeWindow(f"mode {n} outside window {self.K}")
        return self.modes[n]


def _series_grid(l: LOperatorPoly, K: int):
    N = l.N
    return [[MatSeries.constant_padded([c[i, j] for c in l.coeffs], K) for j in range(N)]
            for i in range(N)]


@dataclass
class CurrentModes:
    """Exact modes of total currents, Cartan currents and composed currents."""

    flavor: str
    N: int
    q: Fraction
    K: int
    F: dict  # (j, i) -> Current, j > i; (i+1, i) are the simple currents
    E: dict  # (i, j) -> Current, i < j
    kplus: dict  # c -> Current
    kminus: dict
    support_ok: bool


def current_modes(lplus: LOperatorPoly, lminus: LOperatorPoly, q, flavor: str,
                  K: int = 6) -> CurrentModes:
    """Expand Gauss coordinates of L^+ at u = oo and of L^- at u = 0.

    Total modes: F[n] = F^+[n] (n >= 0), -F^-[n] (n < 0);
    E[n] = E^+[n] (n > 0), -E^-[n] (n <= 0).  Composed currents F_{j,i}
    use the normalization c = (q^{-1}-q)^{j-i-1} (first flavor) or
    (q-q^{-1})^{j-i-1} (second flavor) on both halves.
    """
    q = Fraction(q)
    N = lplus.N
    d = lplus.dim
    gp = extract(_series_grid(lplus, K), N, flavor)
    gm = extract(_series_grid(lminus, K), N, flavor)
    base = (1 / q - q) if flavor == "first" else (q - 1 / q)
    support_ok = True
    F, E = {}, {}
    for (j, i), sp in gp.F.items():
        sm = gm.F[(j, i)]
        c = base ** (j - i - 1)
        support_ok &= is_zero(sm.c[0])
        modes = {n: c * sp.c[n] for n in range(0, K + 1)}
        modes.update({-n: -c * sm.c[n] for n in range(1, K + 1)})
        F[(j, i)] = Current(modes, K, d)
    for (i, j), sp in gp.E.items():
        sm = gm.E[(i, j)]
        support_ok &= is_zero(sp.c[0])
        modes = {n: sp.c[n] for n in range(1, K + 1)}
        modes.update({-n: -sm.c[n] for n in range(0, K + 1)})
        E[(i, j)] = Current(modes, K, d)
    kplus = {c: Current({n: s.c[n] for n in range(K + 1)}, K, d, "nonneg") for c, s in gp.k.items()}
    kminus = {c: Current({-n: s.c[n] for n in range(K + 1)}, K, d, "nonpos") for c, s in gm.k.items()}
    return CurrentModes(flavor, N, q, K, F, E, kplus, kminus, support_ok)


# Relations between currents X(z), Y(w), multiplied out to polynomial form
# sum c * z^alpha w^beta [X(z)Y(w) or Y(w)X(z)] = 0.  A term is
# (c, alpha, beta, swapped); the coefficient of z^{-m} w^{-n} is
# c * X[m+alpha] Y[n+beta] (or Y[n+beta] X[m+alpha] when swapped).

def _poly(q, lhs_zw, lhs_wz):
    """Terms for (a z + b w) X(z)Y(w) - (c z + d w) Y(w)X(z)."""
    (a, b), (c, d) = lhs_zw, lhs_wz
    return [(a, 1, 0, False), (b, 0, 1, False), (-c, 1, 0, True), (-d, 0, 1, True)]


def relation_table(q, flavor: str) -> dict:
    """Named relation templates: name -> terms.  q-shifted factors as (z coeff, w coeff)."""
    qi = 1 / q
    one, neg = Fraction(1), Fraction(-1)
    zw = (one, neg)          # z - w
    qm = (qi, -q)            # q^{-1} z - q w
    qp = (q, -qi)            # q z - q^{-1} w
    t = {
        "kF_same": _poly(q, zw, qm),
        "kF_next": _poly(q, zw, qp),
        "kE_same": _poly(q, qm, zw),
        "kE_next": _poly(q, qp, zw),
        "k_commute": _poly(q, (one, Fraction(0)), (one, Fraction(0))),
    }
    if flavor == "first":
        t.update(EE_same=_poly(q, qp, qm), EE_next=_poly(q, qm, zw),
                 FF_same=_poly(q, qm, qp), FF_next=_poly(q, zw, qm))
    else:
        t.update(EE_same=_poly(q, qm, qp), EE_next=_poly(q, zw, qm),
                 FF_same=_poly(q, qp, qm), FF_next=_poly(q, qm, zw))
    return t


def mode_coefficient(X: Current, Y: Current, terms, m: int, n: int) -> np.ndarray:
    out = None
    for c, alpha, beta, swapped in terms:
        x, y = X[m + alpha], Y[n + beta]
        v = c * (y @ x if swapped else x @ y)
        out = v if out is None else out + v
    return out


def _check(bad: list, label: str, X, Y, terms, pairs):
    for m, n in pairs:
        if not is_zero(mode_coefficient(X, Y, terms, m, n)):
            bad.append(f"{label} fails at modes ({m}, {n})")
            return


def current_relation_violations(cm: CurrentModes, pairs) -> list[str]:
    """Check the non-delta current relations mode by mode at the given (m, n)."""
    N, q = cm.N, cm.q
    t = relation_table(q, cm.flavor)
    F = {i: cm.F[(i + 1, i)] for i in range(1, N)}
    E = {i: cm.E[(i, i + 1)] for i in range(1, N)}
    bad: list[str] = []
    for i in range(1, N):
        _check(bad, f"FF({i},{i})", F[i], F[i], t["FF_same"], pairs)
        _check(bad, f"EE({i},{i})", E[i], E[i], t["EE_same"], pairs)
        if i + 1 < N:
            _check(bad, f"FF({i},{i + 1})", F[i], F[i + 1], t["FF_next"], pairs)
            _check(bad, f"EE({i},{i + 1})", E[i], E[i + 1], t["EE_next"], pairs)
        for c in range(1, N + 1):
            for sgn, k in (("+", cm.kplus[c]), ("-", cm.kminus[c])):
                if c == i:
                    fk, ek = t["kF_same"], t["kE_same"]
                elif c == i + 1:
                    fk, ek = t["kF_next"], t["kE_next"]
                else:
                    fk = ek = t["k_commute"]
                _check(bad, f"k{sgn}_{c} F_{i}", k, F[i], fk, pairs)
                _check(bad, f"k{sgn}_{c} E_{i}", k, E[i], ek, pairs)
    return bad


def _serre_coefficient(X: Current, Y: Current, q, a: int, b: int, c: int) -> np.ndarray:
    two = q + 1 / q
    out = None
    for s, r in ((a, b), (b, a)):
        v = X[s] @ X[r] @ Y[c] - two * (X[s] @ Y[c] @ X[r]) + Y[c] @ X[s] @ X[r]
        out = v if out is None else out + v
    return out


def serre_current_violations(cm: CurrentModes, triples) -> list[str]:
    """Symmetrized cubic Serre relations for F and E currents, mode by mode."""
    N, q = cm.N, cm.q
    bad: list[str] = []
    for i in range(1, N):
        for j in (i - 1, i + 1):
            if not 1 <= j < N:
                continue
            for name, X, Y in (("F", cm.F[(i + 1, i)], cm.F[(j + 1, j)]),
                               ("E", cm.E[(i, i + 1)], cm.E[(j, j + 1)])):
                for a, b, c in triples:
                    if not is_zero(_serre_coefficient(X, Y, q, a, b, c)):
                        bad.append(f"Serre {name}_{i},{name}_{j} fails at modes ({a}, {b}, {c})")
                        break
    return bad


def support_violations(cm: CurrentModes) -> list[str]:
    """F^-_{i+1,i} and E^+_{i,i+1} have no constant term, so the half-currents are projections."""
    return [] if cm.support_ok else ["a half-current has a constant term outside its projection"]


def pointwise_relation_violations(lplus: LOperatorPoly, lminus: LOperatorPoly, q, z, w,
                                  flavor: str) -> list[str]:
    """The non-delta current relations with sampled operators at the points z and w.

    Each relation is cleared of denominators: for instance the Cartan
    conjugation k(z) F(w) k(z)^{-1} = r(z, w) F(w) is tested as
    num(z, w) F(w) k(z) = den(z, w) k(z) F(w).
    """
    q, z, w = Fraction(q), Fraction(z), Fraction(w)
    N = lplus.N
    gz = gauss_extract(lplus, lminus, z, flavor)
    gw = gauss_extract(lplus, lminus, w, flavor)
    t = relation_table(q, flavor)

    def val(terms, X, Y, XY, YX):
        out = None
        for c, alpha, beta, swapped in terms:
            v = c * z**alpha * w**beta * (YX if swapped else XY)
            out = v if out is None else out + v
        return out

    bad: list[str] = []

    def test(label, terms, X, Y):
        if not is_zero(val(terms, X, Y, X @ Y, Y @ X)):
            bad.append(f"{label} fails at ({z}, {w})")

    for i in range(1, N):
        Fz, Fw = current_f(gz, i), current_f(gw, i)
        Ez, Ew = current_e(gz, i), current_e(gw, i)
        test(f"FF({i},{i})", t["FF_same"], Fz, Fw)
        test(f"EE({i},{i})", t["EE_same"], Ez, Ew)
        if i + 1 < N:
            test(f"FF({i},{i + 1})", t["FF_next"], Fz, current_f(gw, i + 1))
            test(f"EE({i},{i + 1})", t["EE_next"], Ez, current_e(gw, i + 1))
        for c in range(1, N + 1):
            for sgn, coords in (("+", gz.plus), ("-", gz.minus)):
                k = coords.k[c]
                key = "same" if c == i else "next" if c == i + 1 else None
                fk = t[f"kF_{key}"] if key else t["k_commute"]
                ek = t[f"kE_{key}"] if key else t["k_commute"]
                test(f"k{sgn}_{c} F_{i}", fk, k, Fw)
                test(f"k{sgn}_{c} E_{i}", ek, k, Ew)
    return bad


def pointwise_serre_violations(lplus: LOperatorPoly, lminus: LOperatorPoly, q, z1, z2, w,
                               flavor: str) -> list[str]:
    q = Fraction(q)
    N = lplus.N
    g1, g2, g3 = (gauss_extract(lplus, lminus, x, flavor) for x in (z1, z2, w))
    two = q + 1 / q
    bad: list[str] = []
    for i in range(1, N):
        for j in (i - 1, i + 1):
            if not 1 <= j < N:
                continue
            for name, cur in (("F", current_f), ("E", current_e)):
                a, b, y = cur(g1, i), cur(g2, i), cur(g3, j)
                total = zeros(lplus.dim)
                for s, r in ((a, b), (b, a)):
                    total = total + s @ r @ y - two * (s @ y @ r) + y @ s @ r
                if not is_zero(total):
                    bad.append(f"Serre {name}_{i},{name}_{j} fails at ({z1}, {z2}, {w})")
    return bad


def appendix_a_violations(lplus: LOperatorPoly, lminus: LOperatorPoly, q, z, w) -> list[str]:
    """Composed-current relations for i > j > k > l at the points z and w, first flavor."""
    q, z, w = Fraction(q), Fraction(z), Fraction(w)
    N = lplus.N
    if z == w or q * z == w / q or z / q == q * w:
        raise Resample("coincident or q-shifted sample points")
    gz = gauss_extract(lplus, lminus, z, "first")
    gw = gauss_extract(lplus, lminus, w, "first")
    cz = {(a, b): composed_current(gz, a, b, q) for a in range(2, N + 1) for b in range(1, a)}
    cw = {(a, b): composed_current(gw, a, b, q) for a in range(2, N + 1) for b in range(1, a)}
    shifted = (q**-1 - q * z / w) / (1 - z / w)
    bad: list[str] = []

    def test(label, lhs, rhs):
        if not equal(lhs, rhs):
            bad.append(f"{label} fails at ({z}, {w})")

    for i in range(1, N + 1):
        for j in range(1, i):
            test(f"FFijij({i},{j})",
                 (q**-1 - q * w / z) / (1 - w / z) * (cz[(i, j)] @ cw[(i, j)]),
                 shifted * (cw[(i, j)] @ cz[(i, j)]))
            for k in range(1, j):
                test(f"FFi2g({i},{j},{k})", cz[(j, k)] @ cw[(i, k)], shifted * (cw[(i, k)] @ cz[(j, k)]))
                test(f"FFi22g({i},{j},{k})", cz[(i, k)] @ cw[(i, j)], shifted * (cw[(i, j)] @ cz[(i, k)]))
                for l in range(1, k):
                    test(f"FFi3g({i},{j},{k},{l})", cz[(j, k)] @ cw[(i, l)], cw[(i, l)] @ cz[(j, k)])
    return bad
