"""Off-shell Bethe vectors by five independent routes.

* ``trace``  the trace over auxiliary spaces of the monodromy product times
  the ordered R-product (convention free, the arbiter for the others);
* ``tv_x``, ``tv_y``  the two closed formulas in terms of U_q(gl_N)
  generators, for single evaluation modules;
* ``w``, ``w_hat``  the formulas through entries of L^+(t) and the rational
  coefficients attached to admissible matrices.
"""

from __future__ import annotations

import hashlib
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .exact import Resample, first_mismatch, identity, is_zero, scalar_str, tensor_product, unit
from .exact import partial_trace_aux, zero_vector
from .gln_rep import LOperatorPoly, ModuleRep
from .qsym import (
    AdmissibleM,
    AdmissibleS,
    Assignment,
    Composition,
    bold_m,
    coeff_X,
    coeff_Y,
    enumerate_admissible_m,
    enumerate_admissible_s,
    flatten,
    q_symmetrize_tv,
    qint_factorial,
    s_tilde,
)
from .rmatrix import embed, r_matrix, r_product_pairs

log = logging.getLogger(__name__)

ROUTES = ("trace", "tv_x", "tv_y", "w", "w_hat")
DEFAULT_MAX_CELLS = 200_000


class DimensionCapExceeded(ValueError):
    """The auxiliary space times the module is larger than the configured cap."""


@dataclass(eq=False)
class BetheTask:
    comp: Composition
    module: ModuleRep
    lplus: LOperatorPoly
    t: Assignment
    kind: str = "evaluation"  # or "tensor"
    z: Fraction | None = None
    routes: tuple = ROUTES
    max_cells: int = DEFAULT_MAX_CELLS
    _lcache: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if self.kind not in ("evaluation", "tensor"):
            raise ValueError(f"unknown module kind {self.kind!r}")
        if self.kind == "evaluation" and self.z is None:
            raise ValueError("an evaluation module needs its point z")
        bad = [r for r in self.routes if r not in ROUTES]
        if bad:
            raise ValueError(f"unknown routes {bad}")
        if self.kind == "tensor" and any(r in ("tv_x", "tv_y") for r in self.routes):
            raise ValueError("routes tv_x and tv_y need a single evaluation module")
        if self.comp.N != self.module.N or self.lplus.N != self.module.N:
            raise ValueError("rank mismatch between composition, module and L-operator")
        if self.lplus.sign != "plus":
            raise ValueError("the Bethe vector is built from L^+")

    @property
    def N(self) -> int:
        return self.comp.N

    @property
    def q(self) -> Fraction:
        return self.module.q

    @property
    def weights(self) -> tuple:
        return self.module.weights

    def L(self, i: int, j: int, u) -> np.ndarray:
        """L^+_{i,j}(u) on the module, cached per point."""
        if u not in self._lcache:
            self._lcache[u] = self.lplus(u)
        return self._lcache[u][i - 1, j - 1]

    def fingerprint(self) -> str:
        parts = [str(self.N), ",".join(map(str, self.comp.n)), scalar_str(self.q),
                 self.kind, scalar_str(self.z) if self.z is not None else "-",
                 ";".join(scalar_str(x) for x in flatten(self.t)),
                 str(self.module.dim)]
        return hashlib.sha256("|".join(parts).encode()).hexdigest()[:16]


@dataclass
class BetheVector:
    coords: np.ndarray
    route: str
    fingerprint: str


def _ratio(num, den):
    if den == 0:
        raise Resample("pole of a Bethe-vector coefficient")
    return num / den


def _aux_positions(comp: Composition) -> list[int]:
    """Type a of each auxiliary leg 1..M."""
    return [a for a in range(1, comp.N) for _ in range(comp.na(a))]


def trace_prefactor(task: BetheTask) -> Fraction:
    q, t = task.q, task.t
    out = Fraction(1)
    for a in range(1, task.N):
        for b in range(a + 1, task.N):
            for tb in t[b - 1]:
                for ta in t[a - 1]:
                    out *= _ratio(q * tb - ta / q, tb - ta)
    return out


def _check_cap(task: BetheTask):
    cells = task.N ** task.comp.total * task.module.dim
    if cells > task.max_cells:
        raise DimensionCapExceeded(
            f"auxiliary space times module has dimension {cells}, above the cap {task.max_cells}")


def bethe_trace(task: BetheTask) -> np.ndarray:
    """Contract <alpha0| L^(1)...L^(M) R |beta0> (x) v leg by leg.

    Right multiplication by E_{21}^{(x) n_1} (x) ... maps only the basis
    vector alpha0 = (1,..,1,2,..) to beta0 = (2,..,2,3,..), so the trace is a
    single matrix element in the auxiliary space.
    """
    _check_cap(task)
    N, q, M = task.N, task.q, task.comp.total
    us = flatten(task.t)
    types = _aux_positions(task.comp)
    v = task.module.singular
    if M == 0:
        return v.copy()
    # R-product applied to beta0, rightmost factor first
    psi = np.zeros((N,) * M, dtype=object)
    psi[...] = Fraction(0)
    psi[tuple(a for a in types)] = Fraction(1)  # 0-based index a means basis vector a+1
    for j, i in reversed(r_product_pairs(M)):
        r4 = r_matrix(N, q, us[j - 1], us[i - 1]).reshape(N, N, N, N)
        out = np.tensordot(r4, psi, axes=([2, 3], [j - 1, i - 1]))
        psi = np.moveaxis(out, [0, 1], [j - 1, i - 1])
    phi = np.multiply.outer(psi, v)
    for k in range(M, 0, -1):
        grid = task.lplus(us[k - 1])
        out = np.tensordot(grid, phi, axes=([1, 3], [k - 1, M]))
        phi = np.moveaxis(out, [0, 1], [k - 1, M])
    alpha0 = tuple(a - 1 for a in types)
    return trace_prefactor(task) * phi[alpha0]


def bethe_trace_dense(task: BetheTask) -> np.ndarray:
    """The same trace with every operator built as a full matrix (small cases only)."""
    _check_cap(task)
    N, q, M = task.N, task.q, task.comp.total
    d = task.module.dim
    v = task.module.singular
    if M == 0:
        return v.copy()
    us = flatten(task.t)
    aux = N**M
    T = identity(aux * d)
    for k in range(1, M + 1):
        grid = task.lplus(us[k - 1])
        lk = sum((tensor_product(embed(unit(N, i + 1, j + 1), N, M, (k,)), grid[i, j])
                  for i in range(N) for j in range(N)), np.zeros((aux * d, aux * d), dtype=object))
        T = T @ lk
    R = identity(aux)
    for j, i in r_product_pairs(M):
        R = R @ embed(r_matrix(N, q, us[j - 1], us[i - 1]), N, M, (j, i))
    X = identity(1)
    for a in _aux_positions(task.comp):
        X = tensor_product(X, unit(N, a + 1, a))
    big = T @ tensor_product(R @ X, identity(d))
    return trace_prefactor(task) * (partial_trace_aux(big, [aux], d) @ v)


# Closed formulas on single evaluation modules.


def x_order(N: int) -> list[tuple[int, int]]:
    """Pairs (b, a), b >= a, left to right: larger b first, then larger a."""
    return [(b, a) for b in range(N - 1, 0, -1) for a in range(b, 0, -1)]


def _check_power(task: BetheTask, i: int, j: int, k: int) -> np.ndarray:
    key = ("checkpow", i, j, k)
    cache = task._lcache
    if key not in cache:
        base = task.module.check_x(i, j)
        out = identity(task.module.dim)
        for _ in range(k):
            out = out @ base
        cache[key] = out
    return cache[key]


def tv_x_operator(task: BetheTask, s: AdmissibleS) -> tuple[Fraction, np.ndarray]:
    q = task.q
    c = Fraction(1)
    op = identity(task.module.dim)
    for b, a in x_order(task.N):
        k = s.s(b, a) - s.s(b, a - 1)
        c *= q ** (s.s(b, a - 1) * (s.s(b, a - 1) - s.s(b, a))) / qint_factorial(k, q)
        if k:
            op = op @ _check_power(task, b + 1, a, k)
    return c, op


def tv_x_coefficient(task: BetheTask, s: AdmissibleS, t: Assignment) -> Fraction:
    q, z, lam = task.q, task.z, task.weights
    out = Fraction(1)
    for b in range(2, task.N):
        for a in range(1, b):
            for l in range(1, s.s(b, a) + 1):
                x = t[a - 1][l + s_tilde(s, b, a) - 1]
                top = l + s_tilde(s, b, a + 1)
                out *= _ratio(q ** lam[a] * x - q ** (-lam[a]) * z, t[a][top - 1] - x)
                for lp in range(1, top):
                    y = t[a][lp - 1]
                    out *= _ratio(q * y - x / q, y - x)
    return out


def bethe_tv_x(task: BetheTask) -> np.ndarray:
    q, v = task.q, task.module.singular
    total = zero_vector(task.module.dim)
    for s in enumerate_admissible_s(task.comp):
        c, op = tv_x_operator(task, s)
        vec = op @ v
        if is_zero(vec):
            continue
        sym = q_symmetrize_tv(lambda tt: tv_x_coefficient(task, s, tt), task.t, q)
        total = total + (c * sym) * vec
    return (q - 1 / q) ** task.comp.total * total


Y_ORDERS = ("row_major", "reverse_x", "column_major")


def y_order(N: int, reading: str = "reverse_x") -> list[tuple[int, int]]:
    """Pairs (a, b), 1 <= b <= a <= N-1, left to right, for the factors E_{a+1,b}.

    ``row_major``: b ascending outside, a ascending inside.
    ``reverse_x``: the reverse of :func:`x_order` under (b, a) -> (a, b).
    ``column_major``: b ascending outside, a descending inside.
    """
    if reading == "row_major":
        return [(a, b) for b in range(1, N) for a in range(b, N)]
    if reading == "reverse_x":
        return [(b, a) for (b, a) in reversed(x_order(N))]
    if reading == "column_major":
        return [(a, b) for b in range(1, N) for a in range(N - 1, b - 1, -1)]
    raise ValueError(f"unknown ordering {reading!r}")


def tv_y_operator(task: BetheTask, m: AdmissibleM, reading: str = "reverse_x",
                  q_powers: bool = True) -> tuple[Fraction, np.ndarray]:
    q = task.q
    c = Fraction(1)
    op = identity(task.module.dim)
    for a, b in y_order(task.N, reading):
        k = m.m(b, a) - m.m(b, a + 1)
        c /= qint_factorial(k, q)
        if q_powers:
            c *= q ** (m.m(b, a + 1) * k)
        if k:
            op = op @ _check_power(task, a + 1, b, k)
    return c, op


def tv_y_coefficient(task: BetheTask, m: AdmissibleM, t: Assignment) -> Fraction:
    q, z, lam = task.q, task.z, task.weights
    comp = task.comp
    out = Fraction(1)
    for a in range(2, task.N):
        for b in range(1, a):
            for l in range(m.m(b, a)):
                y = t[a - 1][bold_m(m, b, a) - l - 1]
                lo = bold_m(m, b, a - 1) - l
                out *= _ratio(q ** lam[a - 1] * y - q ** (-lam[a - 1]) * z, t[a - 2][lo - 1] - y)
                for lp in range(lo + 1, comp.na(a - 1) + 1):
                    x = t[a - 2][lp - 1]
                    out *= _ratio(q * y - x / q, y - x)
    return out


def y_sign(task: BetheTask, m: AdmissibleM) -> int:
    """(-1)^{sum_a (n_a - m^a_a)}, the sign carried by (q^{-1} - q) in the L-operator form."""
    return (-1) ** sum(task.comp.na(a) - m.m(a, a) for a in range(1, task.N))


def bethe_tv_y(task: BetheTask, reading: str = "reverse_x", q_powers: bool = True,
               signed: bool = True) -> np.ndarray:
    """The second closed formula.

    ``q_powers=False`` with ``reading="column_major"`` is the form obtained
    before the generators are reordered with the Serre relations.
    ``signed=False`` drops the factor :func:`y_sign`; that reading disagrees
    with the trace route whenever some n_a - m^a_a is odd and the term survives.
    """
    q, v = task.q, task.module.singular
    total = zero_vector(task.module.dim)
    for m in enumerate_admissible_m(task.comp):
        c, op = tv_y_operator(task, m, reading, q_powers)
        if signed:
            c *= y_sign(task, m)
        vec = op @ v
        if is_zero(vec):
            continue
        sym = q_symmetrize_tv(lambda tt: tv_y_coefficient(task, m, tt), task.t, q)
        total = total + (c * sym) * vec
    return (q - 1 / q) ** task.comp.total * total


# Formulas through L-operator entries (any module with a singular vector).


def _w_summand(task: BetheTask, m: AdmissibleM, t: Assignment) -> np.ndarray:
    N, q = task.N, task.q
    comp = task.comp
    vec = task.module.singular
    # the rightmost factor acts first: build the operator list left to right, then apply reversed
    factors: list[np.ndarray] = []
    for a in range(1, N):
        na = comp.na(a)
        for b in range(N - 1, a - 1, -1):
            for l in range(na - m.m(a, b) + 1, na - m.m(a, b + 1) + 1):
                factors.append(task.L(a, b + 1, t[a - 1][l - 1]))
        for l in range(1, na - m.m(a, a) + 1):
            factors.append(task.L(a, a, t[a - 1][l - 1]))
    for f in reversed(factors):
        vec = f @ vec
    return coeff_Y(m, comp, t, q) * vec


def bethe_w(task: BetheTask) -> np.ndarray:
    N, q = task.N, task.q
    comp = task.comp
    total = zero_vector(task.module.dim)
    for m in enumerate_admissible_m(comp):
        c = (1 / q - q) ** sum(comp.na(a) - m.m(a, a) for a in range(1, N))
        for a in range(1, N):
            for b in range(a, N):
                c /= qint_factorial(m.m(a, b) - m.m(a, b + 1), q)
        total = total + c * q_symmetrize_tv(lambda tt: _w_summand(task, m, tt), task.t, q)
    return total


def _w_hat_coefficient(s: AdmissibleS, comp: Composition, t: Assignment, q,
                       numerator: str) -> Fraction:
    if numerator == "ratio":
        return coeff_X(s, comp, t, q)
    # the variant with 1/(1 - x) in place of x/(1 - x) for the leading factors
    out = coeff_X(s, comp, t, q)
    for b in range(2, comp.N):
        for a in range(1, b):
            for l in range(1, s.s(b, a) + 1):
                x = t[a - 1][l + s_tilde(s, b, a) - 1]
                y = t[a][l + s_tilde(s, b, a + 1) - 1]
                out *= _ratio(y, x)
    return out


def _w_hat_summand(task: BetheTask, s: AdmissibleS, t: Assignment, numerator: str) -> np.ndarray:
    N, q = task.N, task.q
    comp = task.comp
    factors: list[np.ndarray] = []
    for b in range(N - 1, 0, -1):
        for a in range(1, b + 1):
            for l in range(s.s(b, a - 1) + 1, s.s(b, a) + 1):
                factors.append(task.L(a, b + 1, t[b - 1][l - 1]))
        for l in range(s.s(b, b) + 1, comp.na(b) + 1):
            factors.append(task.L(b + 1, b + 1, t[b - 1][l - 1]))
    vec = task.module.singular
    for f in reversed(factors):
        vec = f @ vec
    return _w_hat_coefficient(s, comp, t, q, numerator) * vec


def bethe_w_hat(task: BetheTask, numerator: str = "ratio") -> np.ndarray:
    """``numerator="ratio"`` uses x/(1-x) as in the generating series; "one" uses 1/(1-x)."""
    N, q = task.N, task.q
    comp = task.comp
    total = zero_vector(task.module.dim)
    for s in enumerate_admissible_s(comp):
        c = (q - 1 / q) ** sum(comp.na(b) - s.s(b, b) for b in range(1, N))
        for b in range(1, N):
            for a in range(1, b + 1):
                c /= qint_factorial(s.s(b, a) - s.s(b, a - 1), q)
        total = total + c * q_symmetrize_tv(lambda tt: _w_hat_summand(task, s, tt, numerator),
                                            task.t, q)
    return total


ROUTE_FUNCTIONS: dict[str, Callable[[BetheTask], np.ndarray]] = {
    "trace": bethe_trace,
    "tv_x": bethe_tv_x,
    "tv_y": bethe_tv_y,
    "w": bethe_w,
    "w_hat": bethe_w_hat,
}


def compute_route(task: BetheTask, route: str) -> BetheVector:
    return BetheVector(ROUTE_FUNCTIONS[route](task), route, task.fingerprint())


def weight_check(vec: BetheVector | np.ndarray, task: BetheTask) -> bool:
    """E_{a,a} vec = q^{Lambda_a + n_{a-1} - n_a} vec for every a, or vec = 0."""
    coords = vec.coords if isinstance(vec, BetheVector) else vec
    if is_zero(coords):
        return True
    q, lam, comp = task.q, task.weights, task.comp
    for a in range(1, task.N + 1):
        expected = q ** (lam[a - 1] + comp.na(a - 1) - comp.na(a))
        if first_mismatch(task.module.cartan[a - 1] @ coords, expected * coords) is not None:
            return False
    return True


@dataclass
class CrossValidation:
    fingerprint: str
    vectors: dict
    agree: bool
    mismatch: tuple | None  # (route_a, route_b, index, value_a, value_b)
    weights_ok: dict


def cross_validate(task: BetheTask, routes: Sequence[str] | None = None) -> CrossValidation:
    routes = tuple(routes or task.routes)
    if len(routes) < 2:
        raise ValueError("cross validation needs at least two routes")
    vectors = {r: ROUTE_FUNCTIONS[r](task) for r in routes}
    ref = routes[0]
    mismatch = None
    for r in routes[1:]:
        diff = first_mismatch(vectors[ref], vectors[r])
        if diff is not None:
            mismatch = (ref, r) + tuple(diff)
            break
    weights_ok = {r: weight_check(vectors[r], task) for r in routes}
    return CrossValidation(task.fingerprint(), vectors, mismatch is None, mismatch, weights_ok)
