"""Finite-dimensional U_q(gl_N) modules and evaluation L-operators.

A module is given by explicit generator matrices.  All algebra indices in the
public API are 1-based, matching the usual E_{a,b} notation; array indices
are 0-based internally.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .exact import (
    basis_vector,
    diag,
    equal,
    identity,
    invert,
    is_zero,
    scalar,
    sparse_matmul,
    sparse_rows,
    tensor_product,
    unit,
    zeros,
)
from .rmatrix import r_matrix


@dataclass(frozen=True, eq=False)
class ModuleRep:
    """Generators E_{a,a}, E_{a,a+1}, E_{a+1,a} acting on a finite-dimensional space."""

    N: int
    q: Fraction
    cartan: tuple  # E_{a,a}, a = 1..N
    raising: tuple  # E_{a,a+1}, a = 1..N-1
    lowering: tuple  # E_{a+1,a}, a = 1..N-1
    singular: np.ndarray
    weights: tuple  # Lambda_a with E_{a,a} v = q^{Lambda_a} v
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def dim(self) -> int:
        return self.singular.shape[0]

    def E(self, i: int, j: int, via: int | None = None) -> np.ndarray:
        """E_{i,j}; composed roots are built recursively (see composed_root)."""
        if i == j:
            return self.cartan[i - 1]
        return composed_root(self, i, j, via)

    def cartan_inv(self, a: int) -> np.ndarray:
        key = ("cinv", a)
        if key not in self._cache:
            self._cache[key] = invert(self.cartan[a - 1])
        return self._cache[key]

    def check_x(self, i: int, j: int) -> np.ndarray:
        """The combination E_{i,j} E_{i,i} used in the closed formulas."""
        return self.E(i, j) @ self.cartan[i - 1]


def vector_rep(N: int, q) -> ModuleRep:
    q = scalar(q)
    if q == 0:
        raise ValueError("q must be nonzero")
    cartan = tuple(diag([q if b == a else 1 for b in range(1, N + 1)]) for a in range(1, N + 1))
    raising = tuple(unit(N, a, a + 1) for a in range(1, N))
    lowering = tuple(unit(N, a + 1, a) for a in range(1, N))
    weights = tuple(1 if a == 1 else 0 for a in range(1, N + 1))
    return ModuleRep(N, q, cartan, raising, lowering, basis_vector(N, 1), weights)


def composed_root(m: ModuleRep, c: int, a: int, via: int | None = None) -> np.ndarray:
    """E_{c,a} for c != a.

    Lowering (c > a): E_{c,a} = E_{c,b}E_{b,a} - q^{-1} E_{b,a}E_{c,b}.
    Raising (c < a):  E_{c,a} = E_{c,b}E_{b,a} - q E_{b,a}E_{c,b}.
    ``via`` picks the intermediate b; inner factors use the default b.
    """
    N = m.N
    if not (1 <= a <= N and 1 <= c <= N) or a == c:
        raise ValueError(f"invalid root index ({c},{a}) for N={N}")
    lo, hi = min(a, c), max(a, c)
    if hi == lo + 1:
        return m.lowering[a - 1] if c > a else m.raising[c - 1]
    b = lo + 1 if via is None else via
    if not lo < b < hi:
        raise ValueError(f"intermediate index {b} not strictly between {lo} and {hi}")
    key = ("root", c, a, b)
    if key not in m._cache:
        x, y = m.E(c, b), m.E(b, a)
        coeff = 1 / m.q if c > a else m.q
        m._cache[key] = x @ y - coeff * (y @ x)
    return m._cache[key]


def tensor_module(m1: ModuleRep, m2: ModuleRep) -> ModuleRep:
    """The tensor product through the Chevalley coproduct."""
    if m1.N != m2.N or m1.q != m2.q:
        raise ValueError("tensor_module needs equal rank and equal q")
    N = m1.N
    one1, one2 = identity(m1.dim), identity(m2.dim)
    cartan = tuple(tensor_product(m1.cartan[a], m2.cartan[a]) for a in range(N))
    raising = []
    lowering = []
    for a in range(1, N):
        k1 = m1.cartan_inv(a) @ m1.cartan[a]  # E_{a,a}^{-1} E_{a+1,a+1}
        k2 = m2.cartan[a - 1] @ m2.cartan_inv(a + 1)  # E_{a,a} E_{a+1,a+1}^{-1}
        raising.append(tensor_product(m1.raising[a - 1], one2) + tensor_product(k1, m2.raising[a - 1]))
        lowering.append(tensor_product(one1, m2.lowering[a - 1]) + tensor_product(m1.lowering[a - 1], k2))
    singular = np.kron(m1.singular, m2.singular)
    weights = tuple(x + y for x, y in zip(m1.weights, m2.weights))
    return ModuleRep(N, m1.q, cartan, tuple(raising), tuple(lowering), singular, weights)


def tensor_power(m: ModuleRep, k: int) -> ModuleRep:
    out = m
    for _ in range(k - 1):
        out = tensor_module(out, m)
    return out


def module_violations(m: ModuleRep) -> list[str]:
    """All failed defining relations and singular-vector conditions (empty if none)."""
    q, N = m.q, m.N
    bad: list[str] = []
    gens = [((b, b + 1), m.raising[b - 1]) for b in range(1, N)]
    gens += [((b + 1, b), m.lowering[b - 1]) for b in range(1, N)]
    for a in range(1, N + 1):
        for (b, c), g in gens:
            lhs = m.cartan[a - 1] @ g @ m.cartan_inv(a)
            power = (1 if a == b else 0) - (1 if a == c else 0)
            if not equal(lhs, q**power * g):
                bad.append(f"cartan conjugation a={a} on E_{b},{c}")
    for a in range(1, N):
        for b in range(1, N):
            e, f = m.raising[a - 1], m.lowering[b - 1]
            lhs = e @ f - f @ e
            if a == b:
                rhs = (m.cartan[a - 1] @ m.cartan_inv(a + 1) - m.cartan_inv(a) @ m.cartan[a]) / (q - 1 / q)
            else:
                rhs = zeros(m.dim)
            if not equal(lhs, rhs):
                bad.append(f"commutator [E_{a},{a + 1}, E_{b + 1},{b}]")
    bad += [f"serre {name}" for name in serre_violations(m)]
    for a in range(1, N):
        if not is_zero(m.raising[a - 1] @ m.singular):
            bad.append(f"E_{a},{a + 1} does not annihilate the singular vector")
    for a in range(1, N + 1):
        if not equal(m.cartan[a - 1] @ m.singular, q ** m.weights[a - 1] * m.singular):
            bad.append(f"E_{a},{a} eigenvalue on the singular vector")
    return bad


def serre_violations(m: ModuleRep) -> list[str]:
    """q-Serre relations X^2 Y - (q+1/q) X Y X + Y X^2 = 0 for adjacent simple roots."""
    q2 = m.q + 1 / m.q
    bad = []
    for family, gens in (("lowering", m.lowering), ("raising", m.raising)):
        for i in range(len(gens)):
            for j in (i - 1, i + 1):
                if 0 <= j < len(gens):
                    x, y = gens[i], gens[j]
                    expr = x @ x @ y - q2 * (x @ y @ x) + y @ x @ x
                    if not is_zero(expr):
                        bad.append(f"{family} i={i + 1} j={j + 1}")
    return bad


def root_independence_violations(m: ModuleRep) -> list[str]:
    bad = []
    for lo in range(1, m.N + 1):
        for hi in range(lo + 2, m.N + 1):
            for c, a in ((hi, lo), (lo, hi)):
                ref = composed_root(m, c, a, lo + 1)
                for b in range(lo + 2, hi):
                    if not equal(ref, composed_root(m, c, a, b)):
                        bad.append(f"E_{c},{a} differs for b={lo + 1} and b={b}")
    return bad


@dataclass(frozen=True, eq=False)
class LOperatorPoly:
    """L^+(u) = sum_k coeff[k] u^{-k} or L^-(u) = sum_k coeff[k] u^k.

    Each coefficient is an N x N block grid (array of shape (N, N, d, d));
    block (i, j) is the operator L_{i+1, j+1}[k] on the module.
    """

    sign: str
    N: int
    coeffs: tuple

    @property
    def deg(self) -> int:
        return len(self.coeffs) - 1

    @property
    def dim(self) -> int:
        return self.coeffs[0].shape[2]

    def __call__(self, u) -> np.ndarray:
        u = scalar(u)
        x = 1 / u if self.sign == "plus" else u
        out = np.array(self.coeffs[0], dtype=object)
        power = Fraction(1)
        for c in self.coeffs[1:]:
            power *= x
            out = out + power * c
        return out

    def entry(self, i: int, j: int, u) -> np.ndarray:
        return self(u)[i - 1, j - 1]


def constant_l(m: ModuleRep) -> tuple[np.ndarray, np.ndarray]:
    """The constant matrices L^+ and L^- of the evaluation map, as block grids."""
    N, q, d = m.N, m.q, m.dim
    lp = np.empty((N, N, d, d), dtype=object)
    lm = np.empty((N, N, d, d), dtype=object)
    for a in range(1, N + 1):
        for b in range(1, N + 1):
            if a < b:
                lp[a - 1, b - 1] = (q - 1 / q) * (m.E(b, a) @ m.cartan[b - 1])
                lm[a - 1, b - 1] = zeros(d)
            elif a == b:
                lp[a - 1, b - 1] = m.cartan[a - 1]
                lm[a - 1, b - 1] = m.cartan_inv(a)
            else:
                lp[a - 1, b - 1] = zeros(d)
                lm[a - 1, b - 1] = (1 / q - q) * (m.cartan_inv(a) @ m.E(b, a))
    return lp, lm


def eval_l(m: ModuleRep, z, sign: str) -> LOperatorPoly:
    z = scalar(z)
    if z == 0:
        raise ValueError("evaluation point z must be nonzero")
    lp, lm = constant_l(m)
    if sign == "plus":
        return LOperatorPoly("plus", m.N, (lp, -z * lm))
    if sign == "minus":
        return LOperatorPoly("minus", m.N, (lm, -(1 / z) * lp))
    raise ValueError(f"sign must be 'plus' or 'minus', not {sign!r}")


def tensor_l(l1: LOperatorPoly, l2: LOperatorPoly) -> LOperatorPoly:
    """Delta L_{i,j}(u) = sum_k L_{k,j}(u) (x) L_{i,k}(u); l1 acts on the first factor."""
    if l1.N != l2.N or l1.sign != l2.sign:
        raise ValueError("tensor_l needs equal rank and equal sign")
    N = l1.N
    d = l1.dim * l2.dim
    coeffs = []
    for n in range(l1.deg + l2.deg + 1):
        grid = np.empty((N, N, d, d), dtype=object)
        for i in range(N):
            for j in range(N):
                acc = zeros(d)
                for r in range(max(0, n - l2.deg), min(n, l1.deg) + 1):
                    c1, c2 = l1.coeffs[r], l2.coeffs[n - r]
                    for k in range(N):
                        acc = acc + tensor_product(c1[k, j], c2[i, k])
                grid[i, j] = acc
        coeffs.append(grid)
    return LOperatorPoly(l1.sign, N, tuple(coeffs))


def zero_mode_violations(lplus: LOperatorPoly, lminus: LOperatorPoly) -> list[str]:
    N = lplus.N
    bad = []
    p0, m0 = lplus.coeffs[0], lminus.coeffs[0]
    for i in range(N):
        for j in range(i + 1, N):
            if not is_zero(p0[j, i]):
                bad.append(f"L+_{j + 1},{i + 1}[0] nonzero")
            if not is_zero(m0[i, j]):
                bad.append(f"L-_{i + 1},{j + 1}[0] nonzero")
    for k in range(N):
        if not equal(p0[k, k] @ m0[k, k], identity(lplus.dim)):
            bad.append(f"L+_{k + 1},{k + 1}[0] L-_{k + 1},{k + 1}[0] != 1")
    return bad


def _lift(grid: np.ndarray, N: int, leg: int) -> np.ndarray:
    """sum_{i,j} e_ij (x) L_ij on C^N (x) C^N (x) V, with e_ij on auxiliary leg 0 or 1."""
    d = grid.shape[2]
    out = zeros(N * N * d)
    for i in range(N):
        for j in range(N):
            for k in range(N):
                r, c = (i * N + k, j * N + k) if leg == 0 else (k * N + i, k * N + j)
                out[r * d:(r + 1) * d, c * d:(c + 1) * d] = grid[i, j]
    return out


def rll_holds(l1: LOperatorPoly, l2: LOperatorPoly, q, u, v) -> bool:
    """R(u,v) L1(u) L2(v) == L2(v) L1(u) R(u,v) on C^N (x) C^N (x) V."""
    N = l1.N
    d = l1.dim
    r = tensor_product(r_matrix(N, q, u, v), identity(d))
    a = _lift(l1(u), N, 0)
    b = _lift(l2(v), N, 1)
    lhs = sparse_matmul(sparse_matmul(sparse_rows(r), sparse_rows(a)), sparse_rows(b))
    rhs = sparse_matmul(sparse_matmul(sparse_rows(b), sparse_rows(a)), sparse_rows(r))
    return lhs == rhs


def check_rll(lplus: LOperatorPoly, lminus: LOperatorPoly, q, u, v) -> bool:
    """All three sign combinations (+,+), (-,-), (+,-)."""
    return (rll_holds(lplus, lplus, q, u, v)
            and rll_holds(lminus, lminus, q, u, v)
            and rll_holds(lplus, lminus, q, u, v))
