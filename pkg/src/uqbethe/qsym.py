"""Bethe variable sets, q-symmetrization and admissible matrices.

Variable assignments are tuples of tuples: ``t[a-1][l-1]`` is the variable
t^a_l of type a.  Symmetrizers accept any function of an assignment whose
values support addition and multiplication by scalars (Fractions or numpy
vectors).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterator, Sequence

from .exact import Resample, scalar

Assignment = tuple  # tuple[tuple[Fraction, ...], ...]


@dataclass(frozen=True)
class Composition:
    """Numbers n_1..n_{N-1} of Bethe variables of each type."""

    N: int
    n: tuple

    def __post_init__(self):
        object.__setattr__(self, "n", tuple(int(x) for x in self.n))
        if self.N < 2:
            raise ValueError("rank N must be at least 2")
        if len(self.n) != self.N - 1:
            raise ValueError(f"n must have N-1 = {self.N - 1} entries, got {len(self.n)}")
        if any(x < 0 for x in self.n):
            raise ValueError("n entries must be nonnegative")

    @property
    def total(self) -> int:
        return sum(self.n)

    def na(self, a: int) -> int:
        """n_a with the conventions n_0 = n_N = 0."""
        return self.n[a - 1] if 1 <= a <= self.N - 1 else 0


def make_assignment(comp: Composition, values: Sequence) -> Assignment:
    """Group a flat list of values by type; checks nonzero and pairwise distinct."""
    vals = [scalar(v) for v in values]
    if len(vals) != comp.total:
        raise ValueError(f"need {comp.total} values, got {len(vals)}")
    if any(v == 0 for v in vals):
        raise ValueError("Bethe variables must be nonzero")
    if len(set(vals)) != len(vals):
        raise ValueError("Bethe variables must be pairwise distinct")
    out, pos = [], 0
    for k in comp.n:
        out.append(tuple(vals[pos:pos + k]))
        pos += k
    return tuple(out)


def flatten(t: Assignment) -> list:
    return [x for group in t for x in group]


# Symmetric groups.  A permutation sigma of 1..n is stored as the tuple
# (sigma(1), ..., sigma(n)); the permuted list is (u_{sigma(1)}, ..., u_{sigma(n)}).


def permutations(n: int) -> list[tuple]:
    return list(itertools.permutations(range(1, n + 1)))


def permute(sigma: Sequence[int], u: Sequence) -> tuple:
    return tuple(u[s - 1] for s in sigma)


def _ratio(num, den):
    if den == 0:
        raise Resample("vanishing q-symmetrization denominator")
    return num / den


def inversion_factor(sigma: Sequence[int], u: Sequence, q) -> Fraction:
    """prod over l < l' with sigma(l) > sigma(l') of
    (q u_{sigma(l')} - q^{-1} u_{sigma(l)}) / (q^{-1} u_{sigma(l')} - q u_{sigma(l)})."""
    qi = 1 / q
    out = Fraction(1)
    n = len(sigma)
    for l in range(n):
        for lp in range(l + 1, n):
            a, b = sigma[l], sigma[lp]
            if a > b:
                ua, ub = u[a - 1], u[b - 1]
                out *= _ratio(q * ub - qi * ua, qi * ub - q * ua)
    return out


def _acc(total, term):
    return term if total is None else total + term


def group_permutations(t: Assignment) -> Iterator[tuple]:
    """All elements of S_{n_1} x ... x S_{n_{N-1}} in lexicographic order."""
    return itertools.product(*(permutations(len(g)) for g in t))


def apply_group(sigmas: Sequence, t: Assignment) -> Assignment:
    return tuple(permute(s, g) for s, g in zip(sigmas, t))


def pi_action(sigmas: Sequence, G: Callable, q) -> Callable:
    """The twisted action pi(sigma) on functions of an assignment, type by type."""
    q = scalar(q)

    def acted(t: Assignment):
        c = Fraction(1)
        for s, g in zip(sigmas, t):
            c *= inversion_factor(s, g, q)
        return c * G(apply_group(sigmas, t))

    return acted


def q_symmetrize(G: Callable, t: Assignment, q):
    """Sum of pi(sigma) G over the product of symmetric groups, evaluated at t."""
    q = scalar(q)
    total = None
    for sigmas in group_permutations(t):
        total = _acc(total, pi_action(sigmas, G, q)(t))
    return total


def symmetrize(G: Callable, t: Assignment):
    """Plain symmetrization: sum of G over all permuted assignments."""
    total = None
    for sigmas in group_permutations(t):
        total = _acc(total, G(apply_group(sigmas, t)))
    return total


def varpi(t: Assignment, q) -> Fraction:
    """prod_a prod_{l < l'} (q^{-1} t^a_l - q t^a_{l'}) / (t^a_l - t^a_{l'})."""
    q = scalar(q)
    qi = 1 / q
    out = Fraction(1)
    for g in t:
        for l in range(len(g)):
            for lp in range(l + 1, len(g)):
                out *= _ratio(qi * g[l] - q * g[lp], g[l] - g[lp])
    return out


def q_symmetrize_tv(G: Callable, t: Assignment, q):
    """Sym(varpi * G): the symmetrization weighted by varpi."""
    q = scalar(q)
    return symmetrize(lambda s: varpi(s, q) * G(s), t)


def shuffles(n: int, s: int) -> list[tuple]:
    """Permutations with sigma(1) < ... < sigma(s) and sigma(s+1) < ... < sigma(n)."""
    out = []
    for first in itertools.combinations(range(1, n + 1), s):
        rest = tuple(x for x in range(1, n + 1) if x not in first)
        out.append(tuple(first) + rest)
    return out


def q_symmetrize_split(G: Callable, u: Sequence, s: int, q):
    """Right side of the split property for one type of variables.

    sum over shuffles sigma of pi(sigma) applied to the q-symmetrization over
    the first s and over the last n - s variables.
    """
    q = scalar(q)
    n = len(u)

    def inner(v: Assignment):
        w = v[0]
        head, tail = (tuple(w[:s]),), (tuple(w[s:]),)
        return q_symmetrize(
            lambda x: q_symmetrize(lambda y: G((x[0] + y[0],)), tail, q), head, q)

    total = None
    for sigma in shuffles(n, s):
        total = _acc(total, pi_action((sigma,), inner, q)((tuple(u),)))
    return total


def is_q_symmetric(G: Callable, t: Assignment, q) -> bool:
    """Invariance of G under pi of every adjacent transposition, at t."""
    q = scalar(q)
    base = G(t)
    for a, g in enumerate(t):
        for i in range(len(g) - 1):
            sigma = list(range(1, len(g) + 1))
            sigma[i], sigma[i + 1] = sigma[i + 1], sigma[i]
            sigmas = [tuple(range(1, len(h) + 1)) for h in t]
            sigmas[a] = tuple(sigma)
            if _differs(pi_action(sigmas, G, q)(t), base):
                return False
    return True


def _differs(x, y) -> bool:
    diff = x - y
    if isinstance(diff, Fraction):
        return diff != 0
    return any(v != 0 for v in diff.flat)


def qint(n: int, q) -> Fraction:
    """[n]_q = (q^n - q^{-n}) / (q - q^{-1})."""
    q = scalar(q)
    return sum((q ** (n - 1 - 2 * k) for k in range(n)), Fraction(0))


def qint_factorial(n: int, q) -> Fraction:
    if n < 0:
        raise ValueError("factorial of a negative number")
    out = Fraction(1)
    for k in range(2, n + 1):
        out *= qint(k, q)
    return out


# Admissible matrices.


@dataclass(frozen=True)
class AdmissibleS:
    """s^b_a for 1 <= a <= b <= N-1; rows[b-1] = (s^b_1, ..., s^b_b)."""

    N: int
    rows: tuple

    def s(self, b: int, a: int) -> int:
        if a == 0:
            return 0
        if not 1 <= a <= b <= self.N - 1:
            return 0
        return self.rows[b - 1][a - 1]


@dataclass(frozen=True)
class AdmissibleM:
    """m^b_a for 1 <= b <= a <= N-1; rows[b-1] = (m^b_b, ..., m^b_{N-1})."""

    N: int
    rows: tuple

    def m(self, b: int, a: int) -> int:
        if not 1 <= b <= a <= self.N - 1:
            return 0
        return self.rows[b - 1][a - b]


def _monotone(length: int, hi: int, increasing: bool) -> Iterator[tuple]:
    """Monotone tuples with entries in [0, hi]."""
    if increasing:
        yield from itertools.combinations_with_replacement(range(hi + 1), length)
    else:
        for c in itertools.combinations_with_replacement(range(hi, -1, -1), length):
            yield c


def enumerate_admissible_s(comp: Composition) -> list[AdmissibleS]:
    """Rows nondecreasing from s^b_0 = 0, column sums sum_{b >= a} s^b_a = n_a."""
    N = comp.N
    out = []
    rows: list[tuple] = []
    col = [0] * (N - 1)

    def rec(b: int):
        if b == N:
            if all(col[a] == comp.n[a] for a in range(N - 1)):
                out.append(AdmissibleS(N, tuple(rows)))
            return
        cap = max((comp.n[a] - col[a] for a in range(b)), default=0)
        for row in _monotone(b, cap, True):
            if all(col[a] + row[a] <= comp.n[a] for a in range(b)):
                # column a is closed once b passes N-1; it must be exact at b = N-1
                rows.append(row)
                for a in range(b):
                    col[a] += row[a]
                rec(b + 1)
                for a in range(b):
                    col[a] -= row[a]
                rows.pop()

    rec(1)
    return out


def enumerate_admissible_m(comp: Composition) -> list[AdmissibleM]:
    """Rows nonincreasing down to m^b_N = 0, column sums sum_{b <= a} m^b_a = n_a."""
    N = comp.N
    out = []
    rows: list[tuple] = []
    col = [0] * (N - 1)

    def rec(b: int):
        if b == N:
            if all(col[a] == comp.n[a] for a in range(N - 1)):
                out.append(AdmissibleM(N, tuple(rows)))
            return
        # column b is completed by row b, so m^b_b is forced
        first = comp.n[b - 1] - col[b - 1]
        if first < 0:
            return
        for tail in _monotone(N - 1 - b, first, False):
            row = (first,) + tail
            if all(col[b - 1 + k] + row[k] <= comp.n[b - 1 + k] for k in range(len(row))):
                rows.append(row)
                for k in range(len(row)):
                    col[b - 1 + k] += row[k]
                rec(b + 1)
                for k in range(len(row)):
                    col[b - 1 + k] -= row[k]
                rows.pop()

    rec(1)
    return out


def bold_m(adm: AdmissibleM, b: int, a: int) -> int:
    """m^1_a + ... + m^b_a, zero for b = 0."""
    return sum(adm.m(c, a) for c in range(1, b + 1))


def bold_s(adm: AdmissibleS, j: int, a: int) -> int:
    """s^j_a + ... + s^{N-1}_a, zero for j = N."""
    return sum(adm.s(c, a) for c in range(j, adm.N))


def s_tilde(adm: AdmissibleS, b: int, a: int) -> int:
    """s^a_a + ... + s^{b-1}_a, i.e. n_a minus bold_s(b, a); empty for b <= a."""
    return sum(adm.s(c, a) for c in range(a, b))


def _t(t: Assignment, a: int, l: int) -> Fraction:
    if not (1 <= a <= len(t) and 1 <= l <= len(t[a - 1])):
        raise IndexError(f"no variable t^{a}_{l}")
    return t[a - 1][l - 1]


def coeff_Y(adm: AdmissibleM, comp: Composition, t: Assignment, q) -> Fraction:
    """The rational series attached to an admissible m-matrix, as a rational function at t."""
    q = scalar(q)
    qi = 1 / q
    N = comp.N
    out = Fraction(1)
    for a in range(2, N):
        for b in range(1, a):
            for l in range(adm.m(b, a)):
                x = _t(t, a, bold_m(adm, b, a) - l)
                y = _t(t, a - 1, bold_m(adm, b, a - 1) - l)
                r = _ratio(x, y)
                out *= _ratio(r, 1 - r)
                for lp in range(bold_m(adm, b, a - 1) - l + 1, comp.na(a - 1) + 1):
                    r = _ratio(x, _t(t, a - 1, lp))
                    out *= _ratio(qi - q * r, 1 - r)
    return out


def coeff_X(adm: AdmissibleS, comp: Composition, t: Assignment, q) -> Fraction:
    """The rational series attached to an admissible s-matrix, as a rational function at t."""
    q = scalar(q)
    qi = 1 / q
    N = comp.N
    out = Fraction(1)
    for b in range(2, N):
        for a in range(1, b):
            for l in range(1, adm.s(b, a) + 1):
                x = _t(t, a, l + comp.na(a) - bold_s(adm, b, a))
                i1 = l + comp.na(a + 1) - bold_s(adm, b, a + 1)
                r = _ratio(x, _t(t, a + 1, i1))
                out *= _ratio(r, 1 - r)
                for lp in range(1, i1):
                    r = _ratio(x, _t(t, a + 1, lp))
                    out *= _ratio(q - qi * r, 1 - r)
    return out

