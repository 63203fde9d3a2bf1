"""The trigonometric R-matrix of the vector representation and ordered R-products."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .exact import (Resample, from_sparse, identity, scalar, sparse_matmul, sparse_rows,
                    tensor_product, zeros)


@dataclass(frozen=True)
class RPoint:
    N: int
    u: Fraction
    v: Fraction
    q: Fraction

    def __post_init__(self):
        for name in ("u", "v", "q"):
            object.__setattr__(self, name, scalar(getattr(self, name)))
        if self.q == 0:
            raise ValueError("q must be nonzero")
        if self.q * self.u - self.v / self.q == 0:
            raise Resample("q*u - v/q vanishes")


def build_r(p: RPoint) -> np.ndarray:
    """R(u,v) on C^N (x) C^N, first factor on the slow index."""
    N, u, v, q = p.N, p.u, p.v, p.q
    den = q * u - v / q
    mid = (u - v) / den
    ex = (q - 1 / q) / den
    out = zeros(N * N)
    for i in range(N):
        out[i * N + i, i * N + i] = Fraction(1)
    for i in range(N):
        for j in range(i + 1, N):
            # E_ii (x) E_jj and E_jj (x) E_ii
            out[i * N + j, i * N + j] = mid
            out[j * N + i, j * N + i] = mid
            # u E_ij (x) E_ji : row (i,j), column (j,i)
            out[i * N + j, j * N + i] = ex * u
            # v E_ji (x) E_ij : row (j,i), column (i,j)
            out[j * N + i, i * N + j] = ex * v
    return out


def r_matrix(N: int, q, u, v) -> np.ndarray:
    return build_r(RPoint(N, u, v, q))


def swap(N: int) -> np.ndarray:
    out = zeros(N * N)
    for i in range(N):
        for j in range(N):
            out[i * N + j, j * N + i] = Fraction(1)
    return out


def embed(op: np.ndarray, N: int, M: int, legs: Sequence[int]) -> np.ndarray:
    """Place ``op`` on the given 1-based legs of (C^N)^{(x)M}.

    ``op`` acts on len(legs) legs; its k-th tensor factor goes to ``legs[k]``.
    """
    k = len(legs)
    zero_based = [leg - 1 for leg in legs]
    if len(set(zero_based)) != k or not all(0 <= leg < M for leg in zero_based):
        raise ValueError(f"bad legs {legs} for M={M}")
    rest = [leg for leg in range(M) if leg not in zero_based]
    big = tensor_product(op, identity(N ** (M - k)))
    order = zero_based + rest
    perm = [order.index(leg) for leg in range(M)]
    arr = big.reshape((N,) * (2 * M)).transpose(perm + [M + p for p in perm])
    return arr.reshape(N**M, N**M)


def ybe_sides(N: int, q, u, v, w) -> tuple[np.ndarray, np.ndarray]:
    """R12(u,v) R13(u,w) R23(v,w) and R23(v,w) R13(u,w) R12(u,v) on three legs.

    The products are formed row-sparse; R has at most two nonzeros per row.
    """
    r12 = sparse_rows(embed(r_matrix(N, q, u, v), N, 3, (1, 2)))
    r13 = sparse_rows(embed(r_matrix(N, q, u, w), N, 3, (1, 3)))
    r23 = sparse_rows(embed(r_matrix(N, q, v, w), N, 3, (2, 3)))
    lhs = sparse_matmul(sparse_matmul(r12, r13), r23)
    rhs = sparse_matmul(sparse_matmul(r23, r13), r12)
    return from_sparse(lhs), from_sparse(rhs)


def check_ybe(N: int, q, u, v, w) -> bool:
    lhs, rhs = ybe_sides(N, q, u, v, w)
    return bool(np.array_equal(lhs, rhs))


def r_product_pairs(M: int) -> list[tuple[int, int]]:
    """Leg pairs (j, i), j > i, in left-to-right order of the ordered R-product.

    R^(ji) stands left of R^(ml) when j > m, or j == m and i > l.
    """
    return [(j, i) for j in range(M, 1, -1) for i in range(j - 1, 0, -1)]


def build_r_product(N: int, q, points: Sequence) -> np.ndarray:
    """Ordered product of R^(ji)(u_j, u_i) over all leg pairs, on N^M dimensions."""
    M = len(points)
    out = identity(N**M)
    for j, i in r_product_pairs(M):
        out = out @ embed(r_matrix(N, q, points[j - 1], points[i - 1]), N, M, (j, i))
    return out
