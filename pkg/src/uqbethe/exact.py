"""Exact rational scalars and dense operator matrices.

Scalars are :class:`fractions.Fraction` values.  Operator matrices are numpy
arrays of dtype ``object`` holding Fractions, so ``@``, ``+`` and ``np.kron``
stay exact.  Tensor legs follow one convention throughout the package: the
first factor of a tensor product is the slowest-varying index.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

Scalar = Fraction

ZERO = Fraction(0)
ONE = Fraction(1)


class Resample(ArithmeticError):
    """A sample point hit a pole or a singular block; draw a new one."""


class SingularMatrixError(Resample):
    """Raised by :func:`invert` when the matrix has no inverse."""


def scalar(x) -> Fraction:
    """Coerce ints, Fractions and strings like ``"3/7"`` to a Fraction.

    Floats are refused so that inexact values cannot leak in.
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not scalars")
    if isinstance(x, (int, np.integer)):
        return Fraction(int(x))
    if isinstance(x, str):
        return Fraction(x.strip())
    raise TypeError(f"cannot convert {type(x).__name__} to an exact scalar")


def scalar_str(x: Fraction) -> str:
    return str(x)


def div(a, b) -> Fraction:
    """Exact quotient that signals :class:`Resample` on a vanishing divisor."""
    if b == 0:
        raise Resample("division by zero at sample point")
    return scalar(a) / b


def matrix(rows: Iterable[Iterable]) -> np.ndarray:
    out = np.array([[scalar(x) for x in row] for row in rows], dtype=object)
    if out.ndim != 2:
        raise ValueError("matrix() needs a rectangular list of rows")
    return out


def vector(entries: Iterable) -> np.ndarray:
    return np.array([scalar(x) for x in entries], dtype=object)


def zeros(rows: int, cols: int | None = None) -> np.ndarray:
    cols = rows if cols is None else cols
    out = np.empty((rows, cols), dtype=object)
    out.fill(ZERO)
    return out


def zero_vector(n: int) -> np.ndarray:
    out = np.empty(n, dtype=object)
    out.fill(ZERO)
    return out


def identity(n: int) -> np.ndarray:
    out = zeros(n)
    for i in range(n):
        out[i, i] = ONE
    return out


def unit(n: int, i: int, j: int) -> np.ndarray:
    """Matrix unit E_ij on C^n, indices 1-based."""
    out = zeros(n)
    out[i - 1, j - 1] = ONE
    return out


def basis_vector(n: int, i: int) -> np.ndarray:
    out = zero_vector(n)
    out[i - 1] = ONE
    return out


def diag(entries: Sequence) -> np.ndarray:
    out = zeros(len(entries))
    for i, x in enumerate(entries):
        out[i, i] = scalar(x)
    return out


def tensor_product(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product; ``a`` acts on the slow leg."""
    return np.kron(a, b)


def tensor_all(factors: Sequence[np.ndarray]) -> np.ndarray:
    out = factors[0]
    for f in factors[1:]:
        out = np.kron(out, f)
    return out


def partial_trace_aux(big: np.ndarray, aux_dims: Sequence[int], keep_dim: int) -> np.ndarray:
    """Trace out the leading auxiliary legs, keeping the last leg of size ``keep_dim``."""
    aux = int(np.prod(aux_dims, dtype=object)) if aux_dims else 1
    n = aux * keep_dim
    if big.shape != (n, n):
        raise ValueError(
            f"partial_trace_aux: expected a {n}x{n} matrix, got {big.shape[0]}x{big.shape[1]}"
        )
    blocks = big.reshape(aux, keep_dim, aux, keep_dim)
    out = zeros(keep_dim)
    for alpha in range(aux):
        out = out + blocks[alpha, :, alpha, :]
    return out


def invert(a: np.ndarray) -> np.ndarray:
    """Exact Gauss-Jordan inverse.  Raises :class:`SingularMatrixError`."""
    n, m = a.shape
    if n != m:
        raise ValueError("invert needs a square matrix")
    work = np.concatenate([np.array(a, dtype=object), identity(n)], axis=1)
    for col in range(n):
        pivot = next((r for r in range(col, n) if work[r, col] != 0), None)
        if pivot is None:
            raise SingularMatrixError(f"singular matrix (no pivot in column {col})")
        if pivot != col:
            work[[col, pivot]] = work[[pivot, col]]
        work[col] = work[col] / work[col, col]
        for r in range(n):
            if r != col and work[r, col] != 0:
                work[r] = work[r] - work[r, col] * work[col]
    return work[:, n:]


def is_zero(a: np.ndarray) -> bool:
    return not any(x != 0 for x in np.asarray(a).flat)


def equal(a: np.ndarray, b: np.ndarray) -> bool:
    a = np.asarray(a)
    b = np.asarray(b)
    return a.shape == b.shape and all(x == y for x, y in zip(a.flat, b.flat))


def first_mismatch(a: np.ndarray, b: np.ndarray):
    """Index and values of the first differing entry, or None."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        return ("shape", a.shape, b.shape)
    for idx in np.ndindex(a.shape):
        if a[idx] != b[idx]:
            return (tuple(int(i) for i in idx), a[idx], b[idx])
    return None


def sparse_rows(a: np.ndarray) -> list[dict]:
    """Row-wise dict of nonzero entries; cheap products for very sparse operators."""
    return [{j: x for j, x in enumerate(row) if x != 0} for row in a]


def sparse_matmul(a: list[dict], b: list[dict]) -> list[dict]:
    out = []
    for row in a:
        acc: dict = {}
        for k, x in row.items():
            for j, y in b[k].items():
                acc[j] = acc.get(j, 0) + x * y
        out.append({j: v for j, v in acc.items() if v != 0})
    return out


def from_sparse(rows: list[dict]) -> np.ndarray:
    out = zeros(len(rows))
    for i, row in enumerate(rows):
        for j, x in row.items():
            out[i, j] = x
    return out


def qpow(q: Fraction, k: int) -> Fraction:
    return q**k


# Block grids: an R x C arrangement of d x d blocks stored as a 4-d array
# with axes (block_row, block_col, inner_row, inner_col).


def flatten_blocks(grid: np.ndarray) -> np.ndarray:
    r, c, d, e = grid.shape
    return grid.transpose(0, 2, 1, 3).reshape(r * d, c * e)


def unflatten_blocks(flat: np.ndarray, rows: int, cols: int) -> np.ndarray:
    n, m = flat.shape
    if n % rows or m % cols:
        raise ValueError("block counts do not divide the matrix shape")
    d, e = n // rows, m // cols
    return flat.reshape(rows, d, cols, e).transpose(0, 2, 1, 3)


def block_grid(blocks: Sequence[Sequence[np.ndarray]]) -> np.ndarray:
    rows = len(blocks)
    cols = len(blocks[0])
    d, e = blocks[0][0].shape
    out = np.empty((rows, cols, d, e), dtype=object)
    for i in range(rows):
        for j in range(cols):
            if blocks[i][j].shape != (d, e):
                raise ValueError("all blocks of a grid must share one shape")
            out[i, j] = blocks[i][j]
    return out


def freeze(a: np.ndarray) -> np.ndarray:
    a.flags.writeable = False
    return a
