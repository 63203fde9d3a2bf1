"""Truncated power series with exact matrix coefficients.

Used to expand Gauss coordinates of L^+(u) around u = infinity and of
L^-(u) around u = 0, which yields the exact current modes.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .exact import SingularMatrixError, invert, zeros


class MatSeries:
    """sum_{k=0}^{K} c[k] x^k, all coefficients of one shape."""

    __slots__ = ("c",)

    def __init__(self, coeffs: Sequence[np.ndarray]):
        self.c = list(coeffs)

    @classmethod
    def constant_padded(cls, coeffs: Sequence[np.ndarray], order: int) -> "MatSeries":
        shape = coeffs[0].shape
        out = [np.array(c, dtype=object) for c in coeffs[: order + 1]]
        out += [zeros(*shape) for _ in range(order + 1 - len(out))]
        return cls(out)

    @property
    def order(self) -> int:
        return len(self.c) - 1

    @property
    def shape(self):
        return self.c[0].shape

    def __add__(self, other: "MatSeries") -> "MatSeries":
        return MatSeries([a + b for a, b in zip(self.c, other.c)])

    def __sub__(self, other: "MatSeries") -> "MatSeries":
        return MatSeries([a - b for a, b in zip(self.c, other.c)])

    def __neg__(self) -> "MatSeries":
        return MatSeries([-a for a in self.c])

    def __rmul__(self, s) -> "MatSeries":
        return MatSeries([s * a for a in self.c])

    def __matmul__(self, other: "MatSeries") -> "MatSeries":
        n = min(len(self.c), len(other.c))
        out = []
        for k in range(n):
            acc = self.c[0] @ other.c[k]
            for i in range(1, k + 1):
                acc = acc + self.c[i] @ other.c[k - i]
            out.append(acc)
        return MatSeries(out)

    def inverse(self) -> "MatSeries":
        try:
            b0 = invert(self.c[0])
        except SingularMatrixError as exc:
            raise SingularMatrixError("constant term of a series is singular") from exc
        out = [b0]
        for k in range(1, len(self.c)):
            acc = self.c[1] @ out[k - 1]
            for i in range(2, k + 1):
                acc = acc + self.c[i] @ out[k - i]
            out.append(-(b0 @ acc))
        return MatSeries(out)

    def sub(self, rows: slice, cols: slice) -> "MatSeries":
        return MatSeries([a[rows, cols] for a in self.c])

    @staticmethod
    def block(grid: Sequence[Sequence["MatSeries"]]) -> "MatSeries":
        order = grid[0][0].order
        return MatSeries([np.block([[g.c[k] for g in row] for row in grid]) for k in range(order + 1)])
