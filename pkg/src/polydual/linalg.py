"""Rational matrices: the LinearMap type plus rank and null-space helpers."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import InputError
from .rational import dot, vector


@dataclass(frozen=True)
class LinearMap:
    """A rational ``rows x cols`` matrix, read as a map ``R^cols -> R^rows``."""

    rows: int
    cols: int
    entries: tuple

    def __post_init__(self):
        if self.rows < 1 or self.cols < 1:
            raise InputError(f"linear map needs positive dimensions, got {self.rows}x{self.cols}")
        entries = tuple(vector(r) for r in self.entries)
        if len(entries) != self.rows or any(len(r) != self.cols for r in entries):
            raise InputError(f"matrix entries do not have shape {self.rows}x{self.cols}")
        object.__setattr__(self, "entries", entries)

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence]) -> "LinearMap":
        rows = [list(r) for r in rows]
        if not rows or not rows[0]:
            raise InputError("empty matrix")
        return cls(len(rows), len(rows[0]), tuple(rows))

    @classmethod
    def identity(cls, n: int) -> "LinearMap":
        return cls(n, n, tuple(tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n)))

    @classmethod
    def zero(cls, rows: int, cols: int) -> "LinearMap":
        return cls(rows, cols, tuple((Fraction(0),) * cols for _ in range(rows)))

    def apply(self, x: Sequence) -> tuple:
        x = vector(x)
        if len(x) != self.cols:
            raise InputError(f"vector of length {len(x)} for a map with {self.cols} columns")
        return tuple(dot(r, x) for r in self.entries)

    __call__ = apply

    def adjoint(self) -> "LinearMap":
        return LinearMap(self.cols, self.rows, tuple(zip(*self.entries)))

    def then(self, other: "LinearMap") -> "LinearMap":
        """``other o self``."""
        if other.cols != self.rows:
            raise InputError("incompatible shapes for composition")
        cols = list(zip(*self.entries))
        return LinearMap(other.rows, self.cols, tuple(tuple(dot(r, c) for c in cols) for r in other.entries))

    def column(self, j: int) -> tuple:
        return tuple(r[j] for r in self.entries)


def echelon(matrix: Sequence[Sequence]) -> tuple[list, list]:
    """Reduced row echelon form; returns ``(nonzero rows, pivot columns)``."""
    rows = [list(vector(r)) for r in matrix]
    if not rows:
        return [], []
    ncol = len(rows[0])
    pivots = []
    r = 0
    for j in range(ncol):
        piv = next((i for i in range(r, len(rows)) if rows[i][j] != 0), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        p = rows[r][j]
        rows[r] = [v / p for v in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][j] != 0:
                f = rows[i][j]
                rows[i] = [u - f * v for u, v in zip(rows[i], rows[r])]
        pivots.append(j)
        r += 1
        if r == len(rows):
            break
    return rows[:r], pivots


def rank(vectors: Sequence[Sequence]) -> int:
    return len(echelon(vectors)[1])


def nullspace(matrix: Sequence[Sequence], ncols: int) -> list[tuple]:
    """Basis of ``{x : M x = 0}``."""
    rows, pivots = echelon(matrix) if matrix else ([], [])
    free = [j for j in range(ncols) if j not in pivots]
    basis = []
    for f in free:
        x = [Fraction(0)] * ncols
        x[f] = Fraction(1)
        for row, p in zip(rows, pivots):
            x[p] = -row[f]
        basis.append(tuple(x))
    return basis
