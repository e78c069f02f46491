"""Regular rational grids and float samples of functions on them."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import InputError
from .rational import INF, rational


@dataclass(frozen=True)
class GridSpec:
    """Points ``lo + k * spacing`` (``k = 0..count-1``) per axis, inside the box ``[lo, hi]``."""

    lo: tuple
    hi: tuple
    spacing: tuple

    def __post_init__(self):
        lo, hi, h = (tuple(rational(v) for v in t) for t in (self.lo, self.hi, self.spacing))
        if not (len(lo) == len(hi) == len(h)) or not lo:
            raise InputError("grid bounds and spacing must have the same positive length")
        for a, b, s in zip(lo, hi, h):
            if s <= 0:
                raise InputError(f"grid spacing must be positive, got {s}")
            if b < a:
                raise InputError(f"empty grid axis [{a}, {b}]")
            if ((b - a) / s).denominator != 1:
                raise InputError(f"axis [{a}, {b}] is not a whole number of steps of {s}")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)
        object.__setattr__(self, "spacing", h)

    @classmethod
    def uniform(cls, lo, hi, spacing, dim: int = 1) -> "GridSpec":
        return cls((lo,) * dim, (hi,) * dim, (spacing,) * dim)

    @property
    def dim(self) -> int:
        return len(self.lo)

    @property
    def shape(self) -> tuple:
        return tuple(int((b - a) / s) + 1 for a, b, s in zip(self.lo, self.hi, self.spacing))

    def axis(self, i: int) -> list:
        """Exact coordinates along axis ``i``."""
        return [self.lo[i] + k * self.spacing[i] for k in range(self.shape[i])]

    def axis_float(self, i: int) -> np.ndarray:
        return np.array([float(v) for v in self.axis(i)], dtype=np.float64)

    def points(self) -> list:
        """All grid points in C order, as exact tuples."""
        axes = [self.axis(i) for i in range(self.dim)]
        out = [()]
        for ax in axes:
            out = [p + (v,) for p in out for v in ax]
        return out


@dataclass(frozen=True, eq=False)
class SampledFunction:
    """Float64 values of a function on a grid; ``inf`` marks points outside the domain."""

    grid: GridSpec
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        if values.shape != self.grid.shape:
            raise InputError(f"values of shape {values.shape} on a grid of shape {self.grid.shape}")
        if not np.isfinite(values).any():
            raise InputError("sampled function has no finite value")
        if np.isnan(values).any() or (values == -np.inf).any():
            raise InputError("sampled values must be finite or +inf")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def box(self) -> tuple:
        return tuple(zip(self.grid.lo, self.grid.hi))

    @property
    def spacing(self) -> tuple:
        return self.grid.spacing


def sample(f, grid: GridSpec) -> SampledFunction:
    """Exact values of ``f`` at the grid points, rounded to float64."""
    if grid.dim != f.dim:
        raise InputError(f"grid of dimension {grid.dim} for a function on R^{f.dim}")
    vals = [f.eval(p) for p in grid.points()]
    arr = np.array([INF if v == INF else float(v) for v in vals], dtype=np.float64).reshape(grid.shape)
    return SampledFunction(grid, arr)


def sample_values(values: Sequence, grid: GridSpec) -> SampledFunction:
    return SampledFunction(grid, np.asarray(values, dtype=np.float64).reshape(grid.shape))


def exact_points(grid: GridSpec) -> list[tuple[Fraction, ...]]:
    return grid.points()
