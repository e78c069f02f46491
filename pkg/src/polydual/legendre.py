"""Discrete Legendre-Fenchel transforms of sampled functions.

``lf_transform_brute`` is the O(MN) reference.  ``lf_transform_fast`` walks
the lower convex hull of the samples with a monotone pointer, and handles a
2-D grid as two 1-D passes.  Both evaluate ``s*x - g`` with the same float
operations at the maximizing sample, so on grids whose coordinates and
values are dyadic rationals the two agree bit for bit.
"""
from __future__ import annotations

import numpy as np

from .errors import InputError, NonConvexSampleError
from .grid import GridSpec, SampledFunction

# relative slack allowed when testing sampled second differences for convexity
_CONVEXITY_RTOL = 1e-12
_CHUNK = 1 << 22


def _brute_1d(x: np.ndarray, g: np.ndarray, s: np.ndarray) -> np.ndarray:
    finite = np.isfinite(g)
    x, g = x[finite], g[finite]
    out = np.empty(len(s), dtype=np.float64)
    step = max(1, _CHUNK // max(1, len(x)))
    for lo in range(0, len(s), step):
        block = s[lo:lo + step, None] * x[None, :] - g[None, :]
        out[lo:lo + step] = block[np.arange(block.shape[0]), np.argmax(block, axis=1)]
    return out


def lf_transform_brute(g: SampledFunction, dual_grid: GridSpec) -> SampledFunction:
    """``g*(s) = max_i s.x_i - g(x_i)`` at every dual grid point."""
    _check_grids(g, dual_grid)
    if g.grid.dim == 1:
        vals = _brute_1d(g.grid.axis_float(0), g.values, dual_grid.axis_float(0))
        return SampledFunction(dual_grid, vals)
    x1, x2 = (g.grid.axis_float(i) for i in range(2))
    s1, s2 = (dual_grid.axis_float(i) for i in range(2))
    X1, X2 = np.meshgrid(x1, x2, indexing="ij")
    finite = np.isfinite(g.values)
    px1, px2, pg = X1[finite], X2[finite], g.values[finite]
    out = np.empty(dual_grid.shape, dtype=np.float64)
    for i, a in enumerate(s1):
        block = (a * px1)[None, :] + (s2[:, None] * px2[None, :] - pg[None, :])
        out[i, :] = block[np.arange(len(s2)), np.argmax(block, axis=1)]
    return SampledFunction(dual_grid, out)


def _lower_hull(x: np.ndarray, g: np.ndarray) -> np.ndarray:
    """Indices of the lower convex hull of ``(x_i, g_i)`` for increasing ``x``."""
    hull: list[int] = []
    for i in range(len(x)):
        while len(hull) >= 2:
            a, b = hull[-2], hull[-1]
            # drop b if it lies on or above the chord a -> i
            if (g[b] - g[a]) * (x[i] - x[a]) >= (g[i] - g[a]) * (x[b] - x[a]):
                hull.pop()
            else:
                break
        hull.append(i)
    return np.array(hull, dtype=np.intp)


def _fast_1d(x: np.ndarray, g: np.ndarray, s: np.ndarray) -> np.ndarray:
    """Transform of finite samples ``g`` at ``x``, for dual points ``s`` (any order)."""
    hull = _lower_hull(x, g)
    hx, hg = x[hull], g[hull]
    order = np.argsort(s, kind="stable")
    out = np.empty(len(s), dtype=np.float64)
    k = 0
    last = len(hull) - 1
    for idx in order:
        a = s[idx]
        while k < last and a * hx[k + 1] - hg[k + 1] >= a * hx[k] - hg[k]:
            k += 1
        out[idx] = a * hx[k] - hg[k]
    return out


def _check_convex_1d(g: np.ndarray):
    finite = np.flatnonzero(np.isfinite(g))
    if len(finite) == 0:
        return
    if finite[-1] - finite[0] + 1 != len(finite):
        raise NonConvexSampleError("finite samples do not form a contiguous interval")
    v = g[finite[0]:finite[-1] + 1]
    if len(v) < 3:
        return
    second = v[2:] - 2 * v[1:-1] + v[:-2]
    scale = np.maximum(np.abs(v[2:]), np.maximum(np.abs(v[1:-1]), np.abs(v[:-2]))) + 1.0
    if (second < -_CONVEXITY_RTOL * scale).any():
        raise NonConvexSampleError("sampled values are not convex along an axis")


def lf_transform_fast(g: SampledFunction, dual_grid: GridSpec) -> SampledFunction:
    """Same values as :func:`lf_transform_brute` in linear time per line."""
    _check_grids(g, dual_grid)
    if g.grid.dim == 1:
        _check_convex_1d(g.values)
        x = g.grid.axis_float(0)
        finite = np.isfinite(g.values)
        vals = _fast_1d(x[finite], g.values[finite], dual_grid.axis_float(0))
        return SampledFunction(dual_grid, vals)
    for i in range(g.values.shape[0]):
        _check_convex_1d(g.values[i, :])
    for j in range(g.values.shape[1]):
        _check_convex_1d(g.values[:, j])
    x1, x2 = (g.grid.axis_float(i) for i in range(2))
    s1, s2 = (dual_grid.axis_float(i) for i in range(2))
    # inner pass over x2 for each row x1: h(x1, s2) = max_x2 s2*x2 - g(x1, x2)
    rows = [i for i in range(len(x1)) if np.isfinite(g.values[i]).any()]
    inner = np.empty((len(rows), len(s2)), dtype=np.float64)
    for r, i in enumerate(rows):
        finite = np.isfinite(g.values[i])
        inner[r] = _fast_1d(x2[finite], g.values[i, finite], s2)
    # outer pass over x1: max_x1 s1*x1 + h(x1, s2) is a transform of -h, taken over its hull
    xr = x1[rows]
    out = np.empty(dual_grid.shape, dtype=np.float64)
    for j in range(len(s2)):
        neg = -inner[:, j]
        hull = _lower_hull(xr, neg)
        hx, hh = xr[hull], inner[hull, j]
        order = np.argsort(s1, kind="stable")
        k, last = 0, len(hull) - 1
        for idx in order:
            a = s1[idx]
            while k < last and a * hx[k + 1] + hh[k + 1] >= a * hx[k] + hh[k]:
                k += 1
            out[idx, j] = a * hx[k] + hh[k]
    return SampledFunction(dual_grid, out)


def _check_grids(g: SampledFunction, dual_grid: GridSpec):
    if g.grid.dim != dual_grid.dim:
        raise InputError("primal and dual grids have different dimensions")
    if g.grid.dim not in (1, 2):
        raise InputError("grid transforms support dimensions 1 and 2")
