"""Exact-rational two-phase simplex with Bland's rule.

Solves ``min/max c.x  s.t.  A x <= b, E x = d`` over free variables ``x``.
Every result carries a certificate:

* optimal    -- optimizer ``x`` plus dual multipliers ``(y, z)`` with ``y >= 0``;
                for ``max``: ``A^T y + E^T z = c`` and ``b.y + d.z = value``;
                for ``min``: ``A^T y + E^T z = -c`` and ``-(b.y + d.z) = value``.
* unbounded  -- a feasible point and a ray ``r`` with ``A r <= 0``, ``E r = 0``
                and ``c.r`` improving.
* infeasible -- Farkas multipliers ``(y, z)``, ``y >= 0``, with
                ``A^T y + E^T z = 0`` and ``b.y + d.z < 0``.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from gmpy2 import mpq

from .rational import from_mpq, to_mpq

OPTIMAL = "optimal"
UNBOUNDED = "unbounded"
INFEASIBLE = "infeasible"

_ZERO = mpq(0)
_ONE = mpq(1)


@dataclass(frozen=True)
class LpResult:
    status: str
    value: Fraction | None = None
    witness: tuple | None = None
    dual: tuple | None = None      # (y_ineq, z_eq) when optimal; Farkas pair when infeasible
    point: tuple | None = None     # a feasible point (also set when unbounded)

    @property
    def optimal(self) -> bool:
        return self.status == OPTIMAL


class _Tableau:
    """Dense tableau ``[B^-1 M | B^-1 r]`` with an explicit basis."""

    def __init__(self, rows, basis, ncols):
        self.rows = rows
        self.basis = basis
        self.ncols = ncols

    def pivot(self, r, j, cost):
        rows = self.rows
        prow = rows[r]
        piv = prow[j]
        if piv != _ONE:
            inv = _ONE / piv
            prow = [v * inv if v else v for v in prow]
            rows[r] = prow
        nz = [k for k, v in enumerate(prow) if v]
        for i, row in enumerate(rows):
            if i == r:
                continue
            f = row[j]
            if f:
                for k in nz:
                    row[k] -= f * prow[k]
        f = cost[j]
        if f:
            for k in nz:
                cost[k] -= f * prow[k]
        self.basis[r] = j

    def reduced_costs(self, c):
        cost = list(c) + [_ZERO]
        for r, row in enumerate(self.rows):
            cb = c[self.basis[r]]
            if cb:
                for k, v in enumerate(row):
                    if v:
                        cost[k] -= cb * v
        return cost

    def run(self, cost, allowed):
        """Bland's rule iterations. Returns ``None`` if optimal, else the unbounded column."""
        rows = self.rows
        while True:
            enter = -1
            for j in allowed:
                if cost[j] < 0:
                    enter = j
                    break
            if enter < 0:
                return None
            best_r = -1
            best_ratio = None
            for r, row in enumerate(rows):
                a = row[enter]
                if a > 0:
                    ratio = row[-1] / a
                    if (best_r < 0 or ratio < best_ratio
                            or (ratio == best_ratio and self.basis[r] < self.basis[best_r])):
                        best_r, best_ratio = r, ratio
            if best_r < 0:
                return enter
            self.pivot(best_r, enter, cost)


def simplex_min(c, A, b, E, d):
    """Minimize ``c.x`` over ``{A x <= b, E x = d}`` (all arguments lists of mpq).

    Returns ``(status, x, value, y, z, ray)``; see module docstring for the
    sign conventions of ``y, z`` (the ``min`` case).
    """
    n = len(c)
    m1, m2 = len(A), len(E)
    m = m1 + m2
    # columns: x+ (n) | x- (n) | slack (m1) | artificial (k)
    sign = []
    raw = []
    for i in range(m1):
        row = list(A[i]) + [-v for v in A[i]] + [_ONE if k == i else _ZERO for k in range(m1)]
        raw.append((row, b[i]))
    for i in range(m2):
        row = list(E[i]) + [-v for v in E[i]] + [_ZERO] * m1
        raw.append((row, d[i]))
    art_rows = []
    for i, (row, rhs) in enumerate(raw):
        s = -1 if rhs < 0 else 1
        sign.append(s)
        if s < 0:
            raw[i] = ([-v for v in row], -rhs)
        if i >= m1 or s < 0:
            art_rows.append(i)
    k = len(art_rows)
    nstd = 2 * n + m1
    ncols = nstd + k
    rows = []
    basis = []
    init_col = []
    art_of_row = {r: nstd + t for t, r in enumerate(art_rows)}
    for i, (row, rhs) in enumerate(raw):
        full = row + [_ZERO] * k + [rhs]
        if i in art_of_row:
            full[art_of_row[i]] = _ONE
            basis.append(art_of_row[i])
            init_col.append(art_of_row[i])
        else:
            basis.append(2 * n + i)
            init_col.append(2 * n + i)
        rows.append(full)
    tab = _Tableau(rows, basis, ncols)

    if k:
        c1 = [_ZERO] * nstd + [_ONE] * k
        cost = tab.reduced_costs(c1)
        tab.run(cost, range(ncols))
        w = -cost[-1]
        if w > 0:
            y = [c1[init_col[r]] - cost[init_col[r]] for r in range(m)]
            y = [sign[r] * y[r] for r in range(m)]
            # Farkas: -y restricted to ineqs is >= 0, combination gives 0 <= -w.
            return INFEASIBLE, None, None, [-v for v in y[:m1]], [-v for v in y[m1:]], None
        for r in range(m):
            if tab.basis[r] >= nstd:
                row = tab.rows[r]
                for j in range(nstd):
                    if row[j]:
                        tab.pivot(r, j, cost)
                        break

    c2 = list(c) + [-v for v in c] + [_ZERO] * (m1 + k)
    cost = tab.reduced_costs(c2)
    enter = tab.run(cost, range(nstd))
    z = [_ZERO] * ncols
    for r in range(m):
        z[tab.basis[r]] = tab.rows[r][-1]
    x = [z[j] - z[n + j] for j in range(n)]
    if enter is not None:
        dz = [_ZERO] * ncols
        dz[enter] = _ONE
        for r in range(m):
            dz[tab.basis[r]] -= tab.rows[r][enter]
        ray = [dz[j] - dz[n + j] for j in range(n)]
        return UNBOUNDED, x, None, None, None, ray
    value = -cost[-1]
    y = [c2[init_col[r]] - cost[init_col[r]] for r in range(m)]
    y = [sign[r] * y[r] for r in range(m)]
    return OPTIMAL, x, value, [-v for v in y[:m1]], [-v for v in y[m1:]], None


def solve(c: Sequence, A: Sequence = (), b: Sequence = (), E: Sequence = (), d: Sequence = (),
          sense: str = "min") -> LpResult:
    """Solve an LP given as rational matrices; see :func:`solve_lp` for the Polyhedron form."""
    if sense not in ("min", "max"):
        raise ValueError(f"sense must be 'min' or 'max', not {sense!r}")
    cq = to_mpq(c)
    if sense == "max":
        cq = [-v for v in cq]
    Aq = [to_mpq(r) for r in A]
    Eq = [to_mpq(r) for r in E]
    status, x, value, y, z, ray = simplex_min(cq, Aq, to_mpq(b), Eq, to_mpq(d))
    if status == INFEASIBLE:
        cert = from_mpq(y) + from_mpq(z)
        return LpResult(INFEASIBLE, witness=cert, dual=(from_mpq(y), from_mpq(z)))
    if status == UNBOUNDED:
        return LpResult(UNBOUNDED, witness=from_mpq(ray), point=from_mpq(x))
    val = Fraction(int(value.numerator), int(value.denominator))
    if sense == "max":
        # max c.x = -min(-c).x; the min-form multipliers satisfy A^T y + E^T z = c
        val = -val
    return LpResult(OPTIMAL, value=val, witness=from_mpq(x), dual=(from_mpq(y), from_mpq(z)),
                    point=from_mpq(x))


def solve_mpq(c, A, b, E, d, sense="min"):
    """Low-level entry for callers already holding mpq rows (no conversion)."""
    if sense == "max":
        c = [-v for v in c]
    status, x, value, y, z, ray = simplex_min(c, A, b, E, d)
    if status == OPTIMAL and sense == "max":
        value = -value
    return status, x, value, y, z, ray
