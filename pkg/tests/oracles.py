"""Brute-force oracles that share no code with the library kernels.

Everything here works by enumeration over small exact systems: vertices by
solving every square subsystem, LP optima as maxima over vertices, and 1-D
piecewise-linear minima and conjugates over breakpoint candidates.
"""
from __future__ import annotations

from fractions import Fraction
from itertools import combinations


def solve_square(M, r):
    """Solve ``M x = r`` exactly; ``None`` when ``M`` is singular."""
    n = len(M)
    aug = [[Fraction(v) for v in row] + [Fraction(rv)] for row, rv in zip(M, r)]
    for col in range(n):
        piv = next((i for i in range(col, n) if aug[i][col] != 0), None)
        if piv is None:
            return None
        aug[col], aug[piv] = aug[piv], aug[col]
        for i in range(n):
            if i != col and aug[i][col] != 0:
                f = aug[i][col] / aug[col][col]
                aug[i] = [a - f * b for a, b in zip(aug[i], aug[col])]
    return tuple(aug[i][n] / aug[i][i] for i in range(n))


def satisfies(rows, x) -> bool:
    return all(sum(a * v for a, v in zip(row, x)) <= b for row, b in rows)


def vertices(n: int, rows):
    """Vertices of the bounded polytope ``{x : a.x <= b}`` by square subsystems."""
    found = []
    for idx in combinations(range(len(rows)), n):
        x = solve_square([rows[i][0] for i in idx], [rows[i][1] for i in idx])
        if x is not None and satisfies(rows, x) and x not in found:
            found.append(x)
    return found


def lp_max(c, n: int, rows):
    """``max c.x`` over a bounded polytope (``None`` when empty)."""
    vs = vertices(n, rows)
    if not vs:
        return None
    return max(sum(ci * xi for ci, xi in zip(c, x)) for x in vs)


def as_rows(P):
    """A polyhedron's rows as inequalities only (equalities become two rows)."""
    rows = [(tuple(a), o) for a, o in P.ineqs]
    for a, o in P.eqs:
        rows += [(tuple(a), o), (tuple(-v for v in a), -o)]
    return rows


def _max_affine(pieces, x):
    return max(a * x + b for a, b in pieces)


def breakpoints(pieces, lo, hi):
    """Candidate extremizers of a 1-D max-affine function on ``[lo, hi]``."""
    pts = {lo, hi}
    for (a1, b1), (a2, b2) in combinations(pieces, 2):
        if a1 != a2:
            x = (b2 - b1) / (a1 - a2)
            if lo <= x <= hi:
                pts.add(x)
    return sorted(pts)


def min_1d(pieces, lo, hi):
    """``min`` of ``max_i (a_i x + b_i)`` over ``[lo, hi]``."""
    return min(_max_affine(pieces, x) for x in breakpoints(pieces, lo, hi))


def conjugate_1d(pieces, lo, hi, s):
    """``sup_{x in [lo, hi]} s x - max_i (a_i x + b_i)``."""
    return max(s * x - _max_affine(pieces, x) for x in breakpoints(pieces, lo, hi))
