"""Seeded random instances for the verification suites.

Every generator takes a :class:`random.Random` and returns exact rational
data in small dimensions.  Instances are built around a chosen point so the
qualification a suite needs holds by construction; suites still check it.
"""
from __future__ import annotations

import random
from fractions import Fraction

import numpy as np

from .coderivative import SetValuedMap
from .functions import Affine, ConvexExpr, Indicator, Max, MaxAffine, PreComposeLinear, ScaleNonneg, Sum
from .geometry import Cone
from .grid import GridSpec, SampledFunction
from .lagrange import ConeProgram
from .linalg import LinearMap
from .polyhedron import Polyhedron
from .rational import dot

_HALVES = (1, 2)


def rat(rng: random.Random, lo: int = -3, hi: int = 3, dens=_HALVES) -> Fraction:
    return Fraction(rng.randint(lo, hi)) / rng.choice(dens)


def rvec(rng: random.Random, n: int, lo: int = -3, hi: int = 3, dens=_HALVES) -> tuple:
    return tuple(rat(rng, lo, hi, dens) for _ in range(n))


def nonzero_vec(rng: random.Random, n: int, lo: int = -3, hi: int = 3) -> tuple:
    while True:
        v = rvec(rng, n, lo, hi, (1,))
        if any(v):
            return v


def matrix(rng: random.Random, rows: int, cols: int, lo: int = -2, hi: int = 2) -> LinearMap:
    return LinearMap.from_rows([[Fraction(rng.randint(lo, hi)) for _ in range(cols)] for _ in range(rows)])


# -- sets ---------------------------------------------------------------------

def box_around(rng: random.Random, center, lo: int = 1, hi: int = 3) -> Polyhedron:
    """Axis box with ``center`` strictly inside."""
    return Polyhedron.box([c - Fraction(rng.randint(lo, hi), rng.choice(_HALVES)) for c in center],
                          [c + Fraction(rng.randint(lo, hi), rng.choice(_HALVES)) for c in center])


def polytope_around(rng: random.Random, center, extra: int = 2) -> Polyhedron:
    """A box around ``center`` cut by ``extra`` random halfspaces that keep it interior."""
    P = box_around(rng, center)
    n = len(center)
    rows = []
    for _ in range(extra):
        a = nonzero_vec(rng, n)
        rows.append((a, dot(a, center) + Fraction(rng.randint(1, 4), 2)))
    return P.intersect(Polyhedron(n, tuple(rows)))


def through_point(rng: random.Random, point, rows: int, active: int, bounded: bool = False) -> Polyhedron:
    """Full-dimensional polyhedron containing ``point`` with ``active`` rows tight there.

    Active normals all have a negative product with a common direction, so the
    set has interior near ``point``.
    """
    n = len(point)
    inward = nonzero_vec(rng, n)
    ineqs = []
    while len(ineqs) < rows:
        a = nonzero_vec(rng, n)
        t = dot(a, inward)
        if t == 0:
            continue
        if t > 0:
            a = tuple(-x for x in a)
        slack = Fraction(0) if len(ineqs) < active else Fraction(rng.randint(1, 4), 2)
        ineqs.append((a, dot(a, point) + slack))
    P = Polyhedron(n, tuple(ineqs))
    if bounded:
        P = P.intersect(box_around(rng, point, 2, 4))
    return P


# -- functions -----------------------------------------------------------------

def max_affine(rng: random.Random, n: int, pieces: int, lo: int = -3, hi: int = 3) -> MaxAffine:
    return MaxAffine(tuple((rvec(rng, n, lo, hi), rat(rng, lo, hi)) for _ in range(pieces)))


def max_affine_active(rng: random.Random, x, value, pieces: int, active: int) -> MaxAffine:
    """Max-affine function equal to ``value`` at ``x`` with ``active`` pieces attaining it."""
    out = []
    for k in range(pieces):
        a = rvec(rng, len(x))
        drop = Fraction(0) if k < active else Fraction(rng.randint(1, 4), 2)
        out.append((a, value - drop - dot(a, x)))
    return MaxAffine(tuple(out))


def pl_function(rng: random.Random, n: int, center, bounded: bool = True, flat_domain: bool = False) -> ConvexExpr:
    """A PL function whose domain contains ``center`` (in its core unless ``flat_domain``)."""
    f = max_affine(rng, n, rng.randint(1, 3))
    if flat_domain:
        a = nonzero_vec(rng, n)
        dom = Polyhedron(n, (), ((a, dot(a, center)),))
        if bounded:
            dom = dom.intersect(box_around(rng, center))
    elif bounded:
        dom = polytope_around(rng, center, rng.randint(0, 2))
    else:
        dom = None
    if dom is not None:
        f = Sum(f, Indicator(dom))
    shape = rng.random()
    if shape < 0.15:
        f = ScaleNonneg(Fraction(rng.randint(1, 3)), f)
    elif shape < 0.25 and n > 1:
        f = Max((f, Sum(max_affine(rng, n, 1), Indicator(box_around(rng, center)))))
    return f


def composite_pair(rng: random.Random, n: int):
    """``(phi1, phi2, center)`` with ``center in core(dom phi1) ∩ dom phi2``."""
    c = rvec(rng, n)
    phi1 = pl_function(rng, n, c)
    phi2 = pl_function(rng, n, c, bounded=rng.random() < 0.8, flat_domain=rng.random() < 0.25)
    return phi1, phi2, c


def chain_instance(rng: random.Random, n: int, m: int):
    """``(phi, A)`` with ``A X ∩ core(dom phi) ≠ ∅`` and bounded ``dom phi``."""
    A = matrix(rng, m, n)
    x0 = rvec(rng, n)
    phi = pl_function(rng, m, A.apply(x0))
    return phi, A


def fenchel_qualified(rng: random.Random, n: int, m: int):
    A = matrix(rng, m, n)
    x0 = rvec(rng, n)
    phi = pl_function(rng, n, x0, bounded=rng.random() < 0.85)
    psi = pl_function(rng, m, A.apply(x0), bounded=rng.random() < 0.85)
    return phi, psi, A


def fenchel_any(rng: random.Random, n: int, m: int):
    """Unrestricted: domains may miss each other, be flat, or be unbounded."""
    A = matrix(rng, m, n)
    phi = pl_function(rng, n, rvec(rng, n), bounded=rng.random() < 0.6, flat_domain=rng.random() < 0.3)
    psi = pl_function(rng, m, rvec(rng, m), bounded=rng.random() < 0.6, flat_domain=rng.random() < 0.3)
    if rng.random() < 0.2:
        phi = Affine(rvec(rng, n), rat(rng))
    return phi, psi, A


def max_rule_instance(rng: random.Random, n: int, qualified: bool = True):
    """``(functions, x)``: several functions active at ``x``; ``x`` on a domain boundary if not qualified."""
    x = rvec(rng, n)
    k = rng.randint(2, 3)
    funcs = []
    for i in range(k):
        value = Fraction(0) if i < 2 or rng.random() < 0.5 else Fraction(-1)
        f = max_affine_active(rng, x, value, rng.randint(1, 3), rng.randint(1, 2))
        if rng.random() < 0.6:
            f = Sum(f, Indicator(polytope_around(rng, x, rng.randint(0, 2))))
        funcs.append(f)
    if not qualified:
        j = rng.randrange(k)
        funcs[j] = Sum(funcs[j], Indicator(through_point(rng, x, rng.randint(1, 3), rng.randint(1, 2))))
    return funcs, x


# -- cone programs ----------------------------------------------------------------

def cone_program(rng: random.Random, n: int, m: int, slater: bool = True, shift=None) -> ConeProgram:
    """Componentwise program with a bounded box region.

    With ``slater`` every constraint is strictly negative at an interior point.
    ``shift`` adds a constant to the objective.
    """
    xh = rvec(rng, n)
    region = box_around(rng, xh, 1, 3)
    phi = max_affine(rng, n, rng.randint(1, 3))
    if shift is not None:
        phi = MaxAffine(tuple((a, b + shift) for a, b in phi.pieces))
    psi = []
    for _ in range(m):
        if slater:
            level = -Fraction(rng.randint(1, 4), 4)
        else:
            level = Fraction(rng.randint(-1, 1), 2)
        if rng.random() < 0.3:
            a = rvec(rng, n)
            psi.append(Affine(a, level - dot(a, xh)))
        else:
            psi.append(max_affine_active(rng, xh, level, rng.randint(1, 3), 1))
    if not slater and rng.random() < 0.3 and m >= 2:
        a = nonzero_vec(rng, n)
        psi[0] = Affine(a, -dot(a, xh))
        psi[1] = Affine(tuple(-v for v in a), dot(a, xh))
    return ConeProgram(phi, tuple(psi), region)


def cone_program_affine(rng: random.Random, n: int, m: int) -> ConeProgram:
    """Affine constraints with a random polyhedral ordering cone."""
    xh = rvec(rng, n)
    gens = [nonzero_vec(rng, m, 0, 2) for _ in range(rng.randint(1, m + 1))]
    cone = Cone.from_generators(m, gens)
    psi = []
    for _ in range(m):
        a = rvec(rng, n)
        psi.append(Affine(a, rat(rng) - dot(a, xh)))
    return ConeProgram(max_affine(rng, n, rng.randint(1, 3)), tuple(psi), box_around(rng, xh), cone)


# -- set-valued maps ----------------------------------------------------------------

def graph_map(rng: random.Random, a, b, rows: int | None = None, active: int | None = None) -> SetValuedMap:
    n, m = len(a), len(b)
    rows = rows or rng.randint(1, 3)
    active = rng.randint(1, rows) if active is None else active
    return SetValuedMap(n, m, through_point(rng, tuple(a) + tuple(b), rows, active))


def constant_map(rng: random.Random, a, b) -> SetValuedMap:
    """``G(x) = {b}`` on a box around ``a``: its range has empty core."""
    n, m = len(a), len(b)
    box = box_around(rng, a).embed(n + m, range(n))
    eqs = tuple((tuple(Fraction(int(i == n + j)) for i in range(n + m)), b[j]) for j in range(m))
    return SetValuedMap(n, m, box.intersect(Polyhedron(n + m, (), eqs)))


# -- sampled functions --------------------------------------------------------------

def dyadic_grid(lo: Fraction, hi: Fraction, spacing: Fraction, dim: int = 1) -> GridSpec:
    return GridSpec.uniform(lo, hi, spacing, dim)


def convex_samples(rng: np.random.Generator, grid: GridSpec, finite_fraction: float = 0.8) -> SampledFunction:
    """Dyadic convex samples: integer-scaled second differences, optional ``+inf`` tails.

    Values stay exactly representable, so both transforms compute identical floats.
    """
    h = float(grid.spacing[0])
    if grid.dim == 1:
        vals = _convex_line(rng, grid.shape[0], h, finite_fraction)
    else:
        a = _convex_line(rng, grid.shape[0], h, finite_fraction)
        b = _convex_line(rng, grid.shape[1], h, finite_fraction)
        vals = a[:, None] + b[None, :]
    return SampledFunction(grid, vals)


def _convex_line(rng: np.random.Generator, count: int, h: float, finite_fraction: float) -> np.ndarray:
    second = rng.integers(0, 3, size=count).astype(np.float64) * h * h
    slope0 = float(rng.integers(-8, 9))
    slopes = slope0 + np.cumsum(second) / h
    vals = np.concatenate([[0.0], np.cumsum(slopes[:-1] * h)])
    if rng.random() > finite_fraction:
        lo = int(rng.integers(0, count // 4 + 1))
        hi = int(rng.integers(3 * count // 4, count))
        vals[:lo] = np.inf
        vals[hi + 1:] = np.inf
    return vals


def breakpoint_pl_1d(rng: random.Random, lo: Fraction, hi: Fraction, spacing: Fraction) -> ConvexExpr:
    """Convex PL function on ``[l, u] ⊆ [lo, hi]`` whose breakpoints and endpoints lie on the grid."""
    steps = int((hi - lo) / spacing)
    knots = sorted(rng.sample(range(steps + 1), rng.randint(2, 5)))
    slopes = sorted(Fraction(rng.randint(-16, 16), 4) for _ in range(len(knots) - 1))
    x0 = lo + knots[0] * spacing
    value = Fraction(rng.randint(-8, 8), 4)
    pieces = []
    for k, s in enumerate(slopes):
        start = lo + knots[k] * spacing
        pieces.append(((s,), value - s * start))
        value += s * (lo + knots[k + 1] * spacing - start)
    dom = Polyhedron.box([x0], [lo + knots[-1] * spacing])
    return Sum(MaxAffine(tuple(pieces)), Indicator(dom))


def separable_pl_2d(rng: random.Random, lo: Fraction, hi: Fraction, spacing: Fraction) -> ConvexExpr:
    f1 = breakpoint_pl_1d(rng, lo, hi, spacing)
    f2 = breakpoint_pl_1d(rng, lo, hi, spacing)
    e1 = LinearMap.from_rows([[1, 0]])
    e2 = LinearMap.from_rows([[0, 1]])
    return Sum(PreComposeLinear(f1, e1), PreComposeLinear(f2, e2))


def random_cone(rng: random.Random, m: int) -> Cone:
    return Cone.from_generators(m, [nonzero_vec(rng, m, -2, 2) for _ in range(rng.randint(1, m + 2))])

