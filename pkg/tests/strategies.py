"""Hypothesis strategies for small exact-rational instances."""
from __future__ import annotations

from fractions import Fraction

from hypothesis import strategies as st

from polydual import Indicator, MaxAffine, Polyhedron

HALVES = st.builds(Fraction, st.integers(-6, 6), st.sampled_from([1, 2]))
SMALL = st.builds(Fraction, st.integers(-4, 4))


def vectors(n: int, elements=HALVES):
    return st.lists(elements, min_size=n, max_size=n).map(tuple)


def nonzero_vectors(n: int):
    return vectors(n, SMALL).filter(any)


@st.composite
def polytopes(draw, n: int, extra: int = 3):
    """A bounded polytope: a box around a center plus rows strictly satisfied at the center."""
    center = draw(vectors(n))
    half = draw(st.lists(st.integers(1, 3), min_size=n, max_size=n))
    P = Polyhedron.box([c - h for c, h in zip(center, half)], [c + h for c, h in zip(center, half)])
    rows = []
    for _ in range(draw(st.integers(0, extra))):
        a = draw(nonzero_vectors(n))
        slack = draw(st.builds(Fraction, st.integers(0, 4), st.sampled_from([1, 2])))
        rows.append((a, sum(x * y for x, y in zip(a, center)) + slack))
    return P.intersect(Polyhedron(n, tuple(rows))), center


@st.composite
def max_affines(draw, n: int, pieces: int = 3):
    k = draw(st.integers(1, pieces))
    return MaxAffine(tuple((draw(vectors(n, SMALL)), draw(HALVES)) for _ in range(k)))


@st.composite
def pl_functions(draw, n: int):
    """A max-affine function, optionally restricted to a polytope."""
    f = draw(max_affines(n))
    if draw(st.booleans()):
        P, _ = draw(polytopes(n))
        from polydual import Sum
        return Sum(f, Indicator(P))
    return f
