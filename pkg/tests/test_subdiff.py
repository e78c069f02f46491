import math
import random
from fractions import Fraction as F

import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from polydual import (Affine, Indicator, Max, MaxAffine, NotInDomainError, Polyhedron, QualificationError, Sum,
                      conjugate, max_rule, poly_equal, poly_subset, subdifferential, subdifferential_direct,
                      sum_rule, vrep)
from polydual import generators as gen
from polydual.functions import minimize, zero_function
from strategies import SMALL, pl_functions, vectors

ABS = MaxAffine((((1,), 0), ((-1,), 0)))
UNIT = Polyhedron.box([0], [1])


def interval(lo, hi):
    return Polyhedron.box([lo], [hi])


def test_subdifferential_examples():
    assert poly_equal(subdifferential(ABS, (0,)).set, interval(-1, 1))
    assert poly_equal(subdifferential(ABS, (3,)).set, Polyhedron.point((1,)))
    assert poly_equal(subdifferential(Indicator(UNIT), (1,)).set, interval(0, None))
    with pytest.raises(NotInDomainError):
        subdifferential(Indicator(UNIT), (2,))


def test_max_rule_examples():
    r = max_rule([Affine((1,), 0), Affine((-1,), 0)], (0,), strict=True)
    assert poly_equal(r.set, interval(-1, 1))
    r = max_rule([Affine((1,), 0), Affine((2,), -1)], (1,), strict=True)
    assert poly_equal(r.set, interval(1, 2))
    r = max_rule([Affine((1,), 0), Affine((1,), -5)], (0,), strict=True)
    assert poly_equal(r.set, Polyhedron.point((1,)))


def test_max_rule_unqualified():
    funcs = [Sum(Affine((1,), 0), Indicator(UNIT)), Affine((-1,), 0)]
    with pytest.raises(QualificationError):
        max_rule(funcs, (0,), strict=True)
    r = max_rule(funcs, (0,))
    assert not r.verified
    assert poly_subset(r.set, subdifferential_direct(Max(tuple(funcs)), (0,)).set)


def test_sum_rule_examples():
    r = sum_rule(ABS, Indicator(UNIT), (0,), strict=True)
    assert poly_equal(r.set, interval(None, 1))
    assert poly_equal(r.set, subdifferential_direct(Sum(ABS, Indicator(UNIT)), (0,)).set)
    assert poly_equal(sum_rule(ABS, zero_function(1), (0,)).set, interval(-1, 1))


def test_sum_rule_touching_intervals():
    # neither domain's core meets the other domain, yet both sides are the whole line
    a, b = Indicator(UNIT), Indicator(interval(1, 2))
    with pytest.raises(QualificationError):
        sum_rule(a, b, (1,), strict=True)
    r = sum_rule(a, b, (1,))
    assert not r.verified
    assert poly_equal(r.set, Polyhedron.universe(1))
    assert poly_equal(subdifferential_direct(Sum(a, b), (1,)).set, Polyhedron.universe(1))


@given(st.integers(1, 3).flatmap(lambda n: st.tuples(pl_functions(n), vectors(n), vectors(n))))
def test_subgradient_inequality(data):
    f, x, y = data
    if not f.domain.contains(x):
        x = f.domain.feasible_point
    S = subdifferential(f, x).set
    assert poly_equal(S, subdifferential_direct(f, x).set)
    points, _, _ = vrep(S)
    fy = f.eval(y)
    for g in points:
        assert fy >= f.eval(x) + sum(a * (b - c) for a, b, c in zip(g, y, x))


@given(st.integers(0, 10 ** 6))
def test_max_rule_equality_when_qualified(seed):
    rng = random.Random(seed)
    funcs, x = gen.max_rule_instance(rng, rng.randint(1, 3), qualified=True)
    r = max_rule(funcs, x, strict=True)
    assert poly_equal(r.set, subdifferential_direct(Max(tuple(funcs)), x).set)


@given(st.integers(0, 10 ** 6))
def test_max_rule_inclusion_always(seed):
    rng = random.Random(seed)
    funcs, x = gen.max_rule_instance(rng, rng.randint(1, 3), qualified=False)
    assert poly_subset(max_rule(funcs, x).set, subdifferential_direct(Max(tuple(funcs)), x).set)


@given(st.lists(st.tuples(SMALL, SMALL), min_size=1, max_size=4), st.integers(-3, 0), st.integers(1, 3),
       st.builds(F, st.integers(-6, 6), st.just(2)))
def test_fermat_rule_against_breakpoint_minimum(pieces, lo, hi, x):
    f = Sum(MaxAffine(tuple(((a,), b) for a, b in pieces)), Indicator(interval(lo, hi)))
    if not lo <= x <= hi:
        return
    is_min = f.eval((x,)) == oracles.min_1d(pieces, F(lo), F(hi))
    assert subdifferential(f, (x,)).contains((0,)) == is_min


@given(st.integers(1, 2).flatmap(pl_functions))
def test_fermat_rule_at_lp_minimizer(f):
    value, x = minimize(f)
    if x is None:
        return
    assert subdifferential(f, x).contains((0,) * f.dim)


@given(st.integers(1, 2).flatmap(lambda n: st.tuples(pl_functions(n), vectors(n), vectors(n))))
def test_conjugate_link(data):
    f, x, s = data
    if not f.domain.contains(x):
        return
    fs = conjugate(f).eval(s)
    on_equality = fs != math.inf and f.eval(x) + fs == sum(a * b for a, b in zip(s, x))
    assert subdifferential(f, x).contains(s) == on_equality
