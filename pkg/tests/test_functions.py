import math
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from polydual import (Affine, ImproperError, Indicator, InputError, LinearMap, Max, MaxAffine, Polyhedron,
                      PreComposeLinear, ScaleNonneg, Sum, core_membership, epigraph, from_epigraph, poly_equal)
from polydual.functions import epigraph_core_witness, minimize, normalize
from polydual.grid import GridSpec, sample
from strategies import HALVES, pl_functions, vectors

ABS = MaxAffine((((1,), 0), ((-1,), 0)))
UNIT = Polyhedron.box([0], [1])


def test_eval_examples():
    assert ABS.eval((3,)) == 3
    assert Indicator(UNIT).eval((2,)) == math.inf
    assert Sum(ABS, Indicator(Polyhedron.box([1], [None]))).eval((1,)) == 1


def test_domain_examples():
    assert poly_equal(ABS.domain, Polyhedron.universe(1))
    assert poly_equal(Sum(ABS, Indicator(UNIT)).domain, UNIT)
    square = Polyhedron.box([0, 0], [1, 1])
    assert poly_equal(PreComposeLinear(Indicator(square), LinearMap.identity(2)).domain, square)


def test_epigraph_examples():
    assert poly_equal(epigraph(ABS), Polyhedron(2, (((1, -1), 0), ((-1, -1), 0))))
    assert poly_equal(epigraph(Indicator(UNIT)), Polyhedron.box([0, 0], [1, None]))
    w = epigraph_core_witness(ABS)
    assert core_membership(epigraph(ABS), w)
    assert core_membership(epigraph(ABS), (0, 1))


def test_sample_examples():
    grid = GridSpec.uniform(-1, 1, 1)
    assert sample(ABS, grid).values.tolist() == [1, 0, 1]
    assert sample(Indicator(UNIT), grid).values.tolist() == [math.inf, 0, 0]
    two = MaxAffine((((1,), 0), ((2,), -1)))
    assert sample(two, GridSpec.uniform(0, 1, 1)).values.tolist() == [0, 1]


def test_construction_errors():
    with pytest.raises(InputError):
        Sum(ABS, MaxAffine((((1, 1), 0),)))
    with pytest.raises(InputError):
        ScaleNonneg(F(-1), ABS)
    with pytest.raises(InputError):
        ABS.eval((1, 2))
    with pytest.raises(ImproperError):
        Sum(Indicator(UNIT), Indicator(Polyhedron.box([2], [3])))


def test_scale_zero_keeps_domain():
    f = ScaleNonneg(F(0), Sum(ABS, Indicator(UNIT)))
    assert f.eval((F(1, 2),)) == 0
    assert f.eval((2,)) == math.inf


def test_max_and_precompose():
    f = Max((Affine((1,), 0), Affine((2,), -1)))
    assert f.eval((1,)) == 1 and f.eval((3,)) == 5
    g = PreComposeLinear(ABS, LinearMap.from_rows([[1, -1]]))
    assert g.eval((2, 5)) == 3


@given(st.integers(1, 3).flatmap(lambda n: st.tuples(pl_functions(n), vectors(n))))
def test_finite_iff_in_domain(data):
    f, x = data
    assert (f.eval(x) != math.inf) == f.domain.contains(x)


@given(st.integers(1, 3).flatmap(lambda n: st.tuples(pl_functions(n), vectors(n), HALVES)))
def test_epigraph_membership(data):
    f, x, t = data
    assert epigraph(f).contains(x + (t,)) == (t >= f.eval(x))


@given(st.integers(1, 3).flatmap(lambda n: st.tuples(pl_functions(n), vectors(n), vectors(n))))
def test_midpoint_convexity(data):
    f, x, y = data
    mid = tuple((a + b) / 2 for a, b in zip(x, y))
    assert 2 * f.eval(mid) <= f.eval(x) + f.eval(y)


@given(st.integers(1, 3).flatmap(lambda n: st.tuples(pl_functions(n), vectors(n), HALVES)))
def test_epigraph_core_representation(data):
    f, x, lam = data
    w = epigraph_core_witness(f)
    if w is None:
        return
    assert core_membership(epigraph(f), w)
    inside = core_membership(f.domain, x) and f.eval(x) < lam
    assert core_membership(epigraph(f), x + (lam,)) == inside


@given(st.integers(1, 3).flatmap(lambda n: st.tuples(pl_functions(n), vectors(n))))
def test_normal_form_agrees(data):
    f, x = data
    assert normalize(f).eval(x) == f.eval(x)
    assert from_epigraph(epigraph(f)).eval(x) == f.eval(x)


@given(st.integers(1, 2).flatmap(pl_functions))
def test_minimize_is_a_lower_bound(f):
    value, x = minimize(f)
    if x is not None:
        assert f.eval(x) == value
    grid = GridSpec.uniform(-4, 4, F(1, 2), f.dim)
    vals = sample(f, grid).values
    assert value == -math.inf or np.min(vals) >= float(value) - 1e-12
