import math
import random
from fractions import Fraction as F

import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from polydual import Affine, Cone, InputError, MaxAffine, Polyhedron, Sum, poly_equal, vrep
from polydual import generators as gen
from polydual.errors import SlaterError
from polydual.geometry import dual_cone
from polydual.lagrange import (ConeProgram, alternative_systems, dual_function, feasible_set, fritz_john,
                               improving_point, is_optimal, kkt_check, kkt_find, lagrangian, optimality_check,
                               primal_value, slater_check, slater_status, strong_duality_report)

REAL = Polyhedron.universe(1)
ABS = MaxAffine((((1,), 0), ((-1,), 0)))
DIST2 = MaxAffine((((1,), -2), ((-1,), 2)))          # |x - 2|
X = Affine((1,), 0)
MINUS_X = Affine((-1,), 0)
X_MINUS_1 = Affine((1,), -1)


def program(phi, *psi, region=REAL, cone=None):
    return ConeProgram(phi, psi, region, cone)


# -- feasible sets and pointwise conditions ------------------------------------------------

def test_feasible_set_examples():
    assert poly_equal(feasible_set(program(X, X_MINUS_1)), Polyhedron.halfspace((1,), 1))
    bump = MaxAffine((((1,), -2), ((-1,), -2)))
    assert poly_equal(feasible_set(program(X, bump, region=Polyhedron.box([0], [3]))), Polyhedron.box([0], [2]))
    plane = Polyhedron.universe(2)
    psi = (Affine((1, 0), 0), Affine((0, 1), 0))
    prog = ConeProgram(Affine((0, 0), 0), psi, plane, Cone.orthant(2))
    assert poly_equal(feasible_set(prog), Polyhedron.box([None, None], [0, 0]))


def test_optimality_check_examples():
    half_line = Polyhedron.halfspace((1,), 1)
    assert optimality_check(DIST2, half_line, (1,))
    assert not optimality_check(DIST2, half_line, (0,))
    assert optimality_check(ABS, Polyhedron.box([-1], [1]), (0,))


def test_optimality_check_rejects_infeasible_point():
    with pytest.raises(InputError):
        optimality_check(DIST2, Polyhedron.halfspace((1,), 1), (3,))


def test_fritz_john_examples():
    m = fritz_john(program(X, MINUS_X), (0,))
    assert m.gamma0 == m.gammas[0] > 0
    m = fritz_john(program(DIST2, X_MINUS_1), (1,))
    assert m.gamma0 == m.gammas[0] > 0
    m = fritz_john(program(X, X, MINUS_X), (0,))
    assert m.gamma0 + sum(m.gammas) == 1 and min(m.gammas + (m.gamma0,)) >= 0
    assert m.slackness == (0, 0)


def test_fritz_john_needs_an_optimum():
    with pytest.raises(InputError):
        fritz_john(program(DIST2, X_MINUS_1), (0,))


def test_slater_examples():
    assert slater_check(program(X, X_MINUS_1)) is not None
    assert X_MINUS_1.eval(slater_check(program(X, X_MINUS_1))) < 0
    assert slater_check(program(X, X, MINUS_X)) is None
    ray = Cone.from_generators(2, [(1, 0)])
    prog = ConeProgram(Affine((0, 0), 0), (Affine((1, 0), 0), Affine((0, 1), 0)), Polyhedron.universe(2), ray)
    point, reason = slater_status(prog)
    assert point is None and "core(C)" in reason


def test_kkt_check_examples():
    prog = program(DIST2, X_MINUS_1)
    assert kkt_check(prog, (1,), (1,))
    assert not kkt_check(prog, (1,), (0,))
    assert kkt_check(program(ABS, X_MINUS_1), (0,), (0,))


def test_kkt_needs_slater():
    with pytest.raises(SlaterError):
        kkt_find(program(X, X, MINUS_X), (0,))


def test_kkt_find_examples():
    prog = program(DIST2, X_MINUS_1)
    assert kkt_find(prog, (1,)).gammas == (1,)
    assert kkt_find(prog, (0,)) is None
    assert improving_point(prog, (0,)) == (1,)
    separable = Sum(MaxAffine((((1, 0), -2), ((-1, 0), 2))), MaxAffine((((0, 1), -2), ((0, -1), 2))))
    two = ConeProgram(separable, (Affine((1, 0), -1), Affine((0, 1), -1)), Polyhedron.universe(2))
    assert kkt_find(two, (1, 1)).gammas == (1, 1)


# -- duality -----------------------------------------------------------------------------------

def test_lagrangian_examples():
    prog = program(ABS, X_MINUS_1)
    assert lagrangian(prog, (0,), (2,)) == -2
    assert lagrangian(prog, (3,), (0,)) == 3
    assert lagrangian(prog, (1,), (7,)) == 1


def test_dual_function_examples():
    assert dual_function(program(DIST2, X_MINUS_1), (1,)) == 1
    assert dual_function(program(DIST2, X_MINUS_1), (0,)) == 0
    assert dual_function(program(X, MINUS_X), (0,)) == -math.inf
    with pytest.raises(InputError):
        dual_function(program(X, MINUS_X), (-1,))


def test_strong_duality_examples():
    rep = strong_duality_report(program(DIST2, X_MINUS_1))
    assert (rep.p_hat, rep.d_hat, rep.dual_opt) == (1, 1, (1,))
    rep = strong_duality_report(program(X, X, MINUS_X))
    assert rep.p_hat == 0 and rep.p_hat >= rep.d_hat
    rep = strong_duality_report(program(X, X_MINUS_1))
    assert rep.p_hat == rep.d_hat == -math.inf


def test_alternative_examples():
    shifted = MaxAffine((((1,), -1), ((-1,), -1)))
    r = alternative_systems(program(shifted, X_MINUS_1))
    assert r.ip_solvable and not r.id_solvable
    assert shifted.eval(r.ip_witness) < 0 and X_MINUS_1.eval(r.ip_witness) <= 0
    lifted = MaxAffine((((1,), 1), ((-1,), 1)))
    r = alternative_systems(program(lifted, X_MINUS_1))
    assert not r.ip_solvable and r.id_solvable
    r = alternative_systems(program(X, X, MINUS_X))
    assert not (r.ip_solvable and r.id_solvable)


def test_dual_function_matches_breakpoint_oracle():
    # |x - 2| + h (x - 1) over [-5, 5]
    region = Polyhedron.box([-5], [5])
    prog = program(DIST2, X_MINUS_1, region=region)
    for h in (0, F(1, 2), 1, 3):
        pieces = [(1 + h, -2 - h), (-1 + h, 2 - h)]
        assert dual_function(prog, (h,)) == oracles.min_1d(pieces, F(-5), F(5))


# -- properties --------------------------------------------------------------------------------

def _instance(seed, slater):
    rng = random.Random(seed)
    n, m = rng.randint(1, 2), rng.randint(1, 2)
    return rng, gen.cone_program(rng, n, m, slater=slater)


@given(st.integers(0, 10 ** 6), st.booleans())
def test_weak_duality_by_sampling(seed, slater):
    rng, prog = _instance(seed, slater)
    points, _, _ = vrep(feasible_set(prog))
    for _ in range(5):
        h = gen.rvec(rng, prog.m, 0, 3)
        d = dual_function(prog, h)
        for x in points:
            assert prog.phi.eval(x) >= d


@given(st.integers(0, 10 ** 6))
def test_strong_duality_under_slater(seed):
    _, prog = _instance(seed, True)
    rep = strong_duality_report(prog)
    assert rep.p_hat == rep.d_hat
    if rep.dual_opt is not None:
        assert dual_function(prog, rep.dual_opt) == rep.d_hat


@given(st.integers(0, 10 ** 6))
def test_affine_class_weak_duality(seed):
    rng = random.Random(seed)
    prog = gen.cone_program_affine(rng, rng.randint(1, 2), rng.randint(1, 3))
    rep = strong_duality_report(prog)
    assert rep.p_hat >= rep.d_hat
    gens = dual_cone(prog.cone).generators
    weights = [rng.randint(0, 2) for _ in gens]
    h = tuple(sum((w * g[i] for w, g in zip(weights, gens)), F(0)) for i in range(prog.m))
    assert rep.p_hat >= dual_function(prog, h)


@given(st.integers(0, 10 ** 6))
def test_kkt_iff_optimal(seed):
    rng, prog = _instance(seed, True)
    value, u = primal_value(prog)
    mult = kkt_find(prog, u)
    assert mult is not None and kkt_check(prog, u, mult)
    assert all(g * v == 0 for g, v in zip(mult.gammas, prog.psi_values(u)))
    points, _, _ = vrep(feasible_set(prog))
    for x in points:
        assert (kkt_find(prog, x) is not None) == is_optimal(prog, x)


@given(st.integers(0, 10 ** 6))
def test_fritz_john_positive_under_slater(seed):
    _, prog = _instance(seed, True)
    _, u = primal_value(prog)
    m = fritz_john(prog, u)
    assert m.gamma0 > 0
    assert m.slackness == (0,) * prog.m


@given(st.integers(0, 10 ** 6), st.booleans())
def test_alternatives_exclusive(seed, slater):
    _, prog = _instance(seed, slater)
    r = alternative_systems(prog)
    assert not (r.ip_solvable and r.id_solvable)
    if r.slater:
        assert r.ip_solvable or r.id_solvable
    if r.id_solvable:
        assert dual_function(prog, r.id_witness) >= 0
