from fractions import Fraction as F

import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from polydual import (NOT_IN_SET, Cone, InputError, Polyhedron, core_meets, core_membership, core_nonempty,
                      dual_cone, minkowski_sum, normal_cone, poly_equal, poly_subset, solve_lp)
from polydual.fm import project, vrep_to_hrep
from polydual.geometry import cone_is_generating, core_membership_by_directions, separate_properly, vrep
from polydual.lp import INFEASIBLE, OPTIMAL, UNBOUNDED
from polydual.polyhedron import canonical, prune
from strategies import nonzero_vectors, polytopes, vectors

UNIT_SQUARE = Polyhedron.box([0, 0], [1, 1])


def dot(a, b):
    return sum(x * y for x, y in zip(a, b))


# -- LP ----------------------------------------------------------------------

def test_lp_box_maximum():
    r = solve_lp((1, 0), "max", UNIT_SQUARE)
    assert r.status == OPTIMAL and r.value == 1
    assert r.witness[0] == 1 and UNIT_SQUARE.contains(r.witness)


def test_lp_unbounded_ray():
    P = Polyhedron.halfspace((-1, 0), 0)
    r = solve_lp((1, 0), "max", P)
    assert r.status == UNBOUNDED
    ray = r.witness
    assert ray[0] > 0 and all(dot(a, ray) <= 0 for a, _ in P.ineqs)
    assert P.contains(r.point)


def test_lp_infeasible_farkas():
    P = Polyhedron(1, (((1,), -1), ((-1,), -1)))
    r = solve_lp((0,), "min", P)
    assert r.status == INFEASIBLE
    y, _ = r.dual
    assert all(v >= 0 for v in y)
    assert sum(yi * a[0] for yi, (a, _) in zip(y, P.ineqs)) == 0
    assert sum(yi * o for yi, (_, o) in zip(y, P.ineqs)) < 0


def test_lp_dimension_mismatch():
    with pytest.raises(InputError):
        solve_lp((1, 2, 3), "max", UNIT_SQUARE)


@given(st.integers(1, 3).flatmap(lambda n: st.tuples(polytopes(n), nonzero_vectors(n))))
def test_lp_matches_vertex_enumeration(data):
    (P, _), c = data
    r = solve_lp(c, "max", P)
    assert r.status == OPTIMAL
    assert r.value == oracles.lp_max(c, P.dim, oracles.as_rows(P))


@given(st.integers(1, 3).flatmap(lambda n: st.tuples(polytopes(n), nonzero_vectors(n))))
def test_lp_strong_duality_certificate(data):
    (P, _), c = data
    r = solve_lp(c, "max", P)
    y, z = r.dual
    assert all(v >= 0 for v in y)
    stat = tuple(sum((yk * a[j] for yk, (a, _) in zip(y, P.ineqs)), F(0))
                 + sum((zk * a[j] for zk, (a, _) in zip(z, P.eqs)), F(0)) for j in range(P.dim))
    assert stat == c
    assert dot(y, P.b) + dot(z, P.d) == r.value


# -- core and interiors ---------------------------------------------------------

def test_core_membership_examples():
    assert core_membership(UNIT_SQUARE, (F(1, 2), F(1, 2)))
    assert not core_membership(UNIT_SQUARE, (0, F(1, 2)))
    segment = Polyhedron(2, (((1, 0), 1), ((-1, 0), 0)), (((0, 1), 0),))
    assert not core_membership(segment, (F(1, 2), 0))
    # definitional check: the direction (0, 1) admits no positive step
    assert not core_membership_by_directions(segment, (F(1, 2), 0), [(0, 1)])


def test_core_nonempty_examples():
    x = core_nonempty(UNIT_SQUARE)
    assert x is not None and core_membership(UNIT_SQUARE, x)
    assert core_nonempty(Polyhedron(2, (), (((1, 0), 0),))) is None
    assert core_nonempty(Polyhedron.empty(2)) is None


def test_core_hidden_equality():
    # x <= 0 and x >= 0 pin x without an explicit equality
    P = Polyhedron(2, (((1, 0), 0), ((-1, 0), 0), ((0, 1), 1)))
    assert core_nonempty(P) is None


@given(st.integers(1, 3).flatmap(polytopes))
def test_core_witness_is_in_core(data):
    P, center = data
    x = core_nonempty(P)
    assert x is not None
    assert core_membership(P, x)
    assert core_membership_by_directions(P, x)
    assert poly_equal(normal_cone(P, x).hrep, Cone.zero(P.dim).hrep)


# -- normal and dual cones -----------------------------------------------------

def test_normal_cone_examples():
    N = normal_cone(UNIT_SQUARE, (0, 0))
    assert poly_equal(N, Cone.from_generators(2, [(-1, 0), (0, -1)]))
    assert poly_equal(normal_cone(UNIT_SQUARE, (F(1, 2), F(1, 2))), Cone.zero(2))
    assert normal_cone(UNIT_SQUARE, (2, 2)) is NOT_IN_SET


def test_normal_cone_generators_vs_hrep():
    N = normal_cone(UNIT_SQUARE, (0, 0))
    H = Polyhedron(2, (((1, 0), 0), ((0, 1), 0)))
    assert poly_equal(N, H)


def test_dual_cone_examples():
    assert poly_equal(dual_cone(Cone.orthant(2)), Cone.orthant(2))
    assert poly_equal(dual_cone(Cone.zero(2)), Polyhedron.universe(2))
    assert poly_equal(dual_cone(Cone.from_generators(2, [(1, 1)])), Polyhedron.halfspace((-1, -1), 0))


def test_cone_is_generating_examples():
    assert cone_is_generating(Cone.orthant(2), 2)
    assert not cone_is_generating(Cone.from_generators(2, [(1, 0)]), 2)
    assert cone_is_generating(Cone.from_generators(2, [(1, 0), (-1, 1)]), 2)


@given(st.integers(1, 3).flatmap(lambda n: st.lists(nonzero_vectors(n), min_size=1, max_size=4)))
def test_dual_cone_involution(gens):
    C = Cone.from_generators(len(gens[0]), gens)
    assert poly_equal(dual_cone(dual_cone(C)), C)


@given(st.integers(1, 3).flatmap(lambda n: st.lists(nonzero_vectors(n), min_size=1, max_size=4)),
       st.data())
def test_dual_cone_definition(gens, data):
    C = Cone.from_generators(len(gens[0]), gens)
    D = dual_cone(C)
    f = data.draw(vectors(C.dim))
    assert D.contains(f) == all(dot(f, g) >= 0 for g in gens)


@given(st.integers(1, 3).flatmap(lambda n: st.tuples(polytopes(n), polytopes(n))))
def test_normal_cone_intersection_rule(data):
    (P, cp), (Q, _) = data
    # shift Q so the meeting point is a vertex of P
    x = solve_lp(tuple(F(1) for _ in range(P.dim)), "max", P).witness
    Q = Q.translate(tuple(a - b for a, b in zip(x, solve_lp(tuple(F(-1) for _ in range(P.dim)), "max", Q).witness)))
    if not Q.contains(x) or core_meets(P, Q) is None:
        return
    lhs = normal_cone(P.intersect(Q), x)
    assert poly_equal(lhs, normal_cone(P, x) + normal_cone(Q, x))


# -- separation ------------------------------------------------------------------

def test_separation_examples():
    P, Q = Polyhedron.halfspace((1,), 0), Polyhedron.halfspace((-1,), -1)
    g, bound = separate_properly(P, Q)
    assert g[0] > 0 and bound == 0
    box = Polyhedron.box([0], [1])
    assert separate_properly(box, box) is None
    P = Polyhedron(2, (((1, 0), 1), ((-1, 0), 0)), (((0, 1), 0),))
    Q = Polyhedron(2, (((0, 1), 1), ((0, -1), 0)), (((1, 0), 0),))
    g, bound = separate_properly(P, Q)
    assert solve_lp(g, "max", P).value <= solve_lp(g, "min", Q).value
    assert solve_lp(g, "min", P).value < solve_lp(g, "max", Q).value


def test_separation_rejects_empty():
    with pytest.raises(InputError):
        separate_properly(Polyhedron.empty(1), Polyhedron.box([0], [1]))


# -- projection ------------------------------------------------------------------

def test_projection_examples():
    assert poly_equal(project(UNIT_SQUARE, [0]), Polyhedron.box([0], [1]))
    P = Polyhedron(2, (((1, 1), 1), ((0, -1), 0)))
    assert poly_equal(project(P, [0]), Polyhedron.halfspace((1,), 1))
    assert project(Polyhedron.empty(2), [0]).is_empty()


@given(st.integers(2, 3).flatmap(lambda n: st.tuples(polytopes(n), nonzero_vectors(1))))
def test_projection_support_matches_vertices(data):
    (P, _), c = data
    proj = project(P, [0])
    verts = oracles.vertices(P.dim, oracles.as_rows(P))
    assert solve_lp(c, "max", proj).value == max(c[0] * v[0] for v in verts)


@given(st.integers(3, 3).flatmap(polytopes))
def test_projection_composes(data):
    P, _ = data
    assert poly_equal(project(project(P, [0, 1]), [0]), project(P, [0]))


# -- equality, pruning, V-representations --------------------------------------------------

def test_poly_equal_examples():
    redundant = UNIT_SQUARE.intersect(Polyhedron.halfspace((1, 0), 2))
    assert poly_equal(UNIT_SQUARE, redundant)
    assert not poly_equal(UNIT_SQUARE, Polyhedron.box([0, 0], [1, 2]))


@given(st.integers(1, 3).flatmap(polytopes))
def test_prune_and_canonical_preserve_the_set(data):
    P, _ = data
    assert poly_equal(prune(P), P)
    assert canonical(P) == canonical(prune(P))


@given(st.integers(1, 3).flatmap(polytopes))
def test_vrep_round_trip(data):
    P, _ = data
    points, rays, lines = vrep(P)
    assert not rays and not lines
    assert sorted(points) == sorted(oracles.vertices(P.dim, oracles.as_rows(P)))
    assert poly_equal(vrep_to_hrep(P.dim, points, rays, lines), P)


def test_vrep_of_empty_set():
    assert vrep(Polyhedron.empty(2)) == ([], [], [])


def test_vrep_unbounded():
    points, rays, lines = vrep(Polyhedron(2, (((0, -1), 0),)))
    assert points and lines and rays == [(0, 1)]


@given(st.integers(1, 3).flatmap(lambda n: st.tuples(polytopes(n), polytopes(n))))
def test_minkowski_sum_support(data):
    (P, _), (Q, _) = data
    S = minkowski_sum(P, Q)
    c = tuple(F(i + 1) for i in range(P.dim))
    assert solve_lp(c, "max", S).value == solve_lp(c, "max", P).value + solve_lp(c, "max", Q).value
    assert poly_subset(P.translate(solve_lp(c, "max", Q).witness), S)
