"""Seeded batch verification of the duality and calculus theorems.

A suite draws ``n`` instances, each from its own ``random.Random`` seeded by
``(suite, seed, index)``, so any single instance can be replayed.  An
instance fails when a check returns false or the library raises (including
:class:`~polydual.errors.TheoremViolation`).
"""
from __future__ import annotations

import csv
import io
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np

from . import generators as gen
from .coderivative import (SetValuedMap, chain_rule_check, constraint_system_coderivative, intersection_rule_check,
                           preimage_normal_cone)
from .conjugate import conjugate, conjugate_chain_witness, conjugate_sum_split, conjugate_via_epigraph
from .errors import PolydualError
from .fenchel import DualityReport, FenchelProblem, fenchel_report
from .functions import Max, PreComposeLinear, Sum, epigraph
from .geometry import (Cone, core_meets, core_membership, core_nonempty, dual_cone, normal_cone, poly_equal,
                       poly_subset)
from .grid import GridSpec, sample
from .lagrange import (alternative_systems, dual_function, feasible_set, fritz_john, improving_point, kkt_check,
                       kkt_find, primal_value, strong_duality_report)
from .legendre import lf_transform_brute, lf_transform_fast
from .polyhedron import Polyhedron, solve_lp
from .rational import INF, dot, fmt
from .subdiff import max_rule, subdifferential_direct

CSV_COLUMNS = ("instance_id", "p", "d", "gap", "qualified", "slater", "attained")


class CheckFailed(Exception):
    pass


def expect(condition: bool, message: str):
    if not condition:
        raise CheckFailed(message)


@dataclass
class SuiteResult:
    name: str
    total: int
    failures: list = field(default_factory=list)      # (instance_id, message)
    reports: list = field(default_factory=list)       # (instance_id, DualityReport)

    @property
    def passed(self) -> int:
        return self.total - len(self.failures)

    @property
    def ok(self) -> bool:
        return not self.failures

    def summary(self) -> str:
        return f"{self.passed}/{self.total} ok"


def emit_csv(reports) -> str:
    """CSV text for ``(instance_id, DualityReport)`` pairs, header first."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for iid, r in reports:
        slater = "" if r.slater is None else str(r.slater).lower()
        w.writerow((iid, fmt(r.p_hat), fmt(r.d_hat), fmt(r.gap), str(r.qualified).lower(), slater,
                    str(r.attained).lower()))
    return buf.getvalue()


def _dim(rng: random.Random, dims: int) -> int:
    return rng.randint(1, dims)


def _until(make: Callable, accept: Callable, tries: int = 40):
    for _ in range(tries):
        inst = make()
        if accept(inst):
            return inst
    raise CheckFailed("generator did not produce an acceptable instance")


# -- conjugate calculus -----------------------------------------------------------

def _sum_rule(rng, dims):
    n = _dim(rng, dims)
    phi1, phi2, _ = gen.composite_pair(rng, n)
    total = Sum(phi1, phi2)
    for _ in range(10):
        f = gen.rvec(rng, n, -4, 4)
        w = conjugate_sum_split(phi1, phi2, f, strict=True)
        expect(all(a + b == c for a, b, c in zip(*w.split, f)), "split does not add up to f")
        expect(w.total == conjugate_via_epigraph(total, f), f"sum rule value mismatch at f={f}")


def _chain_rule(rng, dims):
    n, m = _dim(rng, dims), _dim(rng, dims)
    phi, A = gen.chain_instance(rng, n, m)
    f = A.adjoint().apply(gen.rvec(rng, m))
    w = conjugate_chain_witness(phi, A, f, strict=True)
    expect(A.adjoint().apply(w.s) == f, "A^T s != f")
    expect(w.value == conjugate_via_epigraph(PreComposeLinear(phi, A), f), "chain rule value mismatch")


# -- Fenchel ---------------------------------------------------------------------------

def _fenchel_strong(rng, dims):
    n, m = _dim(rng, dims), _dim(rng, dims)
    phi, psi, A = gen.fenchel_qualified(rng, n, m)
    rep = fenchel_report(FenchelProblem(phi, psi, A))
    expect(rep.qualified, "generated instance is not qualified")
    expect(rep.gap == 0, f"gap {rep.gap}")
    if rep.p_hat not in (INF, -INF):
        expect(rep.attained and rep.dual_opt is not None, "dual not attained")
    return rep


def _fenchel_weak(rng, dims):
    n, m = _dim(rng, dims), _dim(rng, dims)
    phi, psi, A = gen.fenchel_any(rng, n, m)
    prob = FenchelProblem(phi, psi, A)
    rep = fenchel_report(prob)
    expect(rep.p_hat >= rep.d_hat, "weak duality")
    for _ in range(3):
        x, g = gen.rvec(rng, n), gen.rvec(rng, m)
        expect(prob.objective(x) >= prob.dual_objective(g), "objective below a dual value")
    return rep


# -- subdifferentials -------------------------------------------------------------

def _max_rule(rng, dims):
    funcs, x = gen.max_rule_instance(rng, _dim(rng, dims), qualified=True)
    mr = max_rule(funcs, x, strict=True)
    expect(poly_equal(mr.set, subdifferential_direct(Max(tuple(funcs)), x).set), "max rule equality")


def _max_rule_unqualified(rng, dims):
    funcs, x = gen.max_rule_instance(rng, _dim(rng, dims), qualified=False)
    mr = max_rule(funcs, x)
    expect(poly_subset(mr.set, subdifferential_direct(Max(tuple(funcs)), x).set), "max rule inclusion")


# -- cone programs -----------------------------------------------------------------

def _random_feasible(rng, prog, Pi):
    """A vertex of ``Pi`` maximizing a random objective."""
    r = solve_lp(gen.nonzero_vec(rng, prog.n), "max", Pi)
    return r.witness if r.optimal else Pi.feasible_point


def _non_optimal_point(rng, prog, Pi, p, u):
    """A feasible point with value above ``p``, or ``None`` when none turns up."""
    for _ in range(30):
        y = _random_feasible(rng, prog, Pi)
        if rng.random() < 0.5:
            t = Fraction(rng.randint(1, 3), 4)
            y = tuple(t * a + (1 - t) * b for a, b in zip(y, u))
        if prog.phi.eval(y) > p:
            return y
    return None


def _kkt(rng, dims):
    def make():
        n, m = _dim(rng, dims), _dim(rng, dims)
        prog = gen.cone_program(rng, n, m, slater=True)
        p, u = primal_value(prog)
        Pi = feasible_set(prog)
        return prog, p, u, Pi, _non_optimal_point(rng, prog, Pi, p, u)

    prog, p, u, Pi, y = _until(make, lambda inst: inst[-1] is not None)
    gam = kkt_find(prog, u)
    expect(gam is not None, "no KKT multipliers at an LP optimum")
    expect(kkt_check(prog, u, gam), "kkt_check rejects the found multipliers")
    expect(all(s == 0 for s in gam.slackness), "complementary slackness")
    expect(kkt_find(prog, y) is None, "multipliers found at a non-optimal point")
    better = improving_point(prog, y)
    expect(better is not None and Pi.contains(better) and prog.phi.eval(better) < prog.phi.eval(y),
           "no improving point")


def _lagrange_strong(rng, dims):
    n, m = _dim(rng, dims), _dim(rng, dims)
    prog = gen.cone_program(rng, n, m, slater=True)
    rep = strong_duality_report(prog)
    expect(rep.slater and rep.gap == 0, f"p={rep.p_hat} d={rep.d_hat}")
    fj = fritz_john(prog, rep.primal_opt)
    expect(fj.gamma0 > 0, "Fritz-John gamma0 = 0 under Slater")
    expect(all(s == 0 for s in fj.slackness), "complementary slackness")
    return rep


def _lagrange_weak(rng, dims):
    def make():
        n, m = _dim(rng, dims), _dim(rng, dims)
        if rng.random() < 0.3:
            prog = gen.cone_program_affine(rng, n, m)
        else:
            prog = gen.cone_program(rng, n, m, slater=rng.random() < 0.5)
        return prog, feasible_set(prog)

    # every instance must contribute one feasible (x, h) pair
    prog, Pi = _until(make, lambda inst: not inst[1].is_empty())
    m = prog.m
    x = _random_feasible(rng, prog, Pi)
    dual_gens = dual_cone(prog.cone).generators
    weights = [Fraction(rng.randint(0, 6), 2) for _ in dual_gens]
    h = tuple(sum((w * g[i] for w, g in zip(weights, dual_gens)), Fraction(0)) for i in range(m))
    expect(prog.phi.eval(x) >= dual_function(prog, h), "weak Lagrangian duality")


def _alternatives(rng, dims):
    n, m = _dim(rng, dims), _dim(rng, dims)
    prog = gen.cone_program(rng, n, m, slater=True, shift=gen.rat(rng, -4, 4))
    res = alternative_systems(prog)
    expect(res.ip_solvable != res.id_solvable, "exactly one system must be solvable")
    _check_alternative_witnesses(prog, res)


def _alternatives_any(rng, dims):
    n, m = _dim(rng, dims), _dim(rng, dims)
    if rng.random() < 0.3 and m >= 2:
        prog = gen.cone_program_affine(rng, n, m)
    else:
        prog = gen.cone_program(rng, n, m, slater=False, shift=gen.rat(rng, -3, 3))
    res = alternative_systems(prog)
    expect(not (res.ip_solvable and res.id_solvable), "both systems solvable")
    _check_alternative_witnesses(prog, res)


def _check_alternative_witnesses(prog, res):
    if res.ip_solvable:
        x = res.ip_witness
        expect(feasible_set(prog).contains(x) and prog.phi.eval(x) < 0, "bad (IP) witness")
    if res.id_solvable:
        h = res.id_witness
        expect(dual_cone(prog.cone).contains(h) and dual_function(prog, h) >= 0, "bad (ID) witness")


# -- coderivatives -----------------------------------------------------------------

def _points(rng, dims, count):
    return [gen.rvec(rng, _dim(rng, min(dims, 2)), -2, 2) for _ in range(count)]


def _chain_qualified(rng, dims):
    def make():
        a, b, c = _points(rng, dims, 3)
        G, H = gen.graph_map(rng, a, b), gen.graph_map(rng, b, c)
        return chain_rule_check(G, H, a, c, gen.rvec(rng, len(c), -2, 2), rng=rng)

    res = _until(make, lambda r: r.qualified)
    expect(res.equal and not res.details["shrunk"], "chain rule equality")


def _chain_unqualified(rng, dims):
    a, b, c = _points(rng, dims, 3)
    G, H = gen.constant_map(rng, a, b), gen.graph_map(rng, b, c)
    res = chain_rule_check(G, H, a, c, gen.rvec(rng, len(c), -2, 2), rng=rng)
    expect(not res.qualified, "control instance is qualified")
    expect(poly_subset(res.rhs, res.lhs), "chain rule inclusion")


def _preimage_qualified(rng, dims):
    def make():
        u, v = _points(rng, dims, 2)
        S = gen.through_point(rng, v, rng.randint(1, 3), rng.randint(0, 2))
        return preimage_normal_cone(gen.graph_map(rng, u, v), S, u, v)

    res = _until(make, lambda r: r.qualified)
    expect(res.equal, "preimage formula equality")


def _preimage_unqualified(rng, dims):
    u, v = _points(rng, dims, 2)
    res = preimage_normal_cone(gen.graph_map(rng, u, v), Polyhedron.point(v), u, v)
    expect(not res.qualified, "control instance is qualified")
    expect(poly_subset(res.rhs, res.lhs), "preimage inclusion")


def _constraint_instance(rng, dims, point_set: bool):
    u, v = _points(rng, dims, 2)
    z = u + v
    region = gen.through_point(rng, z, rng.randint(1, 3), rng.randint(0, 2))
    p = rng.randint(1, 2)
    M = gen.matrix(rng, p, len(z))
    offset = gen.rvec(rng, p)
    w = tuple(x + y for x, y in zip(M.apply(z), offset))
    S = Polyhedron.point(w) if point_set else gen.through_point(rng, w, rng.randint(1, 2), rng.randint(0, 2))
    return region, M, offset, S, len(u), u, v, gen.rvec(rng, len(v), -2, 2)


def _constraint_qualified(rng, dims):
    res = _until(lambda: constraint_system_coderivative(*_constraint_instance(rng, dims, False)),
                 lambda r: r.qualified)
    expect(res.equal, "constraint-system formula equality")


def _constraint_unqualified(rng, dims):
    res = constraint_system_coderivative(*_constraint_instance(rng, dims, True))
    expect(not res.qualified, "control instance is qualified")
    expect(poly_subset(res.rhs, res.lhs), "constraint-system inclusion")


def _intersection_qualified(rng, dims):
    def make():
        u, v = _points(rng, dims, 2)
        G1, G2 = gen.graph_map(rng, u, v), gen.graph_map(rng, u, v)
        return intersection_rule_check(G1, G2, u, v, gen.rvec(rng, len(v), -2, 2), rng=rng)

    res = _until(make, lambda r: r.qualified)
    expect(res.equal, "intersection rule")


def _intersection_unqualified(rng, dims):
    u, v = _points(rng, dims, 2)
    z = u + v
    G1 = gen.graph_map(rng, u, v, active=1)
    a, o = G1.graph.ineqs[0]
    G2 = SetValuedMap(len(u), len(v), Polyhedron(len(z), (), ((a, o),)))
    res = intersection_rule_check(G1, G2, u, v, gen.rvec(rng, len(v), -2, 2), rng=rng)
    expect(not res.qualified, "control instance is qualified")


# -- oracles ---------------------------------------------------------------------------

def _lf_fast(rng, dims):
    nrng = np.random.default_rng(rng.getrandbits(64))
    if rng.random() < 0.5:
        count = rng.choice([64, 256, 1024, 4096])
        h = Fraction(1, 2 ** rng.randint(3, 8))
        grid = GridSpec.uniform(-h * (count // 2), h * (count // 2 - 1), h)
        dual = GridSpec.uniform(-8, 8, Fraction(1, 2 ** rng.randint(2, 8)))
    else:
        side = rng.choice([16, 32, 64])
        h = Fraction(1, 2 ** rng.randint(2, 5))
        grid = GridSpec.uniform(-h * (side // 2), h * (side // 2 - 1), h, 2)
        dual = GridSpec.uniform(-4, 4, Fraction(1, 2 ** rng.randint(1, 3)), 2)
    g = gen.convex_samples(nrng, grid)
    a, b = lf_transform_brute(g, dual).values, lf_transform_fast(g, dual).values
    expect(np.array_equal(a.view(np.int64), b.view(np.int64)), "fast and brute transforms differ")


def _lf_oracle(rng, dims):
    if rng.random() < 0.5:
        h = Fraction(1, 16)
        f = gen.breakpoint_pl_1d(rng, Fraction(-4), Fraction(4), h)
        grid = GridSpec.uniform(-4, 4, h)
        dual = GridSpec.uniform(-5, 5, Fraction(1, 8))
    else:
        h = Fraction(1, 4)
        f = gen.separable_pl_2d(rng, Fraction(-2), Fraction(2), h)
        grid = GridSpec.uniform(-2, 2, h, 2)
        dual = GridSpec.uniform(-3, 3, Fraction(1, 2), 2)
    approx = lf_transform_brute(sample(f, grid), dual).values
    exact = sample(conjugate(f), dual).values
    smax = max(float(max(abs(dual.lo[i]), abs(dual.hi[i]))) for i in range(dual.dim))
    bound = 2 * float(h) * smax
    expect(bool(np.all(np.abs(approx - exact) <= bound)), "grid transform outside the spacing bound")


def _biconjugate(rng, dims):
    n = _dim(rng, dims)
    f = gen.pl_function(rng, n, gen.rvec(rng, n), bounded=rng.random() < 0.7, flat_domain=rng.random() < 0.2)
    expect(poly_equal(epigraph(conjugate(conjugate(f))), epigraph(f)), "f** != f")


def _geometry(rng, dims, index):
    n = _dim(rng, dims)
    kind = index % 4
    if kind == 0:
        x = gen.rvec(rng, n)
        P = gen.through_point(rng, x, rng.randint(1, 3), rng.randint(0, 2))
        Q = gen.through_point(rng, x, rng.randint(1, 3), rng.randint(0, 2))
        if core_meets(P, Q) is None:
            Q = gen.box_around(rng, x)
        lhs = normal_cone(P.intersect(Q), x)
        expect(poly_equal(lhs, normal_cone(P, x) + normal_cone(Q, x)), "normal-cone intersection rule")
    elif kind == 1:
        P = gen.polytope_around(rng, gen.rvec(rng, n), rng.randint(0, 3))
        z = core_nonempty(P)
        expect(z is not None and core_membership(P, z), "core point")
        expect(poly_equal(normal_cone(P, z), Cone.zero(n)), "normal cone at a core point is not {0}")
    elif kind == 2:
        C = gen.random_cone(rng, n)
        expect(poly_equal(dual_cone(dual_cone(C)), C), "dual-cone involution")
    else:
        P = gen.polytope_around(rng, gen.rvec(rng, n), rng.randint(0, 3))
        c = gen.rvec(rng, n)
        r = solve_lp(c, "max", P)
        y, z = r.dual
        stat = [sum((y[k] * P.A[k][j] for k in range(len(y))), Fraction(0))
                + sum((z[k] * P.E[k][j] for k in range(len(z))), Fraction(0)) for j in range(n)]
        expect(all(v >= 0 for v in y) and tuple(stat) == c, "dual certificate infeasible")
        expect(dot(P.b, y) + dot(P.d, z) == r.value, "LP primal and dual values differ")


# -- registry -------------------------------------------------------------------------------

SUITES: dict[str, Callable] = {
    "sum-rule": _sum_rule,
    "chain-rule": _chain_rule,
    "fenchel": _fenchel_strong,
    "fenchel-weak": _fenchel_weak,
    "max-rule": _max_rule,
    "max-rule-unqualified": _max_rule_unqualified,
    "kkt": _kkt,
    "lagrange": _lagrange_strong,
    "lagrange-weak": _lagrange_weak,
    "alternatives": _alternatives,
    "alternatives-any": _alternatives_any,
    "coderivative-chain": _chain_qualified,
    "coderivative-chain-unqualified": _chain_unqualified,
    "coderivative-preimage": _preimage_qualified,
    "coderivative-preimage-unqualified": _preimage_unqualified,
    "coderivative-constraint": _constraint_qualified,
    "coderivative-constraint-unqualified": _constraint_unqualified,
    "coderivative-intersection": _intersection_qualified,
    "coderivative-intersection-unqualified": _intersection_unqualified,
    "lf-fast": _lf_fast,
    "lf-oracle": _lf_oracle,
    "biconjugate": _biconjugate,
    "geometry": _geometry,
}

_INDEXED = {"geometry"}


def run_suite(name: str, n: int, seed: int = 0, dims: int = 3) -> SuiteResult:
    """Run ``n`` instances of suite ``name``; instance ``i`` is seeded by ``(name, seed, i)``."""
    if name not in SUITES:
        raise KeyError(name)
    check = SUITES[name]
    result = SuiteResult(name, n)
    for i in range(n):
        iid = f"{name}-{seed}-{i}"
        rng = random.Random(f"{name}:{seed}:{i}")
        try:
            out = check(rng, dims, i) if name in _INDEXED else check(rng, dims)
        except (CheckFailed, PolydualError, AssertionError) as exc:
            result.failures.append((iid, f"{type(exc).__name__}: {exc}"))
            continue
        if isinstance(out, DualityReport):
            result.reports.append((iid, out))
    return result
