"""Coderivatives of set-valued maps with polyhedral graphs, and their calculus.

``D*G(a, b)(h) = {f : (f, -h) in N((a, b); gph G)}``.  Every check below
computes both sides of a calculus rule exactly and compares them; the
inclusion that holds without qualification is always enforced, equality is
enforced when the rule's qualification holds.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from . import lp
from .errors import InputError, NotInGraphError, QualificationError, TheoremViolation
from .fm import project
from .geometry import (NOT_IN_SET, Cone, core_meets, core_nonempty, minkowski_sum, normal_cone, poly_subset,
                       vrep)
from .linalg import LinearMap, nullspace
from .polyhedron import Polyhedron, prune, relative_interior_point
from .rational import vector, vneg, zeros


@dataclass(frozen=True, eq=False)
class SetValuedMap:
    """``G : R^n_in ⇉ R^n_out`` given by its (convex, polyhedral) graph."""

    n_in: int
    n_out: int
    graph: Polyhedron

    def __post_init__(self):
        if self.graph.dim != self.n_in + self.n_out:
            raise InputError(f"graph in R^{self.graph.dim} for a map R^{self.n_in} ⇉ R^{self.n_out}")

    @classmethod
    def linear(cls, M: LinearMap) -> "SetValuedMap":
        """Single-valued ``x -> M x``."""
        n, m = M.cols, M.rows
        eqs = tuple((tuple(M.entries[i]) + tuple(-Fraction(i == j) for j in range(m)), 0) for i in range(m))
        return cls(n, m, Polyhedron(n + m, (), eqs))

    def domain(self) -> Polyhedron:
        return project(self.graph, range(self.n_in))

    def rge(self) -> Polyhedron:
        return project(self.graph, range(self.n_in, self.n_in + self.n_out))

    def image(self, x: Sequence) -> Polyhedron:
        """``G(x)`` as a polyhedron in ``R^n_out``."""
        P = self.graph
        for v in vector(x):
            P = P.fix(0, v)
        return P

    def inverse(self) -> "SetValuedMap":
        n, m = self.n_in, self.n_out

        def swap(a):
            return a[n:] + a[:n]

        g = self.graph
        return SetValuedMap(m, n, Polyhedron(n + m, tuple((swap(a), o) for a, o in g.ineqs),
                                             tuple((swap(a), o) for a, o in g.eqs)))

    def preimage(self, S: Polyhedron) -> Polyhedron:
        """``G^{-1}(S) = {x : G(x) ∩ S ≠ ∅}``."""
        lifted = self.graph.intersect(S.embed(self.n_in + self.n_out, range(self.n_in, self.n_in + self.n_out)))
        return project(lifted, range(self.n_in))

    def intersect(self, other: "SetValuedMap") -> "SetValuedMap":
        _same_shape(self, other)
        return SetValuedMap(self.n_in, self.n_out, self.graph.intersect(other.graph))

    def in_graph(self, a: Sequence, b: Sequence) -> bool:
        return self.graph.contains(vector(a) + vector(b))


def _same_shape(G: SetValuedMap, H: SetValuedMap):
    if (G.n_in, G.n_out) != (H.n_in, H.n_out):
        raise InputError("maps of different shapes")


@dataclass(frozen=True)
class CoderivativeValue:
    """``D*G(a, b)(h)`` as a polyhedron in ``R^n_in`` (possibly empty)."""

    set: Polyhedron

    def contains(self, f: Sequence) -> bool:
        return self.set.contains(f)

    def is_empty(self) -> bool:
        return self.set.is_empty()


@dataclass(frozen=True)
class RuleCheck:
    """Both sides of a coderivative rule.

    ``equal`` is the exact comparison; ``qualified`` records the rule's
    qualification.  ``details`` carries rule-specific evidence.
    """

    lhs: Polyhedron
    rhs: Polyhedron
    equal: bool
    qualified: bool
    details: dict = field(default_factory=dict)


def graph_normal_cone(G: SetValuedMap, a: Sequence, b: Sequence) -> Cone:
    N = normal_cone(G.graph, vector(a) + vector(b))
    if N is NOT_IN_SET:
        raise NotInGraphError(f"({a}, {b}) is not in the graph")
    return N


def _slice(cone_hrep: Polyhedron, n_in: int, h: Sequence) -> Polyhedron:
    """``{f : (f, -h) in cone}``."""
    P = cone_hrep
    for v in h:
        P = P.fix(n_in, -v)
    return P


def coderivative(G: SetValuedMap, a: Sequence, b: Sequence, h: Sequence) -> CoderivativeValue:
    """``D*G(a, b)(h)``."""
    a, b, h = vector(a), vector(b), vector(h)
    if len(a) != G.n_in or len(b) != G.n_out or len(h) != G.n_out:
        raise InputError("point or direction of the wrong length")
    return CoderivativeValue(_slice(graph_normal_cone(G, a, b).hrep, G.n_in, h))


def compose(G: SetValuedMap, H: SetValuedMap) -> SetValuedMap:
    """``(H ∘ G)(x) = ∪_{y in G(x)} H(y)``."""
    if G.n_out != H.n_in:
        raise InputError(f"G maps into R^{G.n_out} but H starts from R^{H.n_in}")
    n, m, k = G.n_in, G.n_out, H.n_out
    total = n + m + k
    lifted = G.graph.embed(total, range(n + m)).intersect(H.graph.embed(total, range(n, total)))
    keep = list(range(n)) + list(range(n + m, total))
    return SetValuedMap(n, k, project(lifted, keep))


def _composite_coderivative(NG: Cone, NH: Cone, n: int, m: int, s: Sequence) -> Polyhedron:
    """``D*G(a,b)(D*H(b,c)(s))`` from the two graph normal cones.

    Variables ``(f, t)`` with ``(t, -s) in N_H`` and ``(f, -t) in N_G``; ``f`` is kept.
    """
    total = n + m
    neg_t = [[Fraction(0)] * total for _ in range(n + m)]
    for i in range(n):
        neg_t[i][i] = Fraction(1)
    for j in range(m):
        neg_t[n + j][n + j] = Fraction(-1)
    on_g = NG.hrep.affine_preimage(neg_t)
    on_h = _slice(NH.hrep, m, s).embed(total, range(n, total))
    return project(on_g.intersect(on_h), range(n))


def _sample_points(K: Polyhedron, count: int, rng: random.Random) -> tuple[list, list]:
    """``(samples, vertices)``: random rational points of ``K`` and its vertex list."""
    points, rays, lines = vrep(K)
    out = []
    for _ in range(count):
        w = [Fraction(rng.randint(1, 8)) for _ in points]
        total = sum(w)
        x = zeros(K.dim)
        for wi, p in zip(w, points):
            x = tuple(xi + wi / total * pi for xi, pi in zip(x, p))
        for r in rays:
            k = rng.randint(0, 3)
            x = tuple(xi + k * ri for xi, ri in zip(x, r))
        for l in lines:
            k = rng.randint(-3, 3)
            x = tuple(xi + k * li for xi, li in zip(x, l))
        out.append(x)
    return out, points


def chain_rule_check(G: SetValuedMap, H: SetValuedMap, a: Sequence, c: Sequence, s: Sequence,
                     samples: int = 20, rng: random.Random | None = None, strict: bool = False) -> RuleCheck:
    """``D*(H∘G)(a,c)(s)`` against ``∩_{b in K} D*G(a,b)∘D*H(b,c)(s)``, ``K = G(a) ∩ H^{-1}(c)``.

    The intersection runs over a relative-interior point of ``K`` (where both
    graph normal cones are smallest), the vertices of ``K`` and ``samples``
    random points; ``details["shrunk"]`` lists any ``b`` whose term fails to
    contain the interior term.
    """
    rng = rng or random.Random(0)
    a, c, s = vector(a), vector(c), vector(s)
    n, m = G.n_in, G.n_out
    HG = compose(G, H)
    if not HG.in_graph(a, c):
        raise NotInGraphError(f"({a}, {c}) is not in the graph of the composition")
    rge, dom = G.rge(), H.domain()
    qualified = (core_nonempty(rge.intersect(dom)) is not None
                 and core_nonempty(minkowski_sum(rge, _negate(dom))) is not None)
    if strict and not qualified:
        raise QualificationError("core(rge G) ∩ core(dom H) or core(rge G - dom H) is empty")
    lhs = coderivative(HG, a, c, s).set
    K = G.image(a).intersect(H.inverse().image(c))

    def term(b):
        return _composite_coderivative(graph_normal_cone(G, a, b), graph_normal_cone(H, b, c), n, m, s)

    inner = term(relative_interior_point(K))
    extra, verts = _sample_points(K, samples, rng)
    rhs, shrunk = inner, []
    candidates = list(dict.fromkeys(verts + extra))
    for b in candidates:
        t = term(b)
        if not poly_subset(inner, t):
            shrunk.append(b)
        rhs = rhs.intersect(t)
    rhs = prune(rhs)
    if not poly_subset(rhs, lhs):
        raise TheoremViolation("composite coderivative is not contained in the coderivative of the composition")
    equal = poly_subset(lhs, rhs)
    if qualified and (not equal or shrunk):
        raise TheoremViolation("chain rule fails under its qualification")
    return RuleCheck(lhs, rhs, equal, qualified, {"K": K, "checked": len(candidates), "shrunk": shrunk})


def _negate(P: Polyhedron) -> Polyhedron:
    return Polyhedron(P.dim, tuple((vneg(a), o) for a, o in P.ineqs), tuple((vneg(a), o) for a, o in P.eqs))


def preimage_normal_cone(G: SetValuedMap, S: Polyhedron, u: Sequence, v: Sequence,
                         strict: bool = False) -> RuleCheck:
    """``N(u; G^{-1}(S))`` against ``D*G(u, v)(N(v; S))``, qualified by ``core(rge G) ∩ core(S) ≠ ∅``."""
    u, v = vector(u), vector(v)
    if not S.contains(v):
        raise InputError("v is not in S")
    NG = graph_normal_cone(G, u, v)
    qualified = core_nonempty(G.rge().intersect(S)) is not None
    if strict and not qualified:
        raise QualificationError("core(rge G) ∩ core(S) is empty")
    lhs = normal_cone(G.preimage(S), u).hrep
    n, m = G.n_in, G.n_out
    # (f, y*) with y* in N(v; S) and (f, -y*) in N_G
    flip = [[Fraction(0)] * (n + m) for _ in range(n + m)]
    for i in range(n):
        flip[i][i] = Fraction(1)
    for j in range(m):
        flip[n + j][n + j] = Fraction(-1)
    lifted = NG.hrep.affine_preimage(flip).intersect(normal_cone(S, v).hrep.embed(n + m, range(n, n + m)))
    rhs = project(lifted, range(n))
    if not poly_subset(rhs, lhs):
        raise TheoremViolation("D*G(N(v;S)) is not contained in the normal cone of the preimage")
    equal = poly_subset(lhs, rhs)
    if qualified and not equal:
        raise TheoremViolation("preimage normal-cone formula fails under its qualification")
    return RuleCheck(lhs, rhs, equal, qualified)


def constraint_system_coderivative(region: Polyhedron, phi: LinearMap, offset: Sequence, S: Polyhedron,
                                   n_in: int, u: Sequence, v: Sequence, h: Sequence,
                                   strict: bool = False) -> RuleCheck:
    """Coderivative of ``G(x) = {y : (x, y) in region, phi(x, y) in S}`` with affine ``phi = M z + offset``.

    The right-hand side is ``{f : (f, -h) in M^T N(w; S) + N((u, v); region)}`` with ``w = phi(u, v)``.
    """
    u, v, h = vector(u), vector(v), vector(h)
    offset = vector(offset)
    total = region.dim
    if phi.cols != total or phi.rows != S.dim or len(offset) != S.dim:
        raise InputError("phi must map R^(n+m) into the space of S")
    z = u + v
    w = tuple(p + q for p, q in zip(phi.apply(z), offset))
    pre = S.affine_preimage(phi.entries, offset)
    G = SetValuedMap(n_in, total - n_in, region.intersect(pre))
    if not region.contains(z) or not S.contains(w):
        raise NotInGraphError("(u, v) is not in the graph")
    image = Polyhedron(S.dim, (), tuple((r, 0) for r in _cokernel(phi))).translate(offset)
    qualified = (core_nonempty(image.intersect(S)) is not None
                 and (core_meets(pre, region) is not None or core_meets(region, pre) is not None))
    if strict and not qualified:
        raise QualificationError("constraint-system qualification fails")
    lhs = coderivative(G, u, v, h).set
    adj = phi.adjoint()
    gens = [adj.apply(g) for g in normal_cone(S, w).generators] + list(normal_cone(region, z).generators)
    rhs = _slice(Cone.from_generators(total, gens).hrep, n_in, h)
    if not poly_subset(rhs, lhs):
        raise TheoremViolation("constraint-system formula: right side not contained in the coderivative")
    equal = poly_subset(lhs, rhs)
    if qualified and not equal:
        raise TheoremViolation("constraint-system formula fails under its qualification")
    return RuleCheck(lhs, rhs, equal, qualified)


def _cokernel(M: LinearMap) -> list:
    return nullspace(M.adjoint().entries, M.rows)


def _split_witness(N1: Cone, N2: Cone, n: int, m: int, f, g):
    """``(g1, f1)`` with ``(f1, -g1) in N1`` and ``(f - f1, -(g - g1)) in N2``, or ``None``."""
    total = n + m
    A, b, E, d = [], [], [], []
    # variables (f1, g1); first block maps to (f1, -g1)
    for P, sign_f, sign_g, const in ((N1.hrep, 1, -1, None), (N2.hrep, -1, 1, tuple(f) + tuple(-x for x in g))):
        for rows, rhs, into_A in ((P.ineqs, None, True), (P.eqs, None, False)):
            for a, o in rows:
                coeff = [sign_f * a[i] for i in range(n)] + [sign_g * a[n + j] for j in range(m)]
                rhs_v = o - (sum((a[i] * const[i] for i in range(total)), Fraction(0)) if const else 0)
                (A if into_A else E).append(coeff)
                (b if into_A else d).append(rhs_v)
    r = lp.solve([Fraction(0)] * total, A, b, E, d, "max")
    if r.status == lp.INFEASIBLE:
        return None
    x = r.witness
    return x[n:], x[:n]


def intersection_rule_check(G1: SetValuedMap, G2: SetValuedMap, u: Sequence, v: Sequence, g: Sequence,
                            splits: int = 6, rng: random.Random | None = None, strict: bool = False) -> RuleCheck:
    """``D*(G1∩G2)(u,v)(g)`` against ``∪_{g1+g2=g} D*G1(u,v)(g1) + D*G2(u,v)(g2)``.

    ``⊇``: every sampled split's sum lies in the left side.  ``⊆``: each vertex,
    ray and line of the left side is decomposed by an LP into the two parts.
    ``details["witnesses"]`` holds ``(f, g1, f1)`` per decomposed vertex.
    """
    _same_shape(G1, G2)
    rng = rng or random.Random(0)
    u, v, g = vector(u), vector(v), vector(g)
    n, m = G1.n_in, G1.n_out
    both = G1.intersect(G2)
    N1, N2 = graph_normal_cone(G1, u, v), graph_normal_cone(G2, u, v)
    Nb = graph_normal_cone(both, u, v)
    qualified = core_meets(G1.graph, G2.graph) is not None
    if strict and not qualified:
        raise QualificationError("core(gph G1) does not meet gph G2")
    lhs = _slice(Nb.hrep, n, g)
    tried = [zeros(m), g] + [tuple(Fraction(rng.randint(-4, 4), rng.randint(1, 4)) for _ in range(m))
                             for _ in range(splits)]
    for g1 in tried:
        g2 = tuple(x - y for x, y in zip(g, g1))
        part = minkowski_sum(_slice(N1.hrep, n, g1), _slice(N2.hrep, n, g2))
        if not poly_subset(part, lhs):
            raise TheoremViolation(f"split {g1} + {g2} gives vectors outside the intersection coderivative")
    points, rays, lines = vrep(lhs)
    witnesses, missing = [], []
    for f in points:
        w = _split_witness(N1, N2, n, m, f, g)
        (witnesses.append((f,) + w) if w else missing.append(f))
    for r in rays + lines + [vneg(l) for l in lines]:
        if _split_witness(N1, N2, n, m, r, zeros(m)) is None:
            missing.append(r)
    equal = not missing
    if qualified and not equal:
        raise TheoremViolation("intersection rule: some generator of the left side has no split")
    rhs = _union_of_splits(N1, N2, n, m, g)
    return RuleCheck(lhs, rhs, equal, qualified, {"witnesses": witnesses, "missing": missing, "splits": tried})


def _union_of_splits(N1: Cone, N2: Cone, n: int, m: int, g) -> Polyhedron:
    """The union over splits, as the projection of ``{(f, f1, g1)}`` onto ``f``."""
    total = 2 * n + m
    A, E = [], []

    def lift(rows, first):
        out = []
        for a, o in rows:
            coeff = [Fraction(0)] * total
            const = Fraction(0)
            for i in range(n):
                if first:
                    coeff[n + i] += a[i]              # f1
                else:
                    coeff[i] += a[i]                  # f - f1
                    coeff[n + i] -= a[i]
            for j in range(m):
                if first:
                    coeff[2 * n + j] -= a[n + j]      # -g1
                else:
                    coeff[2 * n + j] += a[n + j]      # -(g - g1)
                    const -= a[n + j] * g[j]
            out.append((tuple(coeff), o - const))
        return out

    A = lift(N1.hrep.ineqs, True) + lift(N2.hrep.ineqs, False)
    E = lift(N1.hrep.eqs, True) + lift(N2.hrep.eqs, False)
    return project(Polyhedron(total, tuple(A), tuple(E)), range(n))
