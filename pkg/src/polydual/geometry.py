"""Cones, interiors, normal cones, separation and set comparison for polyhedra."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Sequence

from gmpy2 import mpq

from . import lp
from .errors import InputError
from .fm import project, vrep_to_hrep
from .linalg import LinearMap, nullspace, rank
from .polyhedron import Polyhedron, canonical, prune, relative_interior_point, solve_lp
from .rational import dot, from_mpq, is_zero, primitive, to_mpq, unit, vector, vneg, zeros


class NotInSet:
    """Marker returned instead of a normal cone at a point outside the set."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "NOT_IN_SET"

    def __bool__(self):
        return False


NOT_IN_SET = NotInSet()


@dataclass(frozen=True, eq=False)
class Cone:
    """Polyhedral cone, stored as generators, as an H-rep with zero offsets, or both."""

    dim: int
    _generators: tuple | None = None
    _hrep: Polyhedron | None = None

    @classmethod
    def from_generators(cls, dim: int, generators: Sequence[Sequence]) -> "Cone":
        gens = []
        for g in generators:
            g = vector(g)
            if len(g) != dim:
                raise InputError(f"generator of length {len(g)} for a cone in R^{dim}")
            if not is_zero(g):
                gens.append(primitive(g))
        return cls(dim, tuple(dict.fromkeys(gens)))

    @classmethod
    def from_hrep(cls, P: Polyhedron) -> "Cone":
        if any(o != 0 for _, o in P.ineqs + P.eqs):
            raise InputError("cone H-representation must have zero offsets")
        return cls(P.dim, None, P)

    @classmethod
    def orthant(cls, m: int) -> "Cone":
        return cls.from_generators(m, [unit(m, i) for i in range(m)])

    @classmethod
    def zero(cls, m: int) -> "Cone":
        return cls(m, ())

    @classmethod
    def whole(cls, m: int) -> "Cone":
        return cls.from_hrep(Polyhedron.universe(m))

    @cached_property
    def hrep(self) -> Polyhedron:
        if self._hrep is not None:
            return self._hrep
        return vrep_to_hrep(self.dim, [zeros(self.dim)], self._generators)

    @cached_property
    def generators(self) -> tuple:
        """Conic generators; a lineality direction appears with both signs."""
        if self._generators is not None:
            return self._generators
        H = self._hrep
        if H.is_trivially_empty():
            raise InputError("cone H-representation describes the empty set")
        # C = polar(polar(C)); polar(C) = cone(a_i) + span(e_j)
        polar = vrep_to_hrep(self.dim, [zeros(self.dim)], H.A, H.E)
        gens = [a for a, _ in polar.ineqs]
        for a, _ in polar.eqs:
            gens += [a, vneg(a)]
        return tuple(dict.fromkeys(primitive(g) for g in gens))

    def contains(self, v: Sequence) -> bool:
        return self.hrep.contains(v)

    def is_pointed(self) -> bool:
        return not nullspace([a for a, _ in self.hrep.ineqs + self.hrep.eqs], self.dim)

    def __add__(self, other: "Cone") -> "Cone":
        if other.dim != self.dim:
            raise InputError("cones of different dimension")
        return Cone.from_generators(self.dim, self.generators + other.generators)

    def __repr__(self):
        from .rational import fmt_vec
        if self._generators is not None:
            return f"Cone(dim={self.dim}; " + ", ".join(fmt_vec(g) for g in self._generators) + ")"
        return f"Cone(dim={self.dim}; hrep={self._hrep!r})"


# -- interiors --------------------------------------------------------------

def _check(P: Polyhedron, x):
    x = vector(x)
    if len(x) != P.dim:
        raise InputError(f"point of length {len(x)} for a polyhedron of dimension {P.dim}")
    return x


def core_membership(P: Polyhedron, x: Sequence) -> bool:
    """Whether ``x`` lies in the core (= interior in R^n) of ``P``."""
    x = _check(P, x)
    if P.eqs:
        return False
    return all(dot(a, x) < o for a, o in P.ineqs)


def max_step(P: Polyhedron, x: Sequence, v: Sequence):
    """Largest ``t >= 0`` with ``x + s v`` in ``P`` for all ``s`` in ``[0, t]`` (``inf`` if unbounded)."""
    x, v = _check(P, x), vector(v)
    if not P.contains(x):
        return Fraction(-1)
    if any(dot(a, v) != 0 for a, _ in P.eqs):
        return Fraction(0)
    t = float("inf")
    for a, o in P.ineqs:
        av = dot(a, v)
        if av > 0:
            t = min(t, (o - dot(a, x)) / av)
    return t


def core_membership_by_directions(P: Polyhedron, x: Sequence, directions: Sequence = ()) -> bool:
    """Core test from the definition: every direction admits a positive step inside ``P``.

    The coordinate directions and their negatives are always tried; for a
    polyhedron they already decide membership, extra directions only add checks.
    """
    n = P.dim
    dirs = [unit(n, i) for i in range(n)] + [vneg(unit(n, i)) for i in range(n)] + [vector(v) for v in directions]
    return all(max_step(P, x, v) > 0 for v in dirs)


def core_nonempty(P: Polyhedron):
    """A point of ``core(P)`` from the slack LP, or ``None`` if the core is empty."""
    return core_meets(P, Polyhedron.universe(P.dim))


def core_meets(P: Polyhedron, Q: Polyhedron):
    """A point of ``core(P) ∩ Q``, or ``None``."""
    if P.dim != Q.dim:
        raise InputError("polyhedra of different dimension")
    if P.eqs or P.is_trivially_empty():
        return None
    n = P.dim
    one, zero = mpq(1), mpq(0)
    A = [to_mpq(a) + [one] for a, _ in P.ineqs] + [to_mpq(a) + [zero] for a, _ in Q.ineqs]
    A.append([zero] * n + [one])
    b = to_mpq(P.b) + to_mpq(Q.b) + [one]
    E = [to_mpq(a) + [zero] for a in Q.E]
    status, x, value, *_ = lp.solve_mpq([zero] * n + [one], A, b, E, to_mpq(Q.d), "max")
    if status != lp.OPTIMAL or value <= 0:
        return None
    return from_mpq(x[:n])


# -- cones -------------------------------------------------------------------

def normal_cone(P: Polyhedron, x: Sequence):
    """``N(x; P)``, or :data:`NOT_IN_SET` when ``x`` is outside ``P``."""
    x = _check(P, x)
    if not P.contains(x):
        return NOT_IN_SET
    gens = [a for a, o in P.ineqs if dot(a, x) == o]
    for a, _ in P.eqs:
        gens += [a, vneg(a)]
    return Cone.from_generators(P.dim, gens)


def dual_cone(C: Cone) -> Cone:
    """``{f : f.c >= 0 for all c in C}``."""
    return Cone.from_hrep(Polyhedron(C.dim, tuple((vneg(g), 0) for g in C.generators)))


def polar_cone(C: Cone) -> Cone:
    """``{f : f.c <= 0 for all c in C}``."""
    return Cone.from_hrep(Polyhedron(C.dim, tuple((g, 0) for g in C.generators)))


def cone_is_generating(C: Cone, m: int) -> bool:
    if C.dim != m:
        raise InputError(f"cone lives in R^{C.dim}, not R^{m}")
    return rank(C.generators) == m if C.generators else m == 0


# -- comparison ------------------------------------------------------------

def poly_subset(P: Polyhedron, Q: Polyhedron) -> bool:
    """``P ⊆ Q``, checked by maximizing each row of ``Q`` over ``P``."""
    if P.dim != Q.dim:
        raise InputError(f"cannot compare polyhedra of dimension {P.dim} and {Q.dim}")
    if P.is_empty():
        return True
    for a, o in Q.ineqs:
        r = solve_lp(a, "max", P)
        if not r.optimal or r.value > o:
            return False
    for a, o in Q.eqs:
        for sense in ("max", "min"):
            r = solve_lp(a, sense, P)
            if not r.optimal or r.value != o:
                return False
    return True


def as_polyhedron(S) -> Polyhedron:
    if isinstance(S, Cone):
        return S.hrep
    if isinstance(S, NotInSet):
        raise InputError("NOT_IN_SET has no polyhedral representation")
    return S


def poly_equal(P, Q) -> bool:
    """Set equality by mutual inclusion (cones are compared through their H-rep)."""
    P, Q = as_polyhedron(P), as_polyhedron(Q)
    return poly_subset(P, Q) and poly_subset(Q, P)


# -- separation ------------------------------------------------------------

def separate_properly(P: Polyhedron, Q: Polyhedron):
    """Functional ``g`` and bound ``sup_P g`` with ``sup_P g <= inf_Q g`` and ``inf_P g < sup_Q g``.

    Returns ``None`` if no such ``g`` exists.
    """
    if P.dim != Q.dim:
        raise InputError("polyhedra of different dimension")
    p0, q0 = relative_interior_point(P), relative_interior_point(Q)
    if p0 is None or q0 is None:
        raise InputError("proper separation needs two nonempty sets")
    n = P.dim
    mP, eP, mQ, eQ = len(P.ineqs), len(P.eqs), len(Q.ineqs), len(Q.eqs)
    nv = n + mP + eP + mQ + eQ
    zero, one = mpq(0), mpq(1)
    oP, oQ = n, n + mP + eP

    def row():
        return [zero] * nv

    E, d = [], []
    for i in range(n):
        r = row()
        r[i] = -one
        for k, (a, _) in enumerate(P.ineqs + P.eqs):
            r[oP + k] = mpq(a[i])
        E.append(r)
        d.append(zero)
        r = row()
        r[i] = one
        for k, (a, _) in enumerate(Q.ineqs + Q.eqs):
            r[oQ + k] = mpq(a[i])
        E.append(r)
        d.append(zero)
    A, b = [], []
    r = row()
    for k, (_, o) in enumerate(P.ineqs + P.eqs):
        r[oP + k] = mpq(o)
    for k, (_, o) in enumerate(Q.ineqs + Q.eqs):
        r[oQ + k] = mpq(o)
    A.append(r)
    b.append(zero)
    for i in range(n):
        r = row()
        r[i] = one
        A.append(r)
        b.append(one)
        r = row()
        r[i] = -one
        A.append(r)
        b.append(one)
    for k in list(range(oP, oP + mP)) + list(range(oQ, oQ + mQ)):
        r = row()
        r[k] = -one
        A.append(r)
        b.append(zero)
    c = row()
    for i in range(n):
        c[i] = mpq(q0[i] - p0[i])
    status, x, value, *_ = lp.solve_mpq(c, A, b, E, d, "max")
    if status != lp.OPTIMAL or value <= 0:
        return None
    g = from_mpq(x[:n])
    return g, solve_lp(g, "max", P).value


# -- derived constructions --------------------------------------------------

def minkowski_sum(P: Polyhedron, Q: Polyhedron) -> Polyhedron:
    """``P + Q`` by projecting ``{(x, y, z) : x = y + z, y in P, z in Q}``."""
    if P.dim != Q.dim:
        raise InputError("polyhedra of different dimension")
    n = P.dim
    lifted = Polyhedron.universe(n).product(P).product(Q)
    eqs = []
    for i in range(n):
        e = [Fraction(0)] * (3 * n)
        e[i], e[n + i], e[2 * n + i] = Fraction(1), Fraction(-1), Fraction(-1)
        eqs.append((tuple(e), 0))
    return project(Polyhedron(3 * n, lifted.ineqs, lifted.eqs + tuple(eqs)), range(n))


def linear_image(P: Polyhedron, M: LinearMap) -> Polyhedron:
    """``{M x : x in P}``."""
    if M.cols != P.dim:
        raise InputError("map and polyhedron dimensions differ")
    m, n = M.rows, M.cols
    lifted = Polyhedron.universe(m).product(P)
    eqs = []
    for i in range(m):
        e = [Fraction(0)] * (m + n)
        e[i] = Fraction(-1)
        for j in range(n):
            e[m + j] = M.entries[i][j]
        eqs.append((tuple(e), 0))
    return project(Polyhedron(m + n, lifted.ineqs, lifted.eqs + tuple(eqs)), range(m))


def vrep(P: Polyhedron) -> tuple[list, list, list]:
    """``(points, rays, lines)`` with ``P = conv(points) + cone(rays) + span(lines)``.

    Built from the homogenized cone ``{(x, s) : A x <= b s, E x = d s, s >= 0}``;
    meant for small dimensions.  An empty ``P`` gives three empty lists.
    """
    n = P.dim
    rows = [(a + (-o,), 0) for a, o in P.ineqs] + [((Fraction(0),) * n + (Fraction(-1),), 0)]
    eqs = [(a + (-o,), 0) for a, o in P.eqs]
    H = Polyhedron(n + 1, tuple(rows), tuple(eqs))
    polar = vrep_to_hrep(n + 1, [zeros(n + 1)], H.A, H.E)
    points, rays, lines = [], [], []
    for a, _ in polar.ineqs:
        if a[-1] > 0:
            points.append(tuple(v / a[-1] for v in a[:-1]))
        else:
            rays.append(primitive(a[:-1]))
    for a, _ in polar.eqs:
        if a[-1] != 0:
            raise AssertionError("lineality of the homogenized cone must have s = 0")
        lines.append(primitive(a[:-1]))
    if not points:
        return [], [], []
    return points, rays, lines


def vertices(P: Polyhedron) -> list:
    return vrep(P)[0]


__all__ = [
    "Cone", "NOT_IN_SET", "NotInSet", "as_polyhedron", "canonical", "cone_is_generating", "core_meets",
    "core_membership", "core_membership_by_directions", "core_nonempty", "dual_cone", "linear_image",
    "max_step", "minkowski_sum", "normal_cone", "polar_cone", "poly_equal", "poly_subset", "project", "prune",
    "separate_properly", "vertices", "vrep",
]
