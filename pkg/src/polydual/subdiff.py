"""Exact subdifferentials of PL functions, and the max and sum rules.

:func:`subdifferential` applies calculus rules node by node, while
:func:`subdifferential_direct` slices the normal cone of the epigraph.  The
two are computed independently so each can check the other.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import InputError, NotInDomainError, QualificationError
from .fm import vrep_to_hrep
from .functions import (Affine, ConvexExpr, Indicator, Max, MaxAffine, PreComposeLinear, ScaleNonneg, Sum,
                        epigraph)
from .geometry import core_meets, core_membership, linear_image, minkowski_sum, normal_cone, vrep
from .polyhedron import Polyhedron
from .rational import INF, dot, vector


@dataclass(frozen=True)
class Subdifferential:
    """A subdifferential as an H-rep in the dual space.

    ``verified`` is False when a calculus rule was applied without its
    qualification, in which case only the inclusion ``set ⊆ ∂f(x)`` is guaranteed.
    """

    set: Polyhedron
    verified: bool = True

    def contains(self, s: Sequence) -> bool:
        return self.set.contains(s)

    @property
    def dim(self) -> int:
        return self.set.dim


def _require_domain(f: ConvexExpr, x):
    x = vector(x)
    if len(x) != f.dim:
        raise InputError(f"point of length {len(x)} for a function on R^{f.dim}")
    if f.eval(x) == INF:
        raise NotInDomainError(f"{x} is outside the domain")
    return x


def _hull(points, dim) -> Polyhedron:
    return vrep_to_hrep(dim, points)


def _rule(f: ConvexExpr, x) -> Polyhedron:
    if isinstance(f, Affine):
        return Polyhedron.point(f.slope)
    if isinstance(f, MaxAffine):
        v = f.eval(x)
        return _hull([a for a, b in f.pieces if dot(a, x) + b == v], f.dim)
    if isinstance(f, Indicator):
        return normal_cone(f.set, x).hrep
    if isinstance(f, Sum):
        return minkowski_sum(_rule(f.left, x), _rule(f.right, x))
    if isinstance(f, PreComposeLinear):
        inner = _rule(f.inner, f.map.apply(x))
        return linear_image(inner, f.map.adjoint())
    if isinstance(f, ScaleNonneg):
        if f.factor == 0:
            return normal_cone(f.inner.domain, x).hrep
        inner = _rule(f.inner, x)
        return Polyhedron(inner.dim, tuple((a, f.factor * o) for a, o in inner.ineqs),
                          tuple((a, f.factor * o) for a, o in inner.eqs))
    if isinstance(f, Max):
        return subdifferential_direct(f, x).set
    raise InputError(f"unsupported expression node {type(f).__name__}")


def subdifferential(f: ConvexExpr, x: Sequence) -> Subdifferential:
    """``∂f(x)`` by node-wise calculus rules (exact for polyhedral data)."""
    x = _require_domain(f, x)
    return Subdifferential(_rule(f, x))


def subdifferential_direct(f: ConvexExpr, x: Sequence) -> Subdifferential:
    """``{s : (s, -1) in N((x, f(x)); epi f)}``, from the epigraph alone."""
    x = _require_domain(f, x)
    n = f.dim
    cone = normal_cone(epigraph(f), x + (f.eval(x),))
    return Subdifferential(cone.hrep.fix(n, Fraction(-1)))


def active_indices(functions: Sequence[ConvexExpr], x) -> list[int]:
    values = [g.eval(x) for g in functions]
    top = max(values)
    return [i for i, v in enumerate(values) if v == top]


def max_rule(functions: Sequence[ConvexExpr], x: Sequence, strict: bool = False) -> Subdifferential:
    """``co(∪_{i active} ∂f_i(x))``.

    Equal to ``∂max_i f_i(x)`` when ``x`` is in the core of every domain;
    otherwise the result is flagged unverified (only ``⊆`` holds), or
    :class:`QualificationError` is raised when ``strict``.
    """
    functions = list(functions)
    if not functions:
        raise InputError("max rule needs at least one function")
    x = vector(x)
    for g in functions:
        _require_domain(g, x)
    qualified = all(core_membership(g.domain, x) for g in functions)
    if strict and not qualified:
        raise QualificationError("x is not in the core of every domain")
    n = functions[0].dim
    points, rays, lines = [], [], []
    for i in active_indices(functions, x):
        p, r, l = vrep(subdifferential(functions[i], x).set)
        points += p
        rays += r
        lines += l
    return Subdifferential(vrep_to_hrep(n, points, rays, lines), qualified)


def sum_rule(phi1: ConvexExpr, phi2: ConvexExpr, x: Sequence, strict: bool = False) -> Subdifferential:
    """``∂phi1(x) + ∂phi2(x)``, verified under ``core(dom phi1) ∩ dom phi2 ≠ ∅`` or its mirror."""
    x = _require_domain(phi1, x)
    _require_domain(phi2, x)
    qualified = (core_meets(phi1.domain, phi2.domain) is not None
                 or core_meets(phi2.domain, phi1.domain) is not None)
    if strict and not qualified:
        raise QualificationError("neither domain's core meets the other domain")
    return Subdifferential(minkowski_sum(subdifferential(phi1, x).set, subdifferential(phi2, x).set), qualified)
