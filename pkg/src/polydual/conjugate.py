"""Exact Fenchel conjugates of PL functions and the conjugate calculus rules.

The sum- and chain-rule witnesses come from the dual multipliers of a single
LP over the epigraphs involved: the multipliers split the functional exactly.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Sequence

from . import lp
from .errors import (ImproperError, InputError, NoPreimageError, QualificationError, TheoremViolation,
                     UnboundedError)
from .fm import vrep_to_hrep
from .functions import ConvexExpr, PLForm, epigraph, from_epigraph
from .geometry import core_meets, minkowski_sum
from .linalg import LinearMap, nullspace
from .polyhedron import Polyhedron, solve_lp
from .rational import INF, dot, vector, vsub, zeros


@dataclass(frozen=True)
class ConjugateWitness:
    """A split ``f = f1 + f2`` with the conjugate values at each part."""

    split: tuple
    values: tuple
    qualified: bool = True

    @property
    def total(self):
        return self.values[0] + self.values[1]


class ChainWitness(NamedTuple):
    """``s`` with ``A^T s = f`` attaining ``(phi o A)*(f) = phi*(s)``."""

    s: tuple
    value: Fraction
    qualified: bool


def support_function(P: Polyhedron, f: Sequence):
    """``sup_{u in P} f.u`` (``inf`` when unbounded)."""
    r = solve_lp(vector(f), "max", P)
    if r.status == lp.INFEASIBLE:
        raise InputError("support function of an empty set")
    return INF if r.status == lp.UNBOUNDED else r.value


def support_intersection_split(P1: Polyhedron, P2: Polyhedron, f: Sequence, strict: bool = False) -> ConjugateWitness:
    """``f1 + f2 = f`` with ``sigma_{P1 ∩ P2}(f) = sigma_P1(f1) + sigma_P2(f2)``.

    ``qualified`` records whether ``core(P1) ∩ P2`` is nonempty; with
    ``strict=True`` an unqualified instance raises instead.
    """
    f = vector(f)
    if P1.dim != P2.dim or len(f) != P1.dim:
        raise InputError("dimension mismatch")
    qualified = core_meets(P1, P2) is not None
    if strict and not qualified:
        raise QualificationError("core(P1) does not meet P2")
    n = P1.dim
    A = P1.A + P2.A
    b = P1.b + P2.b
    E = P1.E + P2.E
    d = P1.d + P2.d
    r = lp.solve(f, A, b, E, d, "max")
    if r.status == lp.INFEASIBLE:
        raise InputError("the sets do not intersect")
    if r.status == lp.UNBOUNDED:
        raise UnboundedError("f is outside the domain of the support function of the intersection")
    y, z = r.dual
    m1, e1 = len(P1.ineqs), len(P1.eqs)
    f1 = zeros(n)
    for k in range(m1):
        f1 = tuple(p + y[k] * v for p, v in zip(f1, A[k]))
    for k in range(e1):
        f1 = tuple(p + z[k] * v for p, v in zip(f1, E[k]))
    f2 = vsub(f, f1)
    values = (support_function(P1, f1), support_function(P2, f2))
    if values[0] + values[1] != r.value:
        raise TheoremViolation(f"split values {values} do not add up to {r.value}")
    return ConjugateWitness((f1, f2), values, qualified)


# -- conjugates ------------------------------------------------------------

def conjugate(f: ConvexExpr) -> ConvexExpr:
    """Exact conjugate ``s -> sup_x s.x - f(x)`` as a PL expression."""
    n = f.dim
    form = f.pl
    points = [a + (-b,) for a, b in form.pieces]
    rays = [a + (o,) for a, o in form.domain.ineqs] + [zeros(n) + (Fraction(1),)]
    lines = [a + (o,) for a, o in form.domain.eqs]
    return from_epigraph(vrep_to_hrep(n + 1, points, rays, lines))


def conjugate_value(f: ConvexExpr, s: Sequence):
    """``f*(s)`` by one LP over the epigraph (no conjugate is built)."""
    return conjugate_via_epigraph(f, s)


def conjugate_via_epigraph(f: ConvexExpr, s: Sequence):
    """``sigma_{epi f}(s, -1)``."""
    s = vector(s)
    if len(s) != f.dim:
        raise InputError(f"dual point of length {len(s)} for a function on R^{f.dim}")
    return support_function(epigraph(f), s + (Fraction(-1),))


def _epi_rows(form: PLForm, x_cols: int, x_map, t_col: int | None, width: int):
    """Rows of ``(M x, t) in epi`` embedded in a variable vector of length ``width``.

    ``x_map(a)`` pulls a slope on the function's space back to the ``x_cols``
    leading variables.  Returns ``(A, b, E, d, normals_i, normals_e)`` where the
    normals are the rows in the function's own space (for recombining duals).
    """
    A, b, E, d, ni, ne = [], [], [], [], [], []

    def place(coeffs, tcoef):
        row = [Fraction(0)] * width
        row[:x_cols] = coeffs
        if t_col is not None:
            row[t_col] = tcoef
        return row

    for a, o in form.pieces:
        A.append(place(x_map(a), Fraction(-1)))
        b.append(-o)
        ni.append(a)
    for a, o in form.domain.ineqs:
        A.append(place(x_map(a), Fraction(0)))
        b.append(o)
        ni.append(a)
    for a, o in form.domain.eqs:
        E.append(place(x_map(a), Fraction(0)))
        d.append(o)
        ne.append(a)
    return A, b, E, d, ni, ne


def _combine(y, normals, n):
    acc = [Fraction(0)] * n
    for w, a in zip(y, normals):
        if w:
            for i, v in enumerate(a):
                acc[i] += w * v
    return tuple(acc)


def conjugate_sum_split(phi1: ConvexExpr, phi2: ConvexExpr, f: Sequence, strict: bool = False) -> ConjugateWitness:
    """Witness ``(f1, f2)`` for ``(phi1 + phi2)*(f) = phi1*(f1) + phi2*(f2)``.

    ``qualified`` records ``core(dom phi1) ∩ dom phi2 ≠ ∅``; ``strict=True``
    raises :class:`QualificationError` when it fails.
    """
    f = vector(f)
    n = phi1.dim
    if phi2.dim != n or len(f) != n:
        raise InputError("dimension mismatch")
    qualified = core_meets(phi1.domain, phi2.domain) is not None
    if strict and not qualified:
        raise QualificationError("core(dom phi1) does not meet dom phi2")
    width = n + 2
    ident = lambda a: list(a)  # noqa: E731
    A1, b1, E1, d1, ni1, ne1 = _epi_rows(phi1.pl, n, ident, n, width)
    A2, b2, E2, d2, ni2, ne2 = _epi_rows(phi2.pl, n, ident, n + 1, width)
    c = list(f) + [Fraction(-1), Fraction(-1)]
    r = lp.solve(c, A1 + A2, b1 + b2, E1 + E2, d1 + d2, "max")
    if r.status == lp.INFEASIBLE:
        raise ImproperError("dom phi1 and dom phi2 do not meet")
    if r.status == lp.UNBOUNDED:
        raise UnboundedError("f is outside dom (phi1 + phi2)*")
    y, z = r.dual
    m1, e1 = len(A1), len(E1)
    f1 = tuple(p + q for p, q in zip(_combine(y[:m1], ni1, n), _combine(z[:e1], ne1, n)))
    f2 = vsub(f, f1)
    values = (conjugate_via_epigraph(phi1, f1), conjugate_via_epigraph(phi2, f2))
    if values[0] + values[1] != r.value:
        raise TheoremViolation(f"split values {values} do not add up to {r.value}")
    return ConjugateWitness((f1, f2), values, qualified)


def range_polyhedron(A: LinearMap) -> Polyhedron:
    """``A X`` as an H-rep in ``R^rows``."""
    null_adj = nullspace(A.adjoint().entries, A.rows)
    return Polyhedron(A.rows, (), tuple((w, 0) for w in null_adj))


def conjugate_chain_witness(phi: ConvexExpr, A: LinearMap, f: Sequence, strict: bool = False):
    """Witness ``s`` with ``A^T s = f`` and ``(phi o A)*(f) = phi*(s)``.

    The qualification ``A X ∩ core(dom phi) ≠ ∅`` is recorded in the result;
    with ``strict=True`` its failure raises :class:`QualificationError`.
    """
    f = vector(f)
    if A.rows != phi.dim or len(f) != A.cols:
        raise InputError("dimension mismatch")
    qualified = core_meets(phi.domain, range_polyhedron(A)) is not None
    if strict and not qualified:
        raise QualificationError("A X does not meet core(dom phi)")
    n, m = A.cols, A.rows
    adj = A.adjoint()
    width = n + 1
    pull = lambda a: list(adj.apply(a))  # noqa: E731
    Ai, bi, Ei, di, ni, ne = _epi_rows(phi.pl, n, pull, n, width)
    c = list(f) + [Fraction(-1)]
    r = lp.solve(c, Ai, bi, Ei, di, "max")
    if r.status == lp.INFEASIBLE:
        raise ImproperError("phi o A has an empty domain")
    if r.status == lp.UNBOUNDED:
        basis = nullspace(A.entries, n)
        if any(dot(v, f) != 0 for v in basis):
            raise NoPreimageError("f is not in the range of the adjoint")
        raise UnboundedError("f is outside dom (phi o A)*")
    y, z = r.dual
    s = tuple(p + q for p, q in zip(_combine(y, ni, m), _combine(z, ne, m)))
    if adj.apply(s) != f:
        raise TheoremViolation("multipliers do not give a preimage of f")
    value = conjugate_via_epigraph(phi, s)
    if value != r.value:
        raise TheoremViolation(f"phi*(s) = {value} differs from (phi o A)*(f) = {r.value}")
    return ChainWitness(s, value, qualified)


def inf_convolution(phi1: ConvexExpr, phi2: ConvexExpr) -> ConvexExpr:
    """``x -> inf_{u + v = x} phi1(u) + phi2(v)``, whose epigraph is ``epi phi1 + epi phi2``."""
    if phi1.dim != phi2.dim:
        raise InputError("dimension mismatch")
    return from_epigraph(minkowski_sum(epigraph(phi1), epigraph(phi2)))


__all__ = [
    "ChainWitness", "ConjugateWitness", "conjugate", "conjugate_chain_witness", "conjugate_sum_split", "conjugate_value",
    "conjugate_via_epigraph", "inf_convolution", "range_polyhedron", "support_function",
    "support_intersection_split",
]
