"""Convex piecewise-linear functions as immutable expression trees.

Every node denotes a proper convex function ``R^dim -> R ∪ {+inf}``.  Each
node knows how to evaluate itself exactly and how to lower itself to a
*PL normal form*: a finite list of affine pieces ``(slope, intercept)`` plus a
polyhedral domain, with ``f(x) = max_i slope_i.x + intercept_i`` on the
domain and ``+inf`` off it.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Sequence

from gmpy2 import mpq

from . import lp
from .errors import ImproperError, InputError
from .geometry import core_nonempty
from .linalg import LinearMap
from .polyhedron import Polyhedron, prune
from .rational import INF, dot, rational, to_mpq, vadd, vector, vscale, zeros


@dataclass(frozen=True)
class PLForm:
    pieces: tuple        # ((slope, intercept), ...), at least one
    domain: Polyhedron

    @property
    def dim(self) -> int:
        return self.domain.dim

    def eval(self, x) -> Fraction | float:
        if not self.domain.contains(x):
            return INF
        return max(dot(a, x) + b for a, b in self.pieces)


def _prune_pieces(pieces, domain: Polyhedron) -> tuple:
    """Remove pieces that never attain the max on ``domain``."""
    best = {}
    for a, b in pieces:
        if a not in best or b > best[a]:
            best[a] = b
    pieces = list(best.items())
    if len(pieces) == 1:
        return tuple(pieces)
    n = domain.dim
    dom_A = [to_mpq(a) + [mpq(0)] for a in domain.A]
    dom_E = [to_mpq(a) + [mpq(0)] for a in domain.E]
    dom_b, dom_d = to_mpq(domain.b), to_mpq(domain.d)
    rows = [(to_mpq(a) + [mpq(-1)], -mpq(b)) for a, b in pieces]
    keep = list(range(len(pieces)))
    i = 0
    while i < len(keep) and len(keep) > 1:
        k = keep[i]
        rest = keep[:i] + keep[i + 1:]
        # max over (x, t) of piece_k(x) - t with t >= every other piece
        A = [rows[j][0] for j in rest] + dom_A
        b = [rows[j][1] for j in rest] + dom_b
        c = to_mpq(pieces[k][0]) + [mpq(-1)]
        status, _, val, *_ = lp.solve_mpq(c, A, b, dom_E, dom_d, "max")
        if status == lp.OPTIMAL and val + mpq(pieces[k][1]) <= 0:
            keep = rest
        else:
            i += 1
    return tuple(sorted(pieces[j] for j in keep))


class ConvexExpr:
    """Base class of the expression nodes."""

    dim: int

    def eval(self, x: Sequence) -> Fraction | float:
        x = vector(x)
        if len(x) != self.dim:
            raise InputError(f"point of length {len(x)} for a function on R^{self.dim}")
        return self._eval(x)

    __call__ = eval

    def _eval(self, x):
        raise NotImplementedError

    @cached_property
    def domain(self) -> Polyhedron:
        return prune(self._domain())

    def _domain(self) -> Polyhedron:
        raise NotImplementedError

    def _raw_pieces(self) -> list:
        raise NotImplementedError

    @cached_property
    def pl(self) -> PLForm:
        dom = self.domain
        return PLForm(_prune_pieces(self._raw_pieces(), dom), dom)

    def _check_proper(self):
        if self._domain().is_empty():
            raise ImproperError(f"{type(self).__name__} has an empty domain")

    def __add__(self, other: "ConvexExpr") -> "ConvexExpr":
        return Sum(self, other)


@dataclass(frozen=True, eq=False)
class Affine(ConvexExpr):
    slope: tuple
    offset: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "slope", vector(self.slope))
        object.__setattr__(self, "offset", rational(self.offset))
        if not self.slope:
            raise InputError("affine function needs a positive dimension")

    @property
    def dim(self):
        return len(self.slope)

    def _eval(self, x):
        return dot(self.slope, x) + self.offset

    def _domain(self):
        return Polyhedron.universe(self.dim)

    def _raw_pieces(self):
        return [(self.slope, self.offset)]


@dataclass(frozen=True, eq=False)
class MaxAffine(ConvexExpr):
    pieces: tuple

    def __post_init__(self):
        pieces = tuple((vector(a), rational(b)) for a, b in self.pieces)
        if not pieces:
            raise InputError("max-affine function needs at least one piece")
        n = len(pieces[0][0])
        if n == 0 or any(len(a) != n for a, _ in pieces):
            raise InputError("max-affine pieces have inconsistent slope lengths")
        object.__setattr__(self, "pieces", pieces)

    @property
    def dim(self):
        return len(self.pieces[0][0])

    def _eval(self, x):
        return max(dot(a, x) + b for a, b in self.pieces)

    def _domain(self):
        return Polyhedron.universe(self.dim)

    def _raw_pieces(self):
        return list(self.pieces)


@dataclass(frozen=True, eq=False)
class Indicator(ConvexExpr):
    set: Polyhedron

    def __post_init__(self):
        if self.set.dim == 0:
            raise InputError("indicator of a set in R^0")
        self._check_proper()

    @property
    def dim(self):
        return self.set.dim

    def _eval(self, x):
        return Fraction(0) if self.set.contains(x) else INF

    def _domain(self):
        return self.set

    def _raw_pieces(self):
        return [(zeros(self.dim), Fraction(0))]


@dataclass(frozen=True, eq=False)
class Sum(ConvexExpr):
    left: ConvexExpr
    right: ConvexExpr

    def __post_init__(self):
        if self.left.dim != self.right.dim:
            raise InputError(f"cannot add functions on R^{self.left.dim} and R^{self.right.dim}")
        self._check_proper()

    @property
    def dim(self):
        return self.left.dim

    def _eval(self, x):
        return self.left._eval(x) + self.right._eval(x)

    def _domain(self):
        return self.left.domain.intersect(self.right.domain)

    def _raw_pieces(self):
        return [(vadd(a, c), b + d) for a, b in self.left.pl.pieces for c, d in self.right.pl.pieces]


@dataclass(frozen=True, eq=False)
class Max(ConvexExpr):
    children: tuple

    def __post_init__(self):
        object.__setattr__(self, "children", tuple(self.children))
        if not self.children:
            raise InputError("max of no functions")
        n = self.children[0].dim
        if any(c.dim != n for c in self.children):
            raise InputError("max of functions on different spaces")
        self._check_proper()

    @property
    def dim(self):
        return self.children[0].dim

    def _eval(self, x):
        return max(c._eval(x) for c in self.children)

    def _domain(self):
        dom = self.children[0].domain
        for c in self.children[1:]:
            dom = dom.intersect(c.domain)
        return dom

    def _raw_pieces(self):
        return [p for c in self.children for p in c.pl.pieces]


@dataclass(frozen=True, eq=False)
class PreComposeLinear(ConvexExpr):
    """``x -> inner(M x)`` for a map ``M : R^cols -> R^rows``."""

    inner: ConvexExpr
    map: LinearMap

    def __post_init__(self):
        if self.map.rows != self.inner.dim:
            raise InputError(f"map into R^{self.map.rows} composed with a function on R^{self.inner.dim}")
        self._check_proper()

    @property
    def dim(self):
        return self.map.cols

    def _eval(self, x):
        return self.inner._eval(self.map.apply(x))

    def _domain(self):
        return self.inner.domain.affine_preimage(self.map.entries)

    def _raw_pieces(self):
        adj = self.map.adjoint()
        return [(adj.apply(a), b) for a, b in self.inner.pl.pieces]


@dataclass(frozen=True, eq=False)
class ScaleNonneg(ConvexExpr):
    """``factor * inner``; a zero factor gives the indicator of ``dom inner``."""

    factor: Fraction
    inner: ConvexExpr

    def __post_init__(self):
        object.__setattr__(self, "factor", rational(self.factor))
        if self.factor < 0:
            raise InputError(f"negative scaling factor {self.factor}")

    @property
    def dim(self):
        return self.inner.dim

    def _eval(self, x):
        v = self.inner._eval(x)
        if v == INF:
            return INF
        return self.factor * v

    def _domain(self):
        return self.inner.domain

    def _raw_pieces(self):
        if self.factor == 0:
            return [(zeros(self.dim), Fraction(0))]
        return [(vscale(self.factor, a), self.factor * b) for a, b in self.inner.pl.pieces]


# -- module-level operations -----------------------------------------------

def evaluate(f: ConvexExpr, x: Sequence):
    return f.eval(x)


def domain(f: ConvexExpr) -> Polyhedron:
    return f.domain


def epigraph_of(form: PLForm) -> Polyhedron:
    n = form.dim
    rows = [(a + (Fraction(-1),), -b) for a, b in form.pieces]
    rows += [(a + (Fraction(0),), o) for a, o in form.domain.ineqs]
    eqs = [(a + (Fraction(0),), o) for a, o in form.domain.eqs]
    return Polyhedron(n + 1, tuple(rows), tuple(eqs))


def epigraph(f: ConvexExpr) -> Polyhedron:
    """``{(x, t) : t >= f(x)}`` in ``R^(dim+1)``."""
    return epigraph_of(f.pl)


def epigraph_core_witness(f: ConvexExpr):
    """``(x, f(x) + 1)`` for some ``x`` in the core of the domain, or ``None``."""
    x = core_nonempty(f.domain)
    if x is None:
        return None
    return x + (f.eval(x) + 1,)


def from_pl(pieces, dom: Polyhedron) -> ConvexExpr:
    """Simplest expression for the PL function with the given pieces and domain."""
    pieces = tuple(pieces)
    body = None
    if not (len(pieces) == 1 and not any(pieces[0][0]) and pieces[0][1] == 0):
        body = Affine(*pieces[0]) if len(pieces) == 1 else MaxAffine(pieces)
    if dom.ineqs or dom.eqs:
        ind = Indicator(dom)
        return ind if body is None else Sum(body, ind)
    return body if body is not None else Affine(zeros(dom.dim), 0)


def normalize(f: ConvexExpr) -> ConvexExpr:
    """Lower ``f`` to a max-affine body plus an indicator of its domain."""
    return from_pl(f.pl.pieces, f.pl.domain)


def from_epigraph(E: Polyhedron) -> ConvexExpr:
    """Read a PL function back from an H-rep of its epigraph in ``R^(n+1)``.

    Rows with a negative last coefficient become pieces, the others the domain.
    Raises :class:`ImproperError` when the set is empty or not bounded below in ``t``.
    """
    n = E.dim - 1
    if E.is_empty():
        raise ImproperError("empty epigraph")
    pieces, dom_rows, dom_eqs = [], [], []
    for a, o in E.ineqs:
        beta = a[-1]
        if beta < 0:
            pieces.append((tuple(v / -beta for v in a[:-1]), -o / -beta))
        elif beta == 0:
            dom_rows.append((a[:-1], o))
        else:
            raise ImproperError("set is not an epigraph (bounded above in t)")
    for a, o in E.eqs:
        if a[-1] != 0:
            raise ImproperError("set is not an epigraph (t is pinned by an equality)")
        dom_eqs.append((a[:-1], o))
    if not pieces:
        raise ImproperError("function is unbounded below")
    dom = Polyhedron(n, tuple(dom_rows), tuple(dom_eqs))
    return from_pl(pieces, dom)


def zero_function(n: int) -> Affine:
    return Affine(zeros(n), 0)


def minimize(f: ConvexExpr, over: Polyhedron | None = None):
    """``(inf f over set, minimizer)``; the minimizer is ``None`` unless attained."""
    E = epigraph(f)
    if over is not None:
        E = E.intersect(over.embed(f.dim + 1, range(f.dim)))
    r = E.lp(zeros(f.dim) + (Fraction(1),), "min")
    if r.status == lp.INFEASIBLE:
        return INF, None
    if r.status == lp.UNBOUNDED:
        return -INF, None
    return r.value, r.witness[:-1]
