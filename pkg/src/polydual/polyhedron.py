"""H-represented polyhedra ``{x : A x <= b, E x = d}`` over exact rationals."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

from gmpy2 import mpq

from . import lp
from .errors import InputError
from .linalg import echelon
from .rational import dot, from_mpq, primitive, rational, to_mpq, vector, zeros

Row = tuple  # (normal: tuple[Fraction, ...], offset: Fraction)


def _row(normal, offset, dim) -> Row:
    a = vector(normal)
    if len(a) != dim:
        raise InputError(f"row of length {len(a)} in a polyhedron of dimension {dim}")
    return a, rational(offset)


@dataclass(frozen=True, eq=False)
class Polyhedron:
    """``{x in R^dim : n.x <= o for (n, o) in ineqs, n.x = o for (n, o) in eqs}``.

    Construction is cheap (no LP).  Zero rows that hold trivially are dropped;
    a trivially false zero row collapses the whole set to the canonical empty
    representation ``0.x <= -1``.
    """

    dim: int
    ineqs: tuple = ()
    eqs: tuple = ()
    _pruned: bool = field(default=False, repr=False, compare=False)

    def __post_init__(self):
        if not isinstance(self.dim, int) or self.dim < 0:
            raise InputError(f"dimension must be a nonnegative integer, got {self.dim!r}")
        ineqs = [_row(a, o, self.dim) for a, o in self.ineqs]
        eqs = [_row(a, o, self.dim) for a, o in self.eqs]
        infeasible = False
        keep_i, keep_e = [], []
        for a, o in ineqs:
            if any(a):
                keep_i.append((a, o))
            elif o < 0:
                infeasible = True
        for a, o in eqs:
            if any(a):
                keep_e.append((a, o))
            elif o != 0:
                infeasible = True
        if infeasible:
            keep_i, keep_e = [(zeros(self.dim), Fraction(-1))], []
        object.__setattr__(self, "ineqs", tuple(keep_i))
        object.__setattr__(self, "eqs", tuple(keep_e))

    # -- constructors -------------------------------------------------------
    @classmethod
    def from_matrices(cls, A=(), b=(), E=(), d=(), dim: int | None = None) -> "Polyhedron":
        A, E = list(A), list(E)
        if dim is None:
            if A:
                dim = len(A[0])
            elif E:
                dim = len(E[0])
            else:
                raise InputError("cannot infer dimension of an unconstrained polyhedron")
        if len(A) != len(b) or len(E) != len(d):
            raise InputError("row count does not match right-hand side length")
        return cls(dim, tuple(zip(A, b)), tuple(zip(E, d)))

    @classmethod
    def universe(cls, dim: int) -> "Polyhedron":
        return cls(dim)

    @classmethod
    def empty(cls, dim: int) -> "Polyhedron":
        return cls(dim, ((zeros(dim), -1),))

    @classmethod
    def point(cls, x: Sequence) -> "Polyhedron":
        x = vector(x)
        n = len(x)
        return cls(n, (), tuple((_unit(n, i), x[i]) for i in range(n)))

    @classmethod
    def box(cls, lo: Sequence, hi: Sequence) -> "Polyhedron":
        """Axis-aligned box; ``None`` in ``lo``/``hi`` leaves that side open."""
        if len(lo) != len(hi):
            raise InputError("box bounds of different lengths")
        n = len(lo)
        rows = []
        for i in range(n):
            if hi[i] is not None:
                rows.append((_unit(n, i), rational(hi[i])))
            if lo[i] is not None:
                rows.append((tuple(-v for v in _unit(n, i)), -rational(lo[i])))
        return cls(n, tuple(rows))

    @classmethod
    def halfspace(cls, normal: Sequence, offset) -> "Polyhedron":
        normal = vector(normal)
        return cls(len(normal), ((normal, offset),))

    # -- basic queries ------------------------------------------------------
    @property
    def A(self) -> list:
        return [a for a, _ in self.ineqs]

    @property
    def b(self) -> list:
        return [o for _, o in self.ineqs]

    @property
    def E(self) -> list:
        return [a for a, _ in self.eqs]

    @property
    def d(self) -> list:
        return [o for _, o in self.eqs]

    def is_trivially_empty(self) -> bool:
        return len(self.ineqs) == 1 and not any(self.ineqs[0][0]) and self.ineqs[0][1] < 0

    def contains(self, x: Sequence) -> bool:
        x = vector(x)
        self._check_dim(x)
        return (all(dot(a, x) <= o for a, o in self.ineqs)
                and all(dot(a, x) == o for a, o in self.eqs))

    def active(self, x: Sequence) -> list:
        """Indices of inequalities tight at ``x``."""
        x = vector(x)
        return [i for i, (a, o) in enumerate(self.ineqs) if dot(a, x) == o]

    def _check_dim(self, x):
        if len(x) != self.dim:
            raise InputError(f"point of length {len(x)} for a polyhedron of dimension {self.dim}")

    @cached_property
    def _mpq(self):
        return ([to_mpq(a) for a in self.A], to_mpq(self.b), [to_mpq(a) for a in self.E], to_mpq(self.d))

    def lp(self, objective: Sequence, sense: str = "max") -> lp.LpResult:
        return solve_lp(objective, sense, self)

    @cached_property
    def feasible_point(self):
        """Some point of the set, or ``None`` when empty."""
        if self.is_trivially_empty():
            return None
        A, b, E, d = self._mpq
        status, x, *_ = lp.solve_mpq([mpq(0)] * self.dim, A, b, E, d)
        return None if status == lp.INFEASIBLE else from_mpq(x)

    def is_empty(self) -> bool:
        return self.feasible_point is None

    def sup(self, objective: Sequence):
        """``sup_{x in P} objective.x`` as an extended real (``-inf`` if empty)."""
        r = solve_lp(objective, "max", self)
        if r.status == lp.INFEASIBLE:
            return -float("inf")
        if r.status == lp.UNBOUNDED:
            return float("inf")
        return r.value

    # -- set algebra --------------------------------------------------------
    def intersect(self, other: "Polyhedron") -> "Polyhedron":
        if other.dim != self.dim:
            raise InputError(f"cannot intersect polyhedra of dimension {self.dim} and {other.dim}")
        return Polyhedron(self.dim, self.ineqs + other.ineqs, self.eqs + other.eqs)

    def product(self, other: "Polyhedron") -> "Polyhedron":
        """Cartesian product ``self x other``."""
        n, m = self.dim, other.dim
        z_m, z_n = zeros(m), zeros(n)
        ineqs = tuple((a + z_m, o) for a, o in self.ineqs) + tuple((z_n + a, o) for a, o in other.ineqs)
        eqs = tuple((a + z_m, o) for a, o in self.eqs) + tuple((z_n + a, o) for a, o in other.eqs)
        return Polyhedron(n + m, ineqs, eqs)

    def embed(self, total: int, positions: Sequence[int]) -> "Polyhedron":
        """Lift to ``R^total``; coordinate ``i`` of self becomes ``positions[i]``, others free."""
        if len(positions) != self.dim:
            raise InputError("positions must list one target index per coordinate")

        def lift(a):
            out = [Fraction(0)] * total
            for i, p in enumerate(positions):
                out[p] += a[i]
            return tuple(out)

        return Polyhedron(total, tuple((lift(a), o) for a, o in self.ineqs),
                          tuple((lift(a), o) for a, o in self.eqs))

    def affine_preimage(self, M: Sequence[Sequence], c: Sequence | None = None) -> "Polyhedron":
        """``{x : M x + c in self}`` for an ``dim x k`` matrix ``M``."""
        M = [vector(r) for r in M]
        if len(M) != self.dim:
            raise InputError(f"matrix with {len(M)} rows cannot map into R^{self.dim}")
        k = len(M[0]) if M else 0
        c = vector(c) if c is not None else zeros(self.dim)

        def pull(a, o):
            return (tuple(sum((a[i] * M[i][j] for i in range(self.dim)), Fraction(0)) for j in range(k)),
                    o - dot(a, c))

        return Polyhedron(k, tuple(pull(a, o) for a, o in self.ineqs), tuple(pull(a, o) for a, o in self.eqs))

    def fix(self, index: int, value) -> "Polyhedron":
        """Substitute ``x[index] = value`` and drop that coordinate."""
        value = rational(value)

        def sub(a, o):
            return a[:index] + a[index + 1:], o - a[index] * value

        return Polyhedron(self.dim - 1, tuple(sub(a, o) for a, o in self.ineqs),
                          tuple(sub(a, o) for a, o in self.eqs))

    def translate(self, t: Sequence) -> "Polyhedron":
        t = vector(t)
        return Polyhedron(self.dim, tuple((a, o + dot(a, t)) for a, o in self.ineqs),
                          tuple((a, o + dot(a, t)) for a, o in self.eqs))

    def __repr__(self):
        from .rational import fmt
        rows = [" ".join(fmt(v) for v in a) + f" <= {fmt(o)}" for a, o in self.ineqs]
        rows += [" ".join(fmt(v) for v in a) + f" == {fmt(o)}" for a, o in self.eqs]
        return f"Polyhedron(dim={self.dim}; " + "; ".join(rows) + ")"

    # structural equality of representations; set equality lives in geometry.poly_equal
    def __eq__(self, other):
        if not isinstance(other, Polyhedron):
            return NotImplemented
        return (self.dim, self.ineqs, self.eqs) == (other.dim, other.ineqs, other.eqs)

    def __hash__(self):
        return hash((self.dim, self.ineqs, self.eqs))


def _unit(n, i):
    return tuple(Fraction(1 if j == i else 0) for j in range(n))


def solve_lp(objective: Sequence, sense: str, P: Polyhedron) -> lp.LpResult:
    """Exact LP ``max/min objective.x`` over ``P``."""
    c = vector(objective)
    if len(c) != P.dim:
        raise InputError(f"objective of length {len(c)} for a polyhedron of dimension {P.dim}")
    A, b, E, d = P._mpq
    if sense not in ("min", "max"):
        raise InputError(f"sense must be 'min' or 'max', not {sense!r}")
    status, x, value, y, z, ray = lp.solve_mpq(to_mpq(c), A, b, E, d, sense)
    if status == lp.INFEASIBLE:
        return lp.LpResult(lp.INFEASIBLE, witness=from_mpq(y) + from_mpq(z), dual=(from_mpq(y), from_mpq(z)))
    if status == lp.UNBOUNDED:
        return lp.LpResult(lp.UNBOUNDED, witness=from_mpq(ray), point=from_mpq(x))
    xv = from_mpq(x)
    return lp.LpResult(lp.OPTIMAL, value=Fraction(int(value.numerator), int(value.denominator)),
                       witness=xv, dual=(from_mpq(y), from_mpq(z)), point=xv)


# -- canonical form ----------------------------------------------------------

def implicit_equalities(P: Polyhedron) -> list[int]:
    """Indices of inequalities of a nonempty ``P`` that hold with equality on all of ``P``."""
    n, m = P.dim, len(P.ineqs)
    if m == 0:
        return []
    A, b, E, d = P._mpq
    # one LP pushes every row's slack up to 1; rows left at 0 need an individual check
    A2 = [row + [mpq(1) if k == i else mpq(0) for k in range(m)] for i, row in enumerate(A)]
    A2 += [[mpq(0)] * n + [mpq(1) if k == i else mpq(0) for k in range(m)] for i in range(m)]
    A2 += [[mpq(0)] * n + [mpq(-1) if k == i else mpq(0) for k in range(m)] for i in range(m)]
    b2 = list(b) + [mpq(1)] * m + [mpq(0)] * m
    E2 = [row + [mpq(0)] * m for row in E]
    status, x, *_ = lp.solve_mpq([mpq(0)] * n + [mpq(1)] * m, A2, b2, E2, d, "max")
    if status == lp.INFEASIBLE:
        raise InputError("implicit equalities requested for an empty polyhedron")
    point = x[:n]
    out = []
    for i in range(m):
        s = b[i] - sum((A[i][k] * point[k] for k in range(n)), mpq(0))
        if s > 0:
            continue
        st, _, val, *_ = lp.solve_mpq([-v for v in A[i]], A, b, E, d, "max")
        # max(-a.x) == -b  <=>  a.x == b everywhere
        if st == lp.OPTIMAL and val == -b[i]:
            out.append(i)
    return out


def prune(P: Polyhedron) -> Polyhedron:
    """Drop inequalities implied by the remaining rows (LP test per row) and dependent equalities."""
    if P._pruned or P.is_trivially_empty():
        return P
    eqs = P.eqs
    if len(eqs) > 1:
        ech, pivots = echelon([list(a) + [o] for a, o in eqs])
        if P.dim in pivots:
            return Polyhedron.empty(P.dim)
        eqs = tuple(primitive(tuple(r[:-1]), r[-1]) for r in ech)
    rows = _dedupe(P.ineqs)
    E, d = [to_mpq(a) for a, _ in eqs], to_mpq([o for _, o in eqs])
    qa = [to_mpq(a) for a, _ in rows]
    qb = [mpq(o.numerator, o.denominator) for _, o in rows]
    keep = list(range(len(rows)))
    i = 0
    while i < len(keep):
        r = keep[i]
        rest = keep[:i] + keep[i + 1:]
        status, _, val, *_ = lp.solve_mpq(qa[r], [qa[k] for k in rest], [qb[k] for k in rest], E, d, "max")
        if status == lp.OPTIMAL and val <= qb[r]:
            keep = rest
        elif status == lp.INFEASIBLE:
            return Polyhedron.empty(P.dim)
        else:
            i += 1
    keep = [rows[k] for k in keep]
    out = Polyhedron(P.dim, tuple(keep), eqs)
    object.__setattr__(out, "_pruned", True)
    return out


def _dedupe(rows) -> list:
    """Keep one row per normal direction, with the tightest offset."""
    best = {}
    for a, o in rows:
        pa = primitive(a)
        k = next(v for v in a if v != 0) / next(v for v in pa if v != 0)
        off = o / k
        if pa not in best or off < best[pa]:
            best[pa] = off
    return list(best.items())


def canonical(P: Polyhedron) -> Polyhedron:
    """Unique representation: implicit equalities made explicit, equalities in
    reduced echelon form, inequalities reduced modulo the equalities, primitive,
    irredundant and sorted."""
    if P.is_empty():
        return Polyhedron.empty(P.dim)
    imp = set(implicit_equalities(P))
    eq_rows = [list(a) + [o] for a, o in P.eqs] + [list(P.ineqs[i][0]) + [P.ineqs[i][1]] for i in sorted(imp)]
    ech, pivots = echelon(eq_rows)
    ineqs = []
    for i, (a, o) in enumerate(P.ineqs):
        if i in imp:
            continue
        row = list(a) + [o]
        for prow, j in zip(ech, pivots):
            if row[j] != 0:
                f = row[j]
                row = [u - f * v for u, v in zip(row, prow)]
        if any(row[:-1]):
            ineqs.append((tuple(row[:-1]), row[-1]))
    eqs = [primitive(tuple(r[:-1]), r[-1]) for r in ech]
    Q = prune(Polyhedron(P.dim, tuple(ineqs), tuple(eqs)))
    ineqs = sorted(primitive(a, o) for a, o in Q.ineqs)
    out = Polyhedron(P.dim, tuple(ineqs), tuple(sorted(eqs)))
    object.__setattr__(out, "_pruned", True)
    return out


def relative_interior_point(P: Polyhedron):
    """A point in the relative interior of ``P`` (``None`` if empty)."""
    if P.is_empty():
        return None
    imp = set(implicit_equalities(P))
    n = P.dim
    strict = [(a, o) for i, (a, o) in enumerate(P.ineqs) if i not in imp]
    eqs = list(P.eqs) + [P.ineqs[i] for i in imp]
    if not strict:
        return P.feasible_point
    A = [to_mpq(a) + [mpq(1)] for a, _ in strict] + [[mpq(0)] * n + [mpq(1)]]
    b = to_mpq([o for _, o in strict]) + [mpq(1)]
    E = [to_mpq(a) + [mpq(0)] for a, _ in eqs]
    d = to_mpq([o for _, o in eqs])
    status, x, *_ = lp.solve_mpq([mpq(0)] * n + [mpq(1)], A, b, E, d, "max")
    return from_mpq(x[:n])


def affine_hull_rows(P: Polyhedron) -> list:
    """Equalities (explicit and implicit) describing the affine hull of a nonempty ``P``."""
    imp = implicit_equalities(P)
    return list(P.eqs) + [P.ineqs[i] for i in imp]


def from_rows(dim: int, ineqs: Iterable = (), eqs: Iterable = ()) -> Polyhedron:
    return Polyhedron(dim, tuple(ineqs), tuple(eqs))
