"""Cone-constrained convex programs ``min phi(x) s.t. x in Λ, psi(x) in -C``.

Two program classes are supported:

* PL components ``psi_i`` with ``C = R^m_+`` (the componentwise case);
* affine ``psi`` with an arbitrary polyhedral cone ``C``.

Optimality conditions (Fermat, Fritz-John, KKT) are decided by feasibility
LPs over perspective-lifted subdifferentials, and the Lagrange dual value
``sup_{h in C'} inf_{x in Λ} phi(x) + <h, psi(x)>`` comes from one joint LP
built from the dual of the inner minimization.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Sequence

from . import lp
from .errors import InputError, NotInDomainError, QualificationError, SlaterError, TheoremViolation
from .fenchel import DualityReport, duality_gap
from .functions import Affine, ConvexExpr, epigraph
from .geometry import (Cone, canonical, core_meets, core_membership, dual_cone, normal_cone, poly_equal)
from .polyhedron import Polyhedron, prune
from .rational import INF, dot, vector, zeros
from .subdiff import subdifferential

_ZERO, _ONE = Fraction(0), Fraction(1)


@dataclass(frozen=True, eq=False)
class ConeProgram:
    """``minimize phi(x) subject to x in region, psi(x) in -cone``."""

    phi: ConvexExpr
    psi: tuple
    region: Polyhedron
    cone: Cone | None = None

    def __post_init__(self):
        psi = tuple(self.psi)
        object.__setattr__(self, "psi", psi)
        n = self.phi.dim
        if not psi:
            raise InputError("a cone program needs at least one constraint function")
        if any(p.dim != n for p in psi) or self.region.dim != n:
            raise InputError("phi, psi and the region must live on the same space")
        cone = self.cone if self.cone is not None else Cone.orthant(len(psi))
        if cone.dim != len(psi):
            raise InputError(f"cone in R^{cone.dim} for {len(psi)} constraint functions")
        object.__setattr__(self, "cone", cone)
        orthant = self.cone is None or poly_equal(cone.hrep, Cone.orthant(len(psi)).hrep)
        object.__setattr__(self, "is_orthant", orthant)
        if not orthant and not all(isinstance(p, Affine) for p in psi):
            raise InputError("a general ordering cone requires affine constraint functions")

    @property
    def n(self) -> int:
        return self.phi.dim

    @property
    def m(self) -> int:
        return len(self.psi)

    def psi_values(self, x) -> tuple:
        return tuple(p.eval(x) for p in self.psi)

    def is_feasible(self, x) -> bool:
        return feasible_set(self).contains(x)


@dataclass(frozen=True)
class MultiplierVector:
    """Lagrange multipliers ``gammas`` (plus ``gamma0`` for Fritz-John).

    ``slackness[i]`` is ``gammas[i] * psi_i(u)``; it is zero for valid multipliers.
    """

    gammas: tuple
    gamma0: Fraction | None = None
    slackness: tuple = ()


class AlternativeResult(NamedTuple):
    ip_solvable: bool
    id_solvable: bool
    ip_witness: tuple | None
    id_witness: tuple | None
    slater: bool


# -- sets ---------------------------------------------------------------------

def _affine_data(prog: ConeProgram):
    B = [p.slope for p in prog.psi]
    beta = [p.offset for p in prog.psi]
    return B, beta


def _cone_rows(prog: ConeProgram):
    """Rows ``x -> (coeffs, rhs)`` expressing ``psi(x) in -C`` for affine ``psi``."""
    B, beta = _affine_data(prog)
    H = prog.cone.hrep
    n = prog.n

    def pull(h):
        return tuple(sum((h[i] * B[i][j] for i in range(prog.m)), _ZERO) for j in range(n)), dot(h, beta)

    ineqs, eqs = [], []
    for h, _ in H.ineqs:          # h.(-(Bx + beta)) <= 0
        a, c = pull(h)
        ineqs.append((tuple(-v for v in a), c))
    for g, _ in H.eqs:            # g.(Bx + beta) = 0
        a, c = pull(g)
        eqs.append((a, -c))
    return ineqs, eqs


def feasible_set(prog: ConeProgram) -> Polyhedron:
    """``Π = {x in region : psi(x) in -C}``."""
    P = prog.region
    if prog.is_orthant:
        for p in prog.psi:
            form = p.pl
            rows = tuple((a, -b) for a, b in form.pieces)
            P = P.intersect(form.domain).intersect(Polyhedron(prog.n, rows))
    else:
        ineqs, eqs = _cone_rows(prog)
        P = P.intersect(Polyhedron(prog.n, tuple(ineqs), tuple(eqs)))
    return prune(P)


def _lifted_domain(prog: ConeProgram) -> Polyhedron:
    """Where the Lagrangian is finite: ``region ∩ dom phi ∩ dom psi_i``."""
    P = prog.region.intersect(prog.phi.domain)
    for p in prog.psi:
        P = P.intersect(p.domain)
    return P


def _minimize_over(phi: ConvexExpr, P: Polyhedron, floor=None):
    """``(inf phi over P, minimizer)``; ``floor`` caps the epigraph variable from below."""
    n = phi.dim
    E = epigraph(phi).intersect(P.embed(n + 1, range(n)))
    if floor is not None:
        E = E.intersect(Polyhedron(n + 1, ((zeros(n) + (-_ONE,), -floor),)))
    r = E.lp(zeros(n) + (_ONE,), "min")
    if r.status == lp.INFEASIBLE:
        return INF, None
    if r.status == lp.UNBOUNDED:
        return -INF, None
    return r.value, r.witness[:n]


def primal_value(prog: ConeProgram):
    """``(p, minimizer)`` with ``p = inf {phi(x) : x in Π}``."""
    return _minimize_over(prog.phi, feasible_set(prog))


# -- Slater -----------------------------------------------------------------

def slater_status(prog: ConeProgram) -> tuple:
    """``(point, reason)``: a Slater point in ``region ∩ dom phi`` or ``None`` with a reason."""
    n = prog.n
    base = prog.region.intersect(prog.phi.domain)
    if prog.is_orthant:
        strict_rows, extra = [], base
        for p in prog.psi:
            form = p.pl
            strict_rows += [(a, -b) for a, b in form.pieces]
            extra = extra.intersect(form.domain)
        strict = Polyhedron(n, tuple(strict_rows))
    else:
        H = canonical(prog.cone.hrep)
        if H.eqs:
            return None, "core(C) is empty: the cone is not full-dimensional"
        B, beta = _affine_data(prog)
        rows = []
        for h, _ in H.ineqs:     # h.(-(Bx + beta)) < 0
            a = tuple(-sum((h[i] * B[i][j] for i in range(prog.m)), _ZERO) for j in range(n))
            rows.append((a, dot(h, beta)))
        strict, extra = Polyhedron(n, tuple(rows)), base
    x = core_meets(strict, extra) if strict.ineqs else extra.feasible_point
    if x is None:
        return None, "no point of the region maps strictly inside -C"
    return x, "ok"


def slater_check(prog: ConeProgram):
    """A Slater point ``x`` (``psi(x) in -core C``) or ``None``."""
    return slater_status(prog)[0]


# -- optimality conditions -------------------------------------------------------

def _perspective_lp(n: int, sets: list, gens: list, gamma_mode: str, fixed=None, zero_mask=None):
    """Find ``gamma`` with ``0 in sum_i gamma_i S_i + cone(gens)``.

    ``sets`` are H-reps in ``R^n``; ``gamma_i S_i`` is modelled by the
    perspective ``{u : A u <= gamma_i b, E u = gamma_i d}`` (exact for bounded
    ``S_i``).  ``gamma_mode`` is ``"fixed"`` (values from ``fixed``),
    ``"normalized"`` (``sum gamma = 1``) or ``"first"`` (``gamma_0 = 1``).
    ``zero_mask[i]`` forces ``gamma_i = 0``.  Returns gamma or ``None``.
    """
    k = len(sets)
    zero_mask = zero_mask or [False] * k
    nu = n * k
    nv = nu + k + len(gens)

    def row():
        return [_ZERO] * nv

    A, b, E, d = [], [], [], []
    for i, S in enumerate(sets):
        off = n * i
        for a, o in S.ineqs:
            r = row()
            r[off:off + n] = a
            r[nu + i] = -o
            A.append(r)
            b.append(_ZERO)
        for a, o in S.eqs:
            r = row()
            r[off:off + n] = a
            r[nu + i] = -o
            E.append(r)
            d.append(_ZERO)
        r = row()
        r[nu + i] = -_ONE
        A.append(r)
        b.append(_ZERO)
        if zero_mask[i]:
            r = row()
            r[nu + i] = _ONE
            E.append(r)
            d.append(_ZERO)
            for j in range(n):      # gamma_i = 0 must also kill u_i
                r = row()
                r[n * i + j] = _ONE
                E.append(r)
                d.append(_ZERO)
    for j in range(n):
        r = row()
        for i in range(k):
            r[n * i + j] = _ONE
        for t, g in enumerate(gens):
            r[nu + k + t] = g[j]
        E.append(r)
        d.append(_ZERO)
    for t in range(len(gens)):
        r = row()
        r[nu + k + t] = -_ONE
        A.append(r)
        b.append(_ZERO)
    if gamma_mode == "fixed":
        for i, g in enumerate(fixed):
            r = row()
            r[nu + i] = _ONE
            E.append(r)
            d.append(g)
    elif gamma_mode == "normalized":
        r = row()
        for i in range(k):
            r[nu + i] = _ONE
        E.append(r)
        d.append(_ONE)
    elif gamma_mode == "first":
        r = row()
        r[nu] = _ONE
        E.append(r)
        d.append(_ONE)
    else:
        raise ValueError(gamma_mode)
    res = lp.solve([_ZERO] * nv, A, b, E, d, "max")
    if res.status == lp.INFEASIBLE:
        return None
    return res.witness[nu:nu + k]


def _require_point(prog_or_n, x):
    x = vector(x)
    if len(x) != prog_or_n:
        raise InputError(f"point of length {len(x)} in R^{prog_or_n}")
    return x


def optimality_check(phi: ConvexExpr, feasible: Polyhedron, u: Sequence) -> bool:
    """``0 in ∂phi(u) + N(u; Π)``, under ``Π ∩ core(dom phi) ≠ ∅`` or ``core(Π) ∩ dom phi ≠ ∅``."""
    u = _require_point(phi.dim, u)
    if not feasible.contains(u):
        raise InputError("u is not in the feasible set")
    if phi.eval(u) == INF:
        raise NotInDomainError("u is outside dom phi")
    if core_meets(phi.domain, feasible) is None and core_meets(feasible, phi.domain) is None:
        raise QualificationError("neither Π ∩ core(dom phi) nor core(Π) ∩ dom phi is nonempty")
    S = subdifferential(phi, u).set
    gens = list(normal_cone(feasible, u).generators)
    return _perspective_lp(phi.dim, [S], gens, "fixed", fixed=[_ONE]) is not None


def _require_orthant(prog: ConeProgram):
    if not prog.is_orthant:
        raise InputError("multiplier rules are implemented for C = R^m_+")


def _core_qualification(prog: ConeProgram, u) -> bool:
    return core_membership(prog.phi.domain, u) and all(core_membership(p.domain, u) for p in prog.psi)


def _multiplier_sets(prog: ConeProgram, u):
    values = prog.psi_values(u)
    sets = [subdifferential(prog.phi, u).set] + [subdifferential(p, u).set for p in prog.psi]
    gens = list(normal_cone(prog.region, u).generators)
    inactive = [False] + [v != 0 for v in values]
    return sets, gens, inactive, values


def is_optimal(prog: ConeProgram, u) -> bool:
    """LP certificate that ``u`` is feasible and minimizes ``phi`` over ``Π``."""
    if not feasible_set(prog).contains(u):
        return False
    p, _ = primal_value(prog)
    return p == prog.phi.eval(u)


def fritz_john(prog: ConeProgram, u: Sequence) -> MultiplierVector:
    """``(gamma_0, ..., gamma_m) >= 0`` summing to 1 with
    ``0 in gamma_0 ∂phi(u) + sum gamma_i ∂psi_i(u) + N(u; Λ)`` and ``gamma_i psi_i(u) = 0``."""
    _require_orthant(prog)
    u = _require_point(prog.n, u)
    if not prog.region.contains(u) or not _core_qualification(prog, u):
        raise QualificationError("u is not in core(dom phi) ∩ core(dom psi_i) ∩ Λ")
    if not is_optimal(prog, u):
        raise InputError("u is not an optimal solution")
    sets, gens, inactive, values = _multiplier_sets(prog, u)
    gamma = _perspective_lp(prog.n, sets, gens, "normalized", zero_mask=inactive)
    if gamma is None:
        raise TheoremViolation("no Fritz-John multipliers at a qualified optimum")
    rest = gamma[1:]
    return MultiplierVector(rest, gamma[0], tuple(g * v for g, v in zip(rest, values)))


def _kkt_hypotheses(prog: ConeProgram, u):
    _require_orthant(prog)
    u = _require_point(prog.n, u)
    if not feasible_set(prog).contains(u):
        raise InputError("u is not feasible")
    if not _core_qualification(prog, u):
        raise QualificationError("u is not in core(dom phi) ∩ core(dom psi_i)")
    if slater_check(prog) is None:
        raise SlaterError("the Slater condition fails")
    return u


def kkt_check(prog: ConeProgram, u: Sequence, gammas) -> bool:
    """Whether ``gammas`` are KKT multipliers at ``u``."""
    u = _kkt_hypotheses(prog, u)
    gammas = vector(gammas.gammas if isinstance(gammas, MultiplierVector) else gammas)
    if len(gammas) != prog.m:
        raise InputError(f"{len(gammas)} multipliers for {prog.m} constraints")
    if any(g < 0 for g in gammas):
        return False
    values = prog.psi_values(u)
    if any(g * v != 0 for g, v in zip(gammas, values)):
        return False
    sets, gens, _, _ = _multiplier_sets(prog, u)
    keep = [0] + [i + 1 for i, g in enumerate(gammas) if g != 0]
    fixed = [_ONE] + [g for g in gammas if g != 0]
    return _perspective_lp(prog.n, [sets[i] for i in keep], gens, "fixed", fixed=fixed) is not None


def kkt_find(prog: ConeProgram, u: Sequence) -> MultiplierVector | None:
    """KKT multipliers at ``u`` or ``None`` (then see :func:`improving_point`)."""
    u = _kkt_hypotheses(prog, u)
    sets, gens, inactive, values = _multiplier_sets(prog, u)
    gamma = _perspective_lp(prog.n, sets, gens, "first", zero_mask=inactive)
    if gamma is None:
        return None
    rest = gamma[1:]
    return MultiplierVector(rest, None, tuple(g * v for g, v in zip(rest, values)))


def improving_point(prog: ConeProgram, u: Sequence):
    """A feasible point with a strictly smaller objective than ``u``, or ``None``."""
    u = _require_point(prog.n, u)
    value = prog.phi.eval(u)
    floor = value - 1 if value != INF else None
    best, x = _minimize_over(prog.phi, feasible_set(prog), floor)
    if x is None or best >= value:
        return None
    return x


# -- duality ------------------------------------------------------------------

def lagrangian(prog: ConeProgram, x: Sequence, h: Sequence):
    """``phi(x) + <h, psi(x)>`` (``+inf`` off ``dom phi ∩ dom psi_i``)."""
    x = _require_point(prog.n, x)
    h = vector(h)
    if len(h) != prog.m:
        raise InputError(f"dual vector of length {len(h)} for {prog.m} constraints")
    v = prog.phi.eval(x)
    vals = prog.psi_values(x)
    if v == INF or INF in vals:
        return INF
    return v + dot(h, vals)


def _check_dual(prog: ConeProgram, h):
    h = vector(h)
    if len(h) != prog.m:
        raise InputError(f"dual vector of length {len(h)} for {prog.m} constraints")
    if not dual_cone(prog.cone).contains(h):
        raise InputError(f"{h} is not in the dual cone")
    return h


def dual_function(prog: ConeProgram, h: Sequence):
    """``inf_{x in Λ} phi(x) + <h, psi(x)>`` for ``h`` in the dual cone."""
    h = _check_dual(prog, h)
    n, m = prog.n, prog.m
    A, b, E, d = [], [], [], []

    def place(a, tcol):
        r = list(a) + [_ZERO] * (1 + m)
        if tcol is not None:
            r[tcol] = -_ONE
        return r

    def add_function(form, tcol):
        for a, o in form.pieces:
            A.append(place(a, tcol))
            b.append(-o)
        for a, o in form.domain.ineqs:
            A.append(place(a, None))
            b.append(o)
        for a, o in form.domain.eqs:
            E.append(place(a, None))
            d.append(o)

    add_function(prog.phi.pl, n)
    for i, p in enumerate(prog.psi):
        if isinstance(p, Affine):
            # h_i may be negative outside the orthant, so t_i must equal psi_i
            E.append(place(p.slope, n + 1 + i))
            d.append(-p.offset)
        else:
            add_function(p.pl, n + 1 + i)
    for a, o in prog.region.ineqs:
        A.append(place(a, None))
        b.append(o)
    for a, o in prog.region.eqs:
        E.append(place(a, None))
        d.append(o)
    c = [_ZERO] * n + [_ONE] + list(h)
    r = lp.solve(c, A, b, E, d, "min")
    if r.status == lp.INFEASIBLE:
        return INF
    if r.status == lp.UNBOUNDED:
        return -INF
    return r.value


def _joint_dual_lp(prog: ConeProgram):
    """Data for ``sup_{h in C'} L'(h)`` as one LP.

    Variables: piece weights ``w`` for phi (and for each psi_i in the orthant
    class), multipliers ``v >= 0`` / free on the domain rows, and ``h`` for the
    affine class.  Returns ``(c, A, b, E, d, h_of)`` where ``h_of(sol)`` reads
    the dual vector back from an LP solution.
    """
    n, m = prog.n, prog.m
    cols = []           # (kind, payload)
    stat_terms = []     # per column: contribution vector in R^n
    obj = []

    def add(kind, vec, cost, payload=None):
        cols.append((kind, payload))
        stat_terms.append(vec)
        obj.append(cost)

    for a, o in prog.phi.pl.pieces:
        add("w0", a, o)
    if prog.is_orthant and not all(isinstance(p, Affine) for p in prog.psi):
        for i, p in enumerate(prog.psi):
            for a, o in p.pl.pieces:
                add("w", a, o, i)
    doms = [prog.region, prog.phi.domain] + [p.domain for p in prog.psi]
    for D in doms:
        for a, o in D.ineqs:
            add("v", a, -o)
        for a, o in D.eqs:
            add("veq", a, -o)
    affine = not any(k == "w" for k, _ in cols)
    if affine:
        B, beta = _affine_data(prog)
        for i in range(m):
            add("h", tuple(B[i][j] for j in range(n)), beta[i], i)
    nv = len(cols)
    E, d = [], []
    for j in range(n):
        E.append([vec[j] for vec in stat_terms])
        d.append(_ZERO)
    E.append([_ONE if k == "w0" else _ZERO for k, _ in cols])
    d.append(_ONE)
    A, b = [], []
    for t, (k, _) in enumerate(cols):
        if k in ("w0", "w", "v"):
            r = [_ZERO] * nv
            r[t] = -_ONE
            A.append(r)
            b.append(_ZERO)
    if affine:
        hcols = [t for t, (k, _) in enumerate(cols) if k == "h"]
        for g in prog.cone.generators:      # g.h >= 0
            r = [_ZERO] * nv
            for i, t in enumerate(hcols):
                r[t] = -g[i]
            A.append(r)
            b.append(_ZERO)

    def h_of(sol):
        h = [_ZERO] * m
        for t, (k, i) in enumerate(cols):
            if k in ("w", "h"):
                h[i] += sol[t]
        return tuple(h)

    return obj, A, b, E, d, h_of


def dual_value(prog: ConeProgram):
    """``(d, h)``: the Lagrange dual value and an attaining ``h`` when the LP attains it."""
    if _lifted_domain(prog).is_empty():
        return INF, None
    c, A, b, E, d, h_of = _joint_dual_lp(prog)
    r = lp.solve(c, A, b, E, d, "max")
    if r.status == lp.INFEASIBLE:
        return -INF, None
    if r.status == lp.UNBOUNDED:
        return INF, None
    return r.value, h_of(r.witness)


def strong_duality_report(prog: ConeProgram) -> DualityReport:
    """Primal value ``p``, dual value ``d``; weak duality always, ``p = d`` under Slater."""
    p, x = primal_value(prog)
    d, h = dual_value(prog)
    slater = slater_check(prog) is not None
    gap = duality_gap(p, d)
    if gap < 0:
        raise TheoremViolation(f"weak duality fails: p = {p} < d = {d}")
    if slater and gap != 0:
        raise TheoremViolation(f"Slater instance with gap {gap}")
    if h is not None and dual_function(prog, h) != d:
        raise TheoremViolation("reported dual vector does not attain d")
    attained = h is not None
    return DualityReport(p, d, gap, x, h, {"slater": slater}, attained, slater, slater)


def alternative_systems(prog: ConeProgram) -> AlternativeResult:
    """Solvability of (IP) ``phi(x) < 0, psi(x) in -C, x in Λ`` and
    (ID) ``h in C'`` with ``phi(x) + <h, psi(x)> >= 0`` for all ``x in Λ``."""
    value, x = _minimize_over(prog.phi, feasible_set(prog), floor=-_ONE)
    ip = x is not None and value < 0
    if _lifted_domain(prog).is_empty():
        id_witness = zeros(prog.m)
    else:
        c, A, b, E, d, h_of = _joint_dual_lp(prog)
        A = A + [[-v for v in c]]
        b = b + [_ZERO]
        r = lp.solve([_ZERO] * len(c), A, b, E, d, "max")
        id_witness = h_of(r.witness) if r.optimal else None
    slater = slater_check(prog) is not None
    res = AlternativeResult(ip, id_witness is not None, x if ip else None, id_witness, slater)
    if res.ip_solvable and res.id_solvable:
        raise TheoremViolation("both alternative systems are solvable")
    if slater and not (res.ip_solvable or res.id_solvable):
        raise TheoremViolation("neither alternative system is solvable under Slater")
    return res
