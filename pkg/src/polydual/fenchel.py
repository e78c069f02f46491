"""Composite Fenchel duality: ``inf phi(x) + psi(Ax)`` against ``sup -phi*(A^T g) - psi*(-g)``."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from . import lp
from .conjugate import conjugate, range_polyhedron
from .errors import InputError, TheoremViolation
from .functions import ConvexExpr
from .geometry import core_meets
from .linalg import LinearMap
from .rational import INF, vector


@dataclass(frozen=True)
class FenchelProblem:
    """Minimize ``phi(x) + psi(A x)`` over ``x in R^n``."""

    phi: ConvexExpr
    psi: ConvexExpr
    A: LinearMap

    def __post_init__(self):
        if self.A.cols != self.phi.dim:
            raise InputError(f"A has {self.A.cols} columns but phi lives on R^{self.phi.dim}")
        if self.A.rows != self.psi.dim:
            raise InputError(f"A has {self.A.rows} rows but psi lives on R^{self.psi.dim}")

    def objective(self, x):
        x = vector(x)
        v = self.phi.eval(x)
        return INF if v == INF else v + self.psi.eval(self.A.apply(x))

    def dual_objective(self, g):
        g = vector(g)
        a = conjugate(self.phi).eval(self.A.adjoint().apply(g))
        b = conjugate(self.psi).eval(tuple(-v for v in g))
        return -INF if INF in (a, b) else -a - b


@dataclass(frozen=True)
class DualityReport:
    """Primal and dual values of a convex program with qualification flags.

    ``gap`` is ``p_hat - d_hat`` (zero when both are the same infinity).
    ``qualification`` maps condition names to whether they held.
    """

    p_hat: Fraction | float
    d_hat: Fraction | float
    gap: Fraction | float
    primal_opt: tuple | None
    dual_opt: tuple | None
    qualification: dict = field(default_factory=dict)
    attained: bool = False
    qualified: bool = False
    slater: bool | None = None


def duality_gap(p, d):
    if p == d:
        return Fraction(0)
    return p - d


def _epi_block(form, width, x_slice_rows, t_col):
    """Rows of ``(M z, t) in epi f`` in a ``width``-variable LP.

    ``x_slice_rows(a)`` returns the coefficient list for slope ``a`` over all
    variables except ``t``.
    """
    A, b, E, d = [], [], [], []
    for a, o in form.pieces:
        row = x_slice_rows(a)
        row[t_col] = Fraction(-1)
        A.append(row)
        b.append(-o)
    for a, o in form.domain.ineqs:
        A.append(x_slice_rows(a))
        b.append(o)
    for a, o in form.domain.eqs:
        E.append(x_slice_rows(a))
        d.append(o)
    return A, b, E, d


def solve_primal(prob: FenchelProblem):
    """``(p_hat, x)``; ``x`` is ``None`` unless the infimum is attained."""
    n, m = prob.phi.dim, prob.psi.dim
    width = n + 2
    M = prob.A.entries

    def lift_phi(a):
        return list(a) + [Fraction(0), Fraction(0)]

    def lift_psi(a):
        return [sum((a[i] * M[i][j] for i in range(m)), Fraction(0)) for j in range(n)] + [Fraction(0)] * 2

    A1, b1, E1, d1 = _epi_block(prob.phi.pl, width, lift_phi, n)
    A2, b2, E2, d2 = _epi_block(prob.psi.pl, width, lift_psi, n + 1)
    c = [Fraction(0)] * n + [Fraction(1), Fraction(1)]
    r = lp.solve(c, A1 + A2, b1 + b2, E1 + E2, d1 + d2, "min")
    if r.status == lp.INFEASIBLE:
        return INF, None
    if r.status == lp.UNBOUNDED:
        return -INF, None
    return r.value, r.witness[:n]


def solve_dual(prob: FenchelProblem):
    """``(d_hat, g)`` maximizing ``-phi*(A^T g) - psi*(-g)`` over exact PL conjugates."""
    n, m = prob.phi.dim, prob.psi.dim
    width = m + 2
    M = prob.A.entries
    phi_star, psi_star = conjugate(prob.phi).pl, conjugate(prob.psi).pl

    def lift_phi(a):  # a.(A^T g) = (A a).g
        return [sum((M[i][j] * a[j] for j in range(n)), Fraction(0)) for i in range(m)] + [Fraction(0)] * 2

    def lift_psi(a):  # a.(-g)
        return [-v for v in a] + [Fraction(0)] * 2

    A1, b1, E1, d1 = _epi_block(phi_star, width, lift_phi, m)
    A2, b2, E2, d2 = _epi_block(psi_star, width, lift_psi, m + 1)
    c = [Fraction(0)] * m + [Fraction(-1), Fraction(-1)]
    r = lp.solve(c, A1 + A2, b1 + b2, E1 + E2, d1 + d2, "max")
    if r.status == lp.INFEASIBLE:
        return -INF, None
    if r.status == lp.UNBOUNDED:
        return INF, None
    return r.value, r.witness[:m]


def qualifications(prob: FenchelProblem) -> dict:
    """Which core qualifications of the Fenchel theorem hold.

    * ``range_meets_core_psi``: ``A X ∩ core(dom psi) ≠ ∅`` (needed in every case)
    * ``QCD``: ``dom(psi o A) ∩ core(dom phi) ≠ ∅``
    * ``QCD1``: ``core(dom(psi o A)) ∩ dom phi ≠ ∅``
    * ``image_of_core``: ``dom psi ∩ A(core dom phi) ≠ ∅`` (implies ``QCD``)
    """
    dom_phi, dom_psi = prob.phi.domain, prob.psi.domain
    pre = dom_psi.affine_preimage(prob.A.entries)
    out = {
        "range_meets_core_psi": core_meets(dom_psi, range_polyhedron(prob.A)) is not None,
        "QCD": core_meets(dom_phi, pre) is not None,
        "QCD1": core_meets(pre, dom_phi) is not None,
    }
    # dom psi meets A(core dom phi) exactly when core(dom phi) meets A^{-1}(dom psi)
    out["image_of_core"] = out["QCD"]
    return out


def is_qualified(flags: dict) -> bool:
    return flags["range_meets_core_psi"] and (flags["QCD"] or flags["QCD1"])


def fenchel_report(prob: FenchelProblem) -> DualityReport:
    """Solve both sides, check the qualifications, and enforce the duality theorems.

    Raises :class:`TheoremViolation` if weak duality fails, or if a qualified
    instance has a nonzero gap or (with finite value) an unattained dual.
    """
    p, x = solve_primal(prob)
    d, g = solve_dual(prob)
    flags = qualifications(prob)
    qualified = is_qualified(flags)
    gap = duality_gap(p, d)
    if gap < 0:
        raise TheoremViolation(f"weak duality fails: p = {p} < d = {d}")
    attained = g is not None and d != -INF and d != INF
    if qualified:
        if gap != 0:
            raise TheoremViolation(f"qualified instance with gap {gap}")
        if p not in (INF, -INF) and not attained:
            raise TheoremViolation("qualified instance with unattained dual")
    if x is not None and prob.objective(x) != p:
        raise TheoremViolation("primal optimizer does not attain the reported value")
    if g is not None and prob.dual_objective(g) != d:
        raise TheoremViolation("dual optimizer does not attain the reported value")
    return DualityReport(p, d, gap, x, g, flags, attained, qualified)


def fenchel_sum_identity(phi: ConvexExpr, psi: ConvexExpr) -> DualityReport:
    """The ``A = identity`` case: ``inf phi + psi = sup -phi*(-f) - psi*(f)``."""
    return fenchel_report(FenchelProblem(phi, psi, LinearMap.identity(phi.dim)))
