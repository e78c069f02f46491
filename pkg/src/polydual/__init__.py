"""Exact convex duality and generalized differentiation for polyhedral data.

All arithmetic is rational (``fractions.Fraction``); extended-real results use
``math.inf``.  The main entry points:

* :class:`Polyhedron`, :class:`Cone`, :func:`normal_cone`, :func:`dual_cone`
* PL convex expressions (:class:`MaxAffine`, :class:`Indicator`, :class:`Sum`, ...)
* :func:`conjugate` and the witness-producing sum and chain rules
* :func:`subdifferential` and :func:`max_rule`
* :func:`fenchel_report` and :func:`strong_duality_report`
* KKT, Fritz-John and alternative systems for cone programs
* coderivatives of set-valued maps and their calculus checks
"""
from .coderivative import (CoderivativeValue, RuleCheck, SetValuedMap, chain_rule_check, coderivative, compose,
                           constraint_system_coderivative, graph_normal_cone, intersection_rule_check,
                           preimage_normal_cone)
from .conjugate import (ChainWitness, ConjugateWitness, conjugate, conjugate_chain_witness, conjugate_sum_split,
                        conjugate_value, conjugate_via_epigraph, inf_convolution, support_function,
                        support_intersection_split)
from .errors import (ImproperError, InputError, NoPreimageError, NonConvexSampleError, NotInDomainError,
                     NotInGraphError, PolydualError, QualificationError, SlaterError, TheoremViolation,
                     UnboundedError)
from .fenchel import DualityReport, FenchelProblem, fenchel_report, fenchel_sum_identity
from .functions import (Affine, ConvexExpr, Indicator, Max, MaxAffine, PLForm, PreComposeLinear, ScaleNonneg, Sum,
                        epigraph, from_epigraph)
from .geometry import (NOT_IN_SET, Cone, core_meets, core_membership, core_nonempty, dual_cone, minkowski_sum,
                       normal_cone, polar_cone, poly_equal, poly_subset, prune, vrep)
from .grid import GridSpec, SampledFunction, sample
from .lagrange import (AlternativeResult, ConeProgram, MultiplierVector, alternative_systems, dual_function,
                       dual_value, feasible_set, fritz_john, improving_point, kkt_check, kkt_find, lagrangian,
                       optimality_check, primal_value, slater_check, slater_status, strong_duality_report)
from .legendre import lf_transform_brute, lf_transform_fast
from .linalg import LinearMap
from .polyhedron import Polyhedron, solve_lp
from .problemfile import ParseError, ProblemFile, format_problem, parse_problem
from .rational import INF
from .subdiff import Subdifferential, max_rule, subdifferential, subdifferential_direct, sum_rule
from .suites import SUITES, emit_csv, run_suite

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
