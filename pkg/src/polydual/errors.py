"""Exception hierarchy shared by every module."""


class PolydualError(Exception):
    """Base class for all errors raised by polydual."""


class InputError(PolydualError, ValueError):
    """Malformed input: dimension mismatch, bad literal, empty set where one is required."""


class NonConvexSampleError(InputError):
    pass


class ImproperError(PolydualError):
    """A construction would produce an improper function (empty domain or value -inf)."""


class QualificationError(PolydualError):
    """A core/interiority qualification required by a calculus rule does not hold."""


class SlaterError(QualificationError):
    pass


class UnboundedError(PolydualError):
    """The requested value is +inf, so no attaining witness exists."""


class NoPreimageError(UnboundedError):
    """The adjoint has no preimage of the requested functional."""


class NotInDomainError(PolydualError):
    pass


class NotInGraphError(PolydualError):
    pass


class TheoremViolation(PolydualError, AssertionError):
    """Hypotheses of a duality/calculus theorem were verified but its conclusion failed.

    This should never happen; it signals a bug in the kernel or a broken instance.
    """
