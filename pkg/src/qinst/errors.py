"""Exception types raised when inputs violate a documented precondition."""

from __future__ import annotations


class PreconditionError(ValueError):
    """Base class for all precondition violations in this package."""


class NotHermitianError(PreconditionError):
    pass


class NegativeEigenvalueError(PreconditionError):
    pass


class NotPSDError(PreconditionError):
    pass


class NotCPError(PreconditionError):
    pass


class NotNormalizedError(PreconditionError):
    pass


class NotInSpanError(PreconditionError):
    pass


class NotLeftTightError(PreconditionError):
    pass


class NotTightError(PreconditionError):
    pass


class NotCovariantError(PreconditionError):
    pass


class DegenerateStateError(PreconditionError):
    pass


class NormalizationFailedError(PreconditionError):
    pass


class StabilizerInvarianceError(PreconditionError):
    pass


class ProjectiveUnsupportedError(PreconditionError):
    pass
