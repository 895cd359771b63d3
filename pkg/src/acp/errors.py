"""Exception types raised across the package."""


class ACPError(Exception):
    """Base class for all errors raised by :mod:`acp`."""


class DimensionMismatch(ACPError, ValueError):
    pass


class RealityViolation(ACPError):
    """Input is not in the real part ``X^tau = X^*`` of the algebra."""


class NotNormal(ACPError):
    pass


class Singular(ACPError):
    pass


class AtCenter(ACPError):
    """Point coincides with a cell center of the grid (excluded domain)."""


class StructureMismatch(ACPError):
    pass


class NotSelfAdjoint(ACPError):
    pass


class NotSelfTau(ACPError):
    pass


class TooFarFromGroup(ACPError):
    pass


class EmptyInput(ACPError, ValueError):
    pass
