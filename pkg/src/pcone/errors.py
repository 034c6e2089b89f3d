"""Exception hierarchy shared by all modules."""


class PconeError(Exception):
    """Base class for every error raised by :mod:`pcone`."""


class DimensionMismatch(PconeError, ValueError):
    pass


class DomainError(PconeError, ValueError):
    """A matrix function was evaluated outside its domain."""


class NotPositiveDefinite(DomainError):
    pass


class Singular(PconeError, ValueError):
    pass


class NoConvergence(PconeError, RuntimeError):
    pass


class BaseMismatch(PconeError, ValueError):
    """A tangent vector was used at a point other than its base."""


class UnsupportedNorm(PconeError, ValueError):
    pass


class DegenerateInput(PconeError, ValueError):
    pass


class DegenerateBasis(PconeError, ValueError):
    pass


class RangeError(PconeError, ValueError):
    pass


class NotInSubmanifold(PconeError, ValueError):
    pass


class EmptySet(PconeError, ValueError):
    pass


class NonFinite(PconeError, FloatingPointError):
    pass


class UnknownSuite(PconeError, KeyError):
    pass
