"""Exception hierarchy shared by every module."""


class SpongeDimError(Exception):
    """Base class for all library errors."""


class NonMonotone(SpongeDimError, ValueError):
    pass


class TooSmall(SpongeDimError, ValueError):
    pass


class LevelOutOfRange(SpongeDimError, IndexError):
    pass


class InvalidDigit(SpongeDimError, ValueError):
    pass


class BudgetExceeded(SpongeDimError, RuntimeError):
    pass


class NotCertified(SpongeDimError, RuntimeError):
    """Raised when weak specification cannot be certified for a subshift."""


class NoConvergence(SpongeDimError, RuntimeError):
    pass


class NotErgodic(SpongeDimError, ValueError):
    pass


class SupportViolation(SpongeDimError, ValueError):
    pass


class QuadratureFailure(SpongeDimError, RuntimeError):
    pass


class DomainTooLarge(SpongeDimError, ValueError):
    pass


class WordTooShort(SpongeDimError, ValueError):
    pass


class NotInLanguage(SpongeDimError, ValueError):
    pass


class UnsupportedMeasure(SpongeDimError, TypeError):
    pass


class SamplerFailure(SpongeDimError, RuntimeError):
    pass


class ConfigError(SpongeDimError, ValueError):
    pass


class InternalInconsistency(SpongeDimError, AssertionError):
    """A computed verdict contradicts a proven equivalence."""
