"""Exception hierarchy shared by every fraclange module."""


class FracLangeError(Exception):
    """Base class for all library errors."""


class DomainError(FracLangeError, ValueError):
    """An argument lies outside the supported domain."""


class PoleError(DomainError):
    """Gamma function evaluated at a non-positive integer."""


class GammaOverflowError(FracLangeError, OverflowError):
    """Result is not representable as a finite double."""


class ConvergenceError(FracLangeError, RuntimeError):
    """An iterative procedure exhausted its budget."""


class VerificationError(FracLangeError, AssertionError):
    """A numerical check failed (raised by the *_check helpers)."""


class ModeIndexError(FracLangeError, IndexError):
    """A mode index outside ``1..N_max`` was requested."""


class TruncationWarning(UserWarning):
    """The truncation tolerance could not be certified with the supplied modes."""
