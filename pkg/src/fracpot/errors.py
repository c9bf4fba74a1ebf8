"""Exception types raised across the package."""


class FracpotError(Exception):
    """Base class for all package errors."""


class DomainError(FracpotError, ValueError):
    """Argument outside the declared domain of an operation."""


class PoleError(DomainError):
    """Argument sits on a pole of a meromorphic function."""


class SingularityError(DomainError):
    """Kernel evaluated at (or numerically at) its singular point."""


class InvalidSpecError(FracpotError, ValueError):
    """An integrand specification is inconsistent or incomplete."""


class NonIntegrableError(FracpotError, ValueError):
    """The local order of an integrand implies a divergent integral."""


class QuadratureError(FracpotError, RuntimeError):
    """An adaptive scheme failed to meet its tolerance within budget."""


class WraparoundError(FracpotError, ValueError):
    """The periodic box is too small for the kernel tail."""


class RieszAtZeroError(DomainError):
    """A Riesz multiplier was applied to input with a significant zero mode."""
