"""Exception types raised by gqme."""


class GQMEError(Exception):
    """Base class for all gqme errors."""


class ZeroVector(GQMEError, ValueError):
    """Raw vector too small to normalize."""


class DimensionMismatch(GQMEError, ValueError):
    """Operands have incompatible shapes."""


class NonHermitian(GQMEError, ValueError):
    """Matrix or result violates Hermiticity beyond herm_tol."""


class NonFinite(GQMEError, ArithmeticError):
    """A state function returned NaN or infinity."""


class BudgetExceeded(GQMEError, ValueError):
    """Torus grid would exceed the configured point budget."""


class UnknownDegree(GQMEError, ValueError):
    """Custom state function has no declared trigonometric degree."""


class OutOfRange(GQMEError, ValueError):
    """Target energy lies outside the open spectral interval."""


class Degenerate(GQMEError, ValueError):
    """Spectrum consists of a single repeated level."""


class Overflow(GQMEError, ArithmeticError):
    """Shift-stable evaluation still overflowed."""


class NoConvergence(GQMEError, RuntimeError):
    """Iterative solver hit its iteration cap or found no root."""


class TruncationTooSmall(GQMEError, ValueError):
    """Truncated basis drops more weight than tail_tol allows."""


class NonPositiveAmplitude(GQMEError, ArithmeticError):
    """Forward recurrence produced a negative amplitude."""


class InsufficientTail(GQMEError, ValueError):
    """Too few usable amplitudes for an asymptotic diagnostic."""
