"""Exception types shared across the package."""


class ConelabError(Exception):
    pass


class ThresholdViolation(ConelabError, ValueError):
    """Raised when a parameter falls on the wrong side of the sharp
    threshold kappa* = (2/n)*sqrt(n-1)."""

    def __init__(self, message, threshold):
        super().__init__(message)
        self.threshold = threshold


class InversionError(ConelabError, RuntimeError):
    """Numerical inversion of a monotone map failed; carries the bracket
    that was being searched."""

    def __init__(self, message, bracket):
        super().__init__(f"{message} (bracket: {bracket})")
        self.bracket = bracket


class ConversionError(ConelabError, RuntimeError):
    """Warped-to-conformal conversion failed; carries the offending radius."""

    def __init__(self, message, r):
        super().__init__(f"{message} at r={r}")
        self.r = r


class PreconditionError(ConelabError, ValueError):
    """A hypothesis of the verified inequality does not hold on the input."""


class CancellationError(ConelabError, ArithmeticError):
    """Second difference lost all significant digits; retry with larger t."""
