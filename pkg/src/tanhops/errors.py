"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain an operation is defined on."""


class QuadratureError(ArithmeticError):
    """Numerical integration failed to converge; ``estimate`` holds the last value."""

    def __init__(self, message, estimate):
        super().__init__(f"{message} (estimate {estimate!r})")
        self.estimate = estimate


class InsufficientDataError(ValueError):
    """Too few usable points for a fit."""


class ConfigError(ValueError):
    """A study configuration is malformed or violates its invariants."""
