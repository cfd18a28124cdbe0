"""Exception types raised across the package."""


class SemiscaleError(Exception):
    """Base class for every error raised by semiscale."""


class EvaluationError(SemiscaleError, ValueError):
    """A function returned a non-finite value at a sample point."""

    def __init__(self, label, x, value):
        self.label = label
        self.x = x
        self.value = value
        super().__init__(f"{label!s} is not finite at x={x!r} (value {value!r})")


class DomainError(SemiscaleError, ValueError):
    """A time or exponent argument lies outside its admissible range."""


class SpectralParameterError(SemiscaleError, ValueError):
    """Resolvent requested at a lambda not above the growth bound."""


class ShiftRequiredError(SemiscaleError, ValueError):
    """Extrapolation needs a negative effective growth bound."""


class ConfigError(SemiscaleError, ValueError):
    """An experiment config or a label could not be parsed."""


class ChainConsistencyError(SemiscaleError, RuntimeError):
    """A classification verdict vector violates the inclusion chain."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}
