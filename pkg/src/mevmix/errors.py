"""Exception types shared across the package."""


class MevMixError(Exception):
    """Base class for all errors raised by mevmix."""


class DomainError(MevMixError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class ShapeError(MevMixError, ValueError):
    """Array dimensions do not match the copula or model dimension."""


class ConfigurationError(MevMixError, ValueError):
    """Invalid run configuration (sample sizes, thresholds, flags)."""


class UnsupportedOperationError(MevMixError):
    """The operation is not defined for this object (e.g. sampling a derived subcopula)."""


class ModelValidationError(MevMixError, ValueError):
    """A model or copula violates its invariants."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


class SpecError(MevMixError, ValueError):
    """Malformed model-spec document."""
