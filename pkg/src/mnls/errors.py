"""Exception types shared across the package."""


class ConfigError(ValueError):
    """A run configuration violates a documented precondition."""


class NumericsError(RuntimeError):
    """A time integration produced NaN/Inf; carries the offending step."""

    def __init__(self, message, step_index=None):
        super().__init__(message)
        self.step_index = step_index


class ThetaRuleError(ValueError):
    """A theta-average rule is below the exactness threshold."""
