"""Exception types shared across the simulator."""


class ConfigurationError(ValueError):
    """A run configuration or constellation specification is invalid."""


class ValidationFailure(Exception):
    """One or more self-validation checks did not pass."""
