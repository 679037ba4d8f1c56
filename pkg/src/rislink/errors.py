"""Exception types shared across the package."""


class ConfigError(ValueError):
    """A configuration violates a documented constraint."""


class NumericalError(RuntimeError):
    """A numerical routine failed to reach its required tolerance."""
