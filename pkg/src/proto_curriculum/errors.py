"""Exception types shared across the package."""


class FormatError(ValueError):
    """A file does not match its declared on-disk format."""


class ValidationError(ValueError):
    """Data violates a structural invariant (shape, finiteness, ranges)."""


class ConfigError(ValueError):
    """A parameter or configuration value is outside its legal domain."""


class DegenerateDistributionError(ValueError):
    """An operation is undefined for a distribution with no spread."""
