"""Shared exception types."""


class ConfigError(ValueError):
    """Invalid or inconsistent scenario configuration."""


class NumericalError(RuntimeError):
    """A quadrature or series evaluation failed to reach its tolerance."""
