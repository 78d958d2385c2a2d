"""Exception types shared across the package."""


class PgqError(Exception):
    """Base class for errors raised by this package."""


class ConfigError(PgqError):
    """An experiment configuration is invalid (CLI exit code 1)."""


class NumericalError(PgqError):
    """A numerical routine failed: overflow, non-convergence, or a degenerate
    quantity such as a vanishing behavior probability (CLI exit code 2)."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual
