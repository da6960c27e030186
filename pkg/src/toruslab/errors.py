"""Exception types shared across the package.

The split matters for the command-line harness, which maps each class to a
distinct exit code (config errors, numerical guards, invariant breaches).
"""


class ConfigError(ValueError):
    """Invalid experiment configuration or malformed serialized input."""


class ResolutionError(ValueError):
    """A grid, band, or oversampling parameter is too small for the request.

    Raised whenever a computation would alias or a certificate would be
    meaningless at the requested resolution.
    """


class InvariantError(RuntimeError):
    """An internal numerical invariant failed; results cannot be trusted."""
