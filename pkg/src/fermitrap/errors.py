"""Exception types shared across the package.

The CLI maps these onto process exit codes: ConfigError -> 2,
PreconditionError -> 3, ToleranceError -> 4.
"""


class ConfigError(ValueError):
    """Malformed configuration, input file, or command-line usage."""


class PreconditionError(ValueError):
    """A documented operation precondition was violated by the caller."""


class ToleranceError(RuntimeError):
    """A numerical consistency check failed beyond its documented tolerance."""
