"""Exception taxonomy shared across the package.

The CLI maps these onto its exit codes: configuration problems exit with 2,
infeasible requests with 3, and resource-cap violations with 4.
"""


class ConfigError(ValueError):
    """A configuration document violates the schema or references bad data."""


class InfeasibleError(RuntimeError):
    """No parameter choice can satisfy the requested error budget."""


class CapacityError(RuntimeError):
    """A dense object would exceed a configured qubit cap."""
