"""Exception types shared across the package.

Each carries an ``exit_code`` so the command line tool can map failure
classes to distinct process exit statuses.
"""


class SpecValidationError(ValueError):
    """Input system or configuration rejected by validation."""

    exit_code = 2


class CapExceeded(RuntimeError):
    """A work or memory cap was hit before the computation finished."""

    exit_code = 3


class OracleMismatch(RuntimeError):
    """An independent cross-check disagreed with the primary computation."""

    exit_code = 4


class StructureError(RuntimeError):
    """The combinatorial structure violated an expected property."""

    exit_code = 5
