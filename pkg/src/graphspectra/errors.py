"""Exception hierarchy shared across the package.

Exit-code mapping used by the CLI: ConfigError -> 2,
PreconditionError -> 3, NumericError -> 4.
"""


class GraphSpectraError(Exception):
    """Base class for all package errors."""


class ConfigError(GraphSpectraError):
    """Invalid parameters, exceeded enumeration caps, bad schemas."""

    exit_code = 2


class PreconditionError(GraphSpectraError):
    """An input violates an operation's contract (wrong shape, wrong
    source, unmet moment condition, uncovered window)."""

    exit_code = 3


class NumericError(GraphSpectraError):
    """Non-finite data or a numerical routine that failed to converge."""

    exit_code = 4
