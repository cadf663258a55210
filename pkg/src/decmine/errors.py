"""Exception hierarchy shared across the package.

``InputError`` covers everything caused by bad user input (malformed files,
unknown ids, bad configuration); the CLI maps it to exit code 2.
"""


class InputError(Exception):
    """Bad input supplied by the caller."""


class LogParseError(InputError):
    """Malformed event-log data."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        if line is not None:
            message = f"{message} (line {line}, column {column})"
        super().__init__(message)
        self.line = line
        self.column = column


class ConfigError(InputError):
    """Invalid configuration or column mapping."""


class PnmlError(InputError):
    """Malformed PNML data."""


class NetError(InputError):
    """Structurally invalid Petri net or illegal firing."""


class NotFoundError(InputError):
    """Referenced entity (session, job, artifact) does not exist."""


class UnknownDecisionPointError(NotFoundError):
    """Referenced decision point does not exist in the net."""
