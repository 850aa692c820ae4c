"""Exceptions raised by the calculus app.

Every error the workbench raises on purpose derives from WorkbenchError, so the
management commands and views can turn them into CommandError / HTTP 400 in one
place.
"""


class WorkbenchError(Exception):
    """Root of all workbench errors."""


class ParseError(WorkbenchError):
    """Text does not conform to the process grammar.

    Attributes:
        line (int): 1-based line of the offending token.
        column (int): 1-based column of the offending token.
    """

    def __init__(self, message, line, column):
        super().__init__(f"{message} (line {line}, column {column})")
        self.line = line
        self.column = column


class ReservedNameError(ParseError):
    """The channel `o`, a numeral or `unit` used in binding position, or
    `unit` used as a channel."""


class RenamingError(WorkbenchError):
    """A renaming is not injective where it has to be."""


class DialectError(WorkbenchError):
    """A term does not belong to the requested dialect."""


class BoundExceeded(WorkbenchError):
    """A configured size bound was exceeded."""


class NotAnAutomorphism(WorkbenchError):
    """A node/arc permutation pair does not preserve arc types."""


class NotAsync(DialectError):
    """The confluence diamond was requested for a term outside pi_a."""


class NoDiamond(WorkbenchError):
    """The diamond failed to close on a pi_a term (internal error)."""


class PreconditionFailed(WorkbenchError):
    """A hypothesis of the adversary construction does not hold."""


class SymmetryBroken(WorkbenchError):
    """The adversary lost symmetry at a round boundary (internal error)."""


class Stuck(WorkbenchError):
    """The adversary found no step it may take.

    Attributes:
        reason (str): 'deadlock' when nothing is enabled, 'announcements-only'
            when only outputs on `o` are enabled.
    """

    def __init__(self, message, reason):
        super().__init__(message)
        self.reason = reason


class DisconnectedSpec(WorkbenchError):
    """A hypergraph spec is not connected."""


class EncodingDialectError(DialectError):
    """An encoding produced a term outside its target dialect."""


class NonUniformEncoding(WorkbenchError):
    """An encoding failed the uniformity audit.

    Attributes:
        report: the UniformityReport holding the counterexample.
    """

    def __init__(self, message, report):
        super().__init__(message)
        self.report = report


class TraceMismatch(WorkbenchError):
    """Replaying a trace diverged from its records.

    Attributes:
        index (int): the record index where replay failed.
    """

    def __init__(self, message, index):
        super().__init__(f"record {index}: {message}")
        self.index = index
