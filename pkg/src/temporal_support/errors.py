"""Exception hierarchy shared by every layer of the package."""

from __future__ import annotations


class TemporalSupportError(Exception):
    """Base class for all errors raised by this package."""


class TimeFormatError(TemporalSupportError, ValueError):
    pass


class IntegrityError(TemporalSupportError):
    """A catalog or event table violates one of the data-model invariants."""


class ExpressionSyntaxError(TemporalSupportError):
    """Malformed constraint or regular-expression text.

    ``position`` is the 0-based character offset where parsing failed.
    """

    def __init__(self, message: str, text: str, position: int):
        self.message = message
        self.text = text
        self.position = position
        super().__init__(f"{message} at position {position}: {text!r}")


class EvaluationError(TemporalSupportError):
    """A constraint could not be evaluated against an ECO or tuple."""


class UnknownFunctionError(EvaluationError):
    pass


class UnknownAttributeError(EvaluationError):
    def __init__(self, attribute: str, category: str | None = None):
        self.attribute = attribute
        self.category = category
        where = f" in category {category!r}" if category else ""
        super().__init__(f"unknown attribute {attribute!r}{where}")


class UsageError(TemporalSupportError, ValueError):
    """An operation was called with arguments outside its contract."""


class OracleGuardError(TemporalSupportError):
    """Input too large for an exhaustive reference computation."""


class OracleMismatchError(TemporalSupportError):
    """The engine and the brute-force oracle disagreed."""


class WorkspaceFormatError(TemporalSupportError):
    def __init__(self, path: str, line: int, message: str):
        self.path = path
        self.line = line
        self.message = message
        super().__init__(f"{path}:{line}: {message}")
