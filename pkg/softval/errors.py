# softval/errors.py
"""
Exception hierarchy for the soft classifier validation toolkit.

Every error raised on purpose by the package derives from SoftValError.
InputError marks problems with the data or the request (CLI exit code 2);
every other SoftValError is a computation error (CLI exit code 3).
"""

from typing import Optional

EXIT_OK = 0
EXIT_INPUT_ERROR = 2
EXIT_COMPUTATION_ERROR = 3


class SoftValError(Exception):
    """Base class for all errors raised by softval."""

    exit_code = EXIT_COMPUTATION_ERROR


class InputError(SoftValError, ValueError):
    """The input data or the request is malformed."""

    exit_code = EXIT_INPUT_ERROR


# --- Input side ---

class ShapeError(InputError):
    """A membership matrix has the wrong dimensionality or size."""


class ShapeMismatch(ShapeError):
    """Reference and prediction (or two matrices to combine) differ in shape."""


class LengthMismatch(ShapeError):
    """Two membership columns differ in length."""


class OutOfRange(InputError):
    """A membership lies outside [0, 1] beyond the clamp tolerance, or is not finite."""


class RowSumViolation(InputError):
    """A closed-world row does not sum to 1 within the row-sum tolerance."""

    def __init__(self, message: str, sample_id: Optional[str] = None, row_sum: Optional[float] = None):
        super().__init__(message)
        self.sample_id = sample_id
        self.row_sum = row_sum


class UnknownClass(InputError):
    """A class name or index does not exist."""


class ClassNameMismatch(InputError):
    """Two objects that must share their class names do not."""


class DomainError(InputError):
    """A conjunction operator received a value outside [0, 1]."""


class ParseError(InputError):
    """A dataset cell could not be parsed as a finite real number."""

    def __init__(self, message: str, line: Optional[int] = None, column: Optional[str] = None):
        super().__init__(message)
        self.line = line
        self.column = column


class SchemaError(InputError):
    """A dataset lacks required columns or has inconsistent headers."""


# --- Computation side ---

class TieError(SoftValError):
    """Winner-takes-all hardening met an exact tie and the rule forbids tie breaking."""


class MixedOperator(SoftValError):
    """Confusion matrices built with different operators cannot be pooled."""


class MixedProvenance(SoftValError):
    """Weak and strong matrices do not come from the same data."""


class MixedMeasure(SoftValError):
    """Results of different measures, classes or operators cannot be averaged."""


class InfeasibleMAE(SoftValError):
    """The weighted MAE exceeds the largest deviation the reference allows."""


class SoftReferenceError(SoftValError):
    """Soft reference rows were found where only crisp references are allowed."""


class TooFewGroups(SoftValError):
    """A spread statistic needs at least two groups."""


class TooLarge(SoftValError):
    """An exhaustive enumeration exceeds its size cap."""


def exit_code_for(error: BaseException) -> int:
    """Map an exception to the CLI exit code."""
    if isinstance(error, SoftValError):
        return error.exit_code
    if isinstance(error, (FileNotFoundError, IsADirectoryError, PermissionError)):
        return EXIT_INPUT_ERROR
    return EXIT_COMPUTATION_ERROR


def annotate(error: BaseException, context: str) -> BaseException:
    """Prefix the message of an error with e.g. the group it was raised in; type and attributes stay."""
    message = error.args[0] if error.args else ""
    error.args = (f"[{context}] {message}",) + tuple(error.args[1:])
    return error
