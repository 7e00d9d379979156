"""
Error handling utilities and custom exceptions
"""

import traceback
from collections import Counter
from enum import Enum
from typing import Any, Dict, List, Optional


class ErrorType(Enum):
    """Error type enumeration"""
    VALIDATION_ERROR = "validation_error"
    EMPTY_CELL = "empty_cell"
    DIMENSION_MISMATCH = "dimension_mismatch"
    INVALID_DESIGN = "invalid_design"
    DEGENERATE_TRACE = "degenerate_trace"
    ZERO_DIAGONAL = "zero_diagonal"
    NOT_POSITIVE_DEFINITE = "not_positive_definite"
    PARSE_ERROR = "parse_error"
    SCHEMA_ERROR = "schema_error"
    CONFIG_ERROR = "config_error"
    PROCESSING_ERROR = "processing_error"
    UNKNOWN_ERROR = "unknown_error"


class RankTestError(Exception):
    """Base exception for the rank test engine"""

    def __init__(
        self,
        error_type: ErrorType,
        message: str,
        details: Optional[Dict[str, Any]] = None,
        original_exception: Optional[Exception] = None
    ):
        self.error_type = error_type
        self.message = message
        self.details = details or {}
        self.original_exception = original_exception
        super().__init__(self.message)

    def to_dict(self) -> Dict[str, Any]:
        """Convert error to dictionary for serialization"""
        return {
            "error_type": self.error_type.value,
            "message": self.message,
            "details": self.details,
            "traceback": traceback.format_exc() if self.original_exception else None
        }

    @classmethod
    def from_exception(cls, exc: Exception, error_type: ErrorType = ErrorType.UNKNOWN_ERROR) -> 'RankTestError':
        """Create RankTestError from generic exception"""
        return cls(
            error_type=error_type,
            message=str(exc),
            original_exception=exc
        )


class DataValidationError(RankTestError):
    """Dataset content errors"""

    def __init__(self, message: str, field: Optional[str] = None, value: Optional[Any] = None):
        super().__init__(
            error_type=ErrorType.VALIDATION_ERROR,
            message=message,
            details={"field": field, "value": value}
        )
        self.field = field
        self.value = value


class EmptyCellError(RankTestError):
    """A group x occasion cell cannot support variance estimation"""

    def __init__(self, message: str, cells: List[tuple]):
        super().__init__(
            error_type=ErrorType.EMPTY_CELL,
            message=message,
            details={"cells": [list(c) for c in cells]}
        )
        self.cells = cells


class DimensionMismatchError(RankTestError):
    """Array shapes disagree"""

    def __init__(self, message: str, expected: Optional[Any] = None, actual: Optional[Any] = None):
        super().__init__(
            error_type=ErrorType.DIMENSION_MISMATCH,
            message=message,
            details={"expected": expected, "actual": actual}
        )
        self.expected = expected
        self.actual = actual


class InvalidDesignError(RankTestError):
    """Hypothesis kind not supported for the design"""

    def __init__(self, message: str, kind: Optional[str] = None, a: Optional[int] = None, d: Optional[int] = None):
        super().__init__(
            error_type=ErrorType.INVALID_DESIGN,
            message=message,
            details={"kind": kind, "a": a, "d": d}
        )
        self.kind = kind


class DegenerateTraceError(RankTestError):
    """tr(T V) is not positive"""

    def __init__(self, message: str, trace: float):
        super().__init__(
            error_type=ErrorType.DEGENERATE_TRACE,
            message=message,
            details={"trace": trace}
        )
        self.trace = trace


class ZeroDiagonalError(RankTestError):
    """Diagonal covariance entry equal to zero"""

    def __init__(self, message: str, indices: List[int]):
        super().__init__(
            error_type=ErrorType.ZERO_DIAGONAL,
            message=message,
            details={"indices": indices}
        )
        self.indices = indices


class NotPositiveDefiniteError(RankTestError):
    """Copula correlation matrix is not positive definite"""

    def __init__(self, message: str):
        super().__init__(error_type=ErrorType.NOT_POSITIVE_DEFINITE, message=message)


class ParseError(RankTestError):
    """Unparseable value in an input table"""

    def __init__(self, message: str, row: Optional[int] = None, column: Optional[str] = None):
        super().__init__(
            error_type=ErrorType.PARSE_ERROR,
            message=message,
            details={"row": row, "column": column}
        )
        self.row = row
        self.column = column


class SchemaError(RankTestError):
    """Input table does not match the declared schema"""

    def __init__(self, message: str, column: Optional[str] = None):
        super().__init__(
            error_type=ErrorType.SCHEMA_ERROR,
            message=message,
            details={"column": column}
        )
        self.column = column


class ConfigError(RankTestError):
    """Invalid simulation or analysis configuration"""

    def __init__(self, message: str, pointer: Optional[str] = None):
        super().__init__(
            error_type=ErrorType.CONFIG_ERROR,
            message=message,
            details={"pointer": pointer}
        )
        self.pointer = pointer


def get_error_suggestion(error_type: ErrorType) -> list[str]:
    """Get user-friendly suggestions based on error type"""
    suggestions = {
        ErrorType.VALIDATION_ERROR: [
            "Check that every observed value is a finite number.",
            "Every group needs at least one subject."
        ],
        ErrorType.EMPTY_CELL: [
            "Every group x occasion cell needs at least two observed values.",
            "Drop the affected occasion or merge sparse groups before testing."
        ],
        ErrorType.DIMENSION_MISMATCH: [
            "All subjects must have the same number of occasions.",
            "Shift vectors and contrast matrices must match the design dimensions."
        ],
        ErrorType.INVALID_DESIGN: [
            "The group hypothesis needs at least two groups.",
            "The time hypothesis needs at least two occasions.",
            "The interaction hypothesis needs both."
        ],
        ErrorType.DEGENERATE_TRACE: [
            "All ranks are tied within the cells touched by the hypothesis.",
            "The ANOVA-type statistic is undefined for such data."
        ],
        ErrorType.ZERO_DIAGONAL: [
            "At least one cell has constant values.",
            "The modified ANOVA-type statistic needs positive variance in every cell."
        ],
        ErrorType.NOT_POSITIVE_DEFINITE: [
            "Choose a correlation parameter strictly between -1 and 1."
        ],
        ErrorType.PARSE_ERROR: [
            "Check the reported row and column for a malformed number.",
            "Missing values must use the configured missing token (default 'NA')."
        ],
        ErrorType.SCHEMA_ERROR: [
            "Check the column names passed on the command line.",
            "Subject identifiers must be unique within a group."
        ],
        ErrorType.CONFIG_ERROR: [
            "Fix the configuration field named by the JSON pointer."
        ],
        ErrorType.PROCESSING_ERROR: [
            "An error occurred while computing the statistics.",
            "Re-run with --log-level DEBUG for details."
        ],
        ErrorType.UNKNOWN_ERROR: [
            "An unexpected error occurred.",
            "Re-run with --log-level DEBUG for details."
        ]
    }

    return suggestions.get(error_type, suggestions[ErrorType.UNKNOWN_ERROR])


class ErrorTally:
    """Counts failures by error type, e.g. across Monte Carlo replications"""

    def __init__(self):
        self.counts: Counter = Counter()

    def record_type(self, error_type: str):
        self.counts[error_type] += 1

    def total(self) -> int:
        return sum(self.counts.values())

    def as_dict(self) -> Dict[str, int]:
        return dict(sorted(self.counts.items()))


def format_error_for_user(error: RankTestError) -> str:
    """Format error message for end users"""
    base_message = f"Error: {error.message}"

    suggestions = get_error_suggestion(error.error_type)
    if suggestions:
        suggestion_text = "Suggestions:\n" + "\n".join(f"  - {s}" for s in suggestions[:3])
        return base_message + "\n" + suggestion_text

    return base_message
