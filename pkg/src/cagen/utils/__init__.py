"""Utility modules for cagen."""

from .errors import (
    CagenError,
    ConfigurationError,
    NotationParseError,
    ContractViolation,
    TupleSpaceError,
    OperatorError,
    SuiteFormatError,
    VerificationError,
    BenchmarkError,
    StatisticsError,
    ErrorSeverity,
    get_error_severity,
    exit_code_for,
    format_error_message,
)
from .error_handler import ErrorHandler, error_handler
from .logging import (
    configure_logging,
    get_logger,
    log_error_with_context,
)

__all__ = [
    # Errors
    "CagenError",
    "ConfigurationError",
    "NotationParseError",
    "ContractViolation",
    "TupleSpaceError",
    "OperatorError",
    "SuiteFormatError",
    "VerificationError",
    "BenchmarkError",
    "StatisticsError",
    "ErrorSeverity",
    "get_error_severity",
    "exit_code_for",
    "format_error_message",
    # Error handling
    "ErrorHandler",
    "error_handler",
    # Logging
    "configure_logging",
    "get_logger",
    "log_error_with_context",
]
