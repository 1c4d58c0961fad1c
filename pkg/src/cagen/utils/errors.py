"""Custom exception classes and error handling utilities."""

from typing import Any, Dict, Optional


class CagenError(Exception):
    """Base exception class for cagen."""

    def __init__(
        self,
        message: str,
        error_code: Optional[str] = None,
        context: Optional[Dict[str, Any]] = None
    ):
        super().__init__(message)
        self.message = message
        self.error_code = error_code
        self.context = context or {}

    def __str__(self) -> str:
        if self.error_code:
            return f"[{self.error_code}] {self.message}"
        return self.message


class ConfigurationError(CagenError):
    """Invalid covering array, engine or application configuration."""

    def __init__(
        self,
        message: str,
        config_key: Optional[str] = None,
        value: Optional[Any] = None
    ):
        context = {}
        if config_key:
            context["config_key"] = config_key
        if value is not None:
            context["value"] = str(value)

        super().__init__(message, "CONFIG_ERROR", context)


class NotationParseError(CagenError):
    """CA notation could not be parsed."""

    def __init__(
        self,
        message: str,
        text: Optional[str] = None,
        position: Optional[int] = None
    ):
        context = {}
        if text is not None:
            context["text"] = text
        if position is not None:
            context["position"] = position

        super().__init__(message, "NOTATION_ERROR", context)
        self.position = position


class ContractViolation(CagenError):
    """A pre-condition of an operation was violated by the caller."""

    def __init__(
        self,
        message: str,
        operation: Optional[str] = None,
        value: Optional[Any] = None
    ):
        context = {}
        if operation:
            context["operation"] = operation
        if value is not None:
            context["value"] = str(value)

        super().__init__(message, "CONTRACT_ERROR", context)


class TupleSpaceError(CagenError):
    """The interaction tuple space is too large to materialise."""

    def __init__(
        self,
        message: str,
        tuple_count: Optional[int] = None,
        limit: Optional[int] = None
    ):
        context = {}
        if tuple_count is not None:
            context["tuple_count"] = tuple_count
        if limit is not None:
            context["limit"] = limit

        super().__init__(message, "TUPLE_SPACE_ERROR", context)


class OperatorError(CagenError):
    """A position update produced a value that cannot be clamped."""

    def __init__(self, message: str, value: Optional[Any] = None):
        context = {}
        if value is not None:
            context["value"] = str(value)

        super().__init__(message, "OPERATOR_ERROR", context)


class SuiteFormatError(CagenError):
    """Malformed suite or result CSV file."""

    def __init__(
        self,
        message: str,
        path: Optional[str] = None,
        line: Optional[int] = None
    ):
        context = {}
        if path:
            context["path"] = path
        if line is not None:
            context["line"] = line

        super().__init__(message, "SUITE_FORMAT_ERROR", context)


class VerificationError(CagenError):
    """A test suite does not cover every interaction tuple."""

    def __init__(
        self,
        message: str,
        missing: Optional[int] = None,
        configuration: Optional[str] = None
    ):
        context = {}
        if missing is not None:
            context["missing"] = missing
        if configuration:
            context["configuration"] = configuration

        super().__init__(message, "VERIFICATION_ERROR", context)


class BenchmarkError(CagenError):
    """Benchmark harness failure."""

    def __init__(
        self,
        message: str,
        benchmark: Optional[str] = None,
        run_index: Optional[int] = None
    ):
        context = {}
        if benchmark:
            context["benchmark"] = benchmark
        if run_index is not None:
            context["run_index"] = run_index

        super().__init__(message, "BENCHMARK_ERROR", context)


class StatisticsError(CagenError):
    """Invalid input to a statistical test."""

    def __init__(self, message: str, reason: Optional[str] = None):
        context = {}
        if reason:
            context["reason"] = reason

        super().__init__(message, "STATISTICS_ERROR", context)


# Error severity levels
class ErrorSeverity:
    """Error severity levels."""
    LOW = "low"
    MEDIUM = "medium"
    HIGH = "high"
    CRITICAL = "critical"


def get_error_severity(error: Exception) -> str:
    """Get error severity level based on exception type.

    Args:
        error: Exception instance

    Returns:
        Severity level string
    """
    if isinstance(error, (NotationParseError, SuiteFormatError, StatisticsError)):
        return ErrorSeverity.LOW
    elif isinstance(error, (ConfigurationError, TupleSpaceError, VerificationError)):
        return ErrorSeverity.MEDIUM
    elif isinstance(error, (ContractViolation, OperatorError, BenchmarkError)):
        return ErrorSeverity.CRITICAL
    else:
        return ErrorSeverity.HIGH


def exit_code_for(error: Exception) -> int:
    """Map an exception to the CLI exit code.

    1 = verification failure, 2 = usage/parse error,
    3 = internal invariant violation.
    """
    if isinstance(error, VerificationError):
        return 1
    if isinstance(
        error,
        (ConfigurationError, NotationParseError, SuiteFormatError,
         StatisticsError, TupleSpaceError),
    ):
        return 2
    return 3


def format_error_message(error: Exception, include_context: bool = True) -> str:
    """Format error message for display.

    Args:
        error: Exception instance
        include_context: Whether to include context information

    Returns:
        Formatted error message
    """
    if isinstance(error, CagenError):
        message = str(error)
        if include_context and error.context:
            context_str = ", ".join(f"{k}={v}" for k, v in error.context.items())
            message += f" ({context_str})"
        return message
    else:
        return f"Unexpected error: {str(error)}"
