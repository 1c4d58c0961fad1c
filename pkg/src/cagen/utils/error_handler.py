"""Error handling utilities for the command-line front end."""

from typing import Optional

from rich.console import Console
from rich.panel import Panel

from .errors import (
    CagenError,
    ErrorSeverity,
    exit_code_for,
    format_error_message,
    get_error_severity,
)
from .logging import get_logger, log_error_with_context

logger = get_logger(__name__)


class ErrorHandler:
    """Centralized error handler for the application."""

    def __init__(self, console: Optional[Console] = None):
        self.console = console or Console(stderr=True)

    def handle_error(
        self,
        error: Exception,
        context: str = "",
        show_to_user: bool = True
    ) -> int:
        """Handle an error with logging and user feedback.

        Args:
            error: Exception instance
            context: Additional context string
            show_to_user: Whether to print the error panel

        Returns:
            CLI exit code for the error
        """
        log_error_with_context(error, context)

        if show_to_user:
            self._show_error_to_user(error, context)

        return exit_code_for(error)

    def _show_error_to_user(self, error: Exception, context: str = "") -> None:
        """Display error message to user in a formatted way."""
        severity = get_error_severity(error)
        message = format_error_message(error, include_context=isinstance(error, CagenError))

        color_map = {
            ErrorSeverity.LOW: "yellow",
            ErrorSeverity.MEDIUM: "bright_yellow",
            ErrorSeverity.HIGH: "red",
            ErrorSeverity.CRITICAL: "bold red"
        }
        color = color_map.get(severity, "red")

        title = f"Error - {severity.upper()}"
        if context:
            full_message = f"{message}\n\nContext: {context}"
        else:
            full_message = message

        panel = Panel(
            full_message,
            title=title,
            border_style=color,
            padding=(1, 2)
        )

        self.console.print(panel)


# Global error handler instance
error_handler = ErrorHandler()
