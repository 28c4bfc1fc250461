"""Rich-based console output for copyless-check."""

import json
import os
import sys
from contextlib import contextmanager
from typing import Any, Generator, Optional

from rich.console import Console
from rich.markup import escape
from rich.panel import Panel
from rich.progress import (
    BarColumn,
    MofNCompleteColumn,
    Progress,
    SpinnerColumn,
    TextColumn,
    TimeElapsedColumn,
)
from rich.status import Status
from rich.table import Table
from rich.text import Text
from rich.theme import Theme

COPYLESS_THEME = Theme(
    {
        "success": "green",
        "error": "bold red",
        "warning": "bold yellow",
        "info": "blue",
        "step": "cyan",
        "header": "bold cyan",
        "debug": "dim",
    }
)


def _supports_unicode() -> bool:
    try:
        encoding = sys.stdout.encoding or ""
        return encoding.lower() in ("utf-8", "utf8")
    except AttributeError:
        return False


def _is_terminal() -> bool:
    """Detect a terminal even where ``isatty`` is unreliable (Git Bash, VS Code)."""
    if sys.stdout.isatty():
        return True
    term = os.environ.get("TERM", "")
    if term and term != "dumb":
        return True
    return bool(os.environ.get("WT_SESSION"))


_UNICODE = _supports_unicode()
_CHECK = "✓" if _UNICODE else "+"
_CROSS = "✗" if _UNICODE else "x"
_BULLET = "•" if _UNICODE else "*"
_ARROW = "→" if _UNICODE else "->"


class Logger:
    """Console logger with a human mode and a quiet mode for JSON output.

    In quiet mode only ``record`` and ``result`` write to stdout; errors and
    warnings go to stderr and everything else is dropped.
    """

    def __init__(self, verbose: bool = False, quiet: bool = False):
        """Initialize logger.

        Args:
            verbose: Show debug output.
            quiet: Keep stdout for structured records only.
        """
        self.verbose = verbose
        self.quiet = quiet
        force = True if not sys.stdout.isatty() and _is_terminal() else None
        self.console = Console(
            theme=COPYLESS_THEME, legacy_windows=False, force_terminal=force
        )
        self.err_console = Console(theme=COPYLESS_THEME, stderr=True)
        self._progress_active: bool = False

    @property
    def _human(self) -> Console:
        return self.err_console if self.quiet else self.console

    def success(self, message: str) -> None:
        if not self.quiet:
            self.console.print(
                f" [success]{_CHECK}[/success] "
                f"[success]{escape(message)}[/success]"
            )

    def error(self, message: str) -> None:
        self._human.print(
            f" [error]{_CROSS}[/error] [error]{escape(message)}[/error]",
            highlight=False,
        )

    def warning(self, message: str) -> None:
        self._human.print(
            f" [warning]![/warning] [warning]{escape(message)}[/warning]",
            highlight=False,
        )

    def info(self, message: str) -> None:
        if not self.quiet:
            self.console.print(f" [info]{_BULLET}[/info] {escape(message)}")

    def step(self, message: str) -> None:
        if not self.quiet:
            self.console.print(f" [step]{_ARROW}[/step] {escape(message)}")

    def debug(self, message: str) -> None:
        """Print debug message (only if verbose)."""
        if self.verbose:
            self._human.print(f"   [debug]{escape(message)}[/debug]")

    def header(self, message: str) -> None:
        if self.quiet:
            return
        self.console.print()
        self.console.print(
            Panel(
                Text(message, style="header", justify="center"),
                border_style="cyan",
                padding=(0, 2),
            )
        )

    def blank(self) -> None:
        if not self.quiet:
            self.console.print()

    def result(self, text: str) -> None:
        """Print a plain command result on stdout, without markup or wrapping."""
        self.console.out(text, highlight=False)

    def record(self, payload: dict[str, Any]) -> None:
        """Print one structured record as a single JSON line on stdout."""
        self.console.out(json.dumps(payload, sort_keys=True), highlight=False)

    @contextmanager
    def status(self, message: str) -> Generator[Optional[Status], None, None]:
        """Spinner for long operations; a plain step line inside a progress bar.

        Example:
            with logger.status("Exploring...") as status:
                explore(...)
        """
        if self.quiet:
            yield None
        elif self._progress_active:
            self.step(message)
            yield None
        else:
            with self.console.status(
                f"[step]{message}[/step]",
                spinner="line" if not _UNICODE else "dots",
            ) as status:
                yield status

    @contextmanager
    def progress(
        self, description: str, total: int
    ) -> Generator[tuple[Progress, int], None, None]:
        """Progress bar for batch operations.

        Yields:
            Tuple of (Progress object, task_id) for calling progress.update().
        """
        spinner = "line" if not _UNICODE else "dots"
        progress = Progress(
            SpinnerColumn(spinner),
            TextColumn("[step]{task.description}[/step]"),
            BarColumn(),
            MofNCompleteColumn(),
            TimeElapsedColumn(),
            console=self._human,
            disable=self.quiet,
        )
        self._progress_active = True
        try:
            with progress:
                task_id = progress.add_task(description, total=total)
                yield progress, task_id
        finally:
            self._progress_active = False

    def table(
        self,
        title: str,
        columns: list[str],
        rows: list[list[str]],
        styles: Optional[list[str]] = None,
    ) -> None:
        """Print a formatted table.

        Args:
            title: Table title.
            columns: Column headers.
            rows: Row data, one list of strings per row.
            styles: Optional style per column.
        """
        if self.quiet:
            return
        table = Table(title=title, border_style="cyan", safe_box=not _UNICODE)
        for i, col in enumerate(columns):
            style = styles[i] if styles and i < len(styles) else None
            table.add_column(col, style=style)
        for row in rows:
            table.add_row(*row)
        self.console.print(table)


_logger: Optional[Logger] = None


def get_logger(verbose: bool = False, quiet: bool = False) -> Logger:
    """Get or create the global logger instance.

    Args:
        verbose: Show debug output.
        quiet: Structured-output mode.

    Returns:
        Logger instance.
    """
    global _logger
    if _logger is None:
        _logger = Logger(verbose=verbose, quiet=quiet)
    return _logger


def reset_logger() -> None:
    """Drop the global logger so the next ``get_logger`` builds a new one."""
    global _logger
    _logger = None
