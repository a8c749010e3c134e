"""Terminal reporting using Rich."""

from __future__ import annotations

from collections.abc import Callable, Iterator, Sequence
from contextlib import contextmanager
from pathlib import Path

from rich.console import Console
from rich.markup import escape
from rich.panel import Panel
from rich.progress import (
    BarColumn,
    MofNCompleteColumn,
    Progress,
    TextColumn,
    TimeElapsedColumn,
)
from rich.table import Table

from .models import CheckResult

STATUS_STYLES = {"pass": "bold green", "finding": "yellow", "FAIL": "bold red"}


class ReportUI:
    """Handles user-facing output for figure, run and validate commands."""

    def __init__(self, console: Console | None = None) -> None:
        self.console = console or Console(legacy_windows=False)
        self.err_console = Console(stderr=True, legacy_windows=False)

    def print_summary(self, line: str) -> None:
        """
        Print one machine-greppable result line.

        Markup, highlighting and wrapping are off so the text comes out verbatim.
        """
        self.console.print(line, markup=False, highlight=False, soft_wrap=True)

    def display_checks(self, results: Sequence[CheckResult]) -> None:
        """
        Display validation results in a formatted table.

        Args:
            results: Check outcomes in the order they ran
        """
        table = Table(title="Validation", show_header=True)
        table.add_column("Check", style="cyan", no_wrap=True)
        table.add_column("Worst discrepancy", justify="right")
        table.add_column("Tolerance", justify="right", style="dim")
        table.add_column("Status")

        for result in results:
            style = STATUS_STYLES[result.status]
            table.add_row(
                result.name,
                f"{result.discrepancy:.3e}",
                f"{result.tolerance:.1e}",
                f"[{style}]{result.status}[/{style}]",
            )

        self.console.print(table)
        for result in results:
            if result.detail and (result.finding or not result.passed):
                self.console.print(f"[dim]{escape(result.name)}: {escape(result.detail)}[/dim]")

    def display_written(self, paths: Sequence[Path]) -> None:
        for path in paths:
            self.console.print(f"[dim]wrote[/dim] {escape(str(path))}")

    @contextmanager
    def progress(self, description: str, total: int) -> Iterator[Callable[[int], None]]:
        """Progress bar over scan points; yields the advance callback."""
        columns = (
            TextColumn("{task.description}"),
            BarColumn(),
            MofNCompleteColumn(),
            TimeElapsedColumn(),
        )
        with Progress(
            *columns, console=self.err_console, transient=True, disable=total == 0
        ) as progress:
            task = progress.add_task(description, total=total)
            yield lambda n: progress.advance(task, n)

    def display_error(self, message: str) -> None:
        """
        Display an error message in a red panel.

        Args:
            message: Error message to display
        """
        panel = Panel(
            f"[bold red]{escape(message)}[/bold red]",
            title="Error",
            border_style="red",
        )
        self.console.print(panel)

    def display_success(self, message: str) -> None:
        """
        Display a success message in a green panel.

        Args:
            message: Success message to display
        """
        panel = Panel(
            f"[bold green]{message}[/bold green]",
            title="Success",
            border_style="green",
        )
        self.console.print(panel)
