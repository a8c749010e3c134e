"""Command-line interface for nh-eur."""

from __future__ import annotations

import logging
import os
from collections.abc import Iterator
from contextlib import contextmanager
from dataclasses import dataclass
from pathlib import Path

import typer
from rich.console import Console
from rich.logging import RichHandler

from .config import RunConfig, load_config
from .criticality import eur_trace, scan
from .dynamics import spectrum
from .exceptions import BoundViolationError, ConfigError, NHEURError
from .figures import FigureId, FigureOutput, grid_size, render_figure
from .models import ScanResult, ValidationLevel
from .output import plot_scan_svg, plot_traces_svg, write_scan_csv, write_trace_csv
from .ui import ReportUI
from .validation import run_checks

logger = logging.getLogger(__name__)

EXIT_CONFIG = 1
EXIT_IO = 2
EXIT_VALIDATION = 3

app = typer.Typer(
    name="nh-eur",
    help="Entropic uncertainty dynamics of two-level non-Hermitian systems",
    add_completion=False,
    no_args_is_help=True,
)


@dataclass
class AppState:
    out: Path
    threads: int | None


def _configure_logging(verbose: bool) -> None:
    handler = RichHandler(
        console=Console(stderr=True), show_path=False, rich_tracebacks=False
    )
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.WARNING,
        format="%(message)s",
        handlers=[handler],
        force=True,
    )


@app.callback()
def main(
    ctx: typer.Context,
    out: Path = typer.Option(
        Path("out"),
        "--out",
        "-o",
        help="Directory for CSV and SVG output",
        file_okay=False,
        dir_okay=True,
    ),
    threads: int | None = typer.Option(
        None,
        "--threads",
        "-t",
        min=1,
        help="Worker threads for scans (default: all cores); never changes results",
    ),
    verbose: bool = typer.Option(False, "--verbose", "-v", help="Show debug logging"),
) -> None:
    """
    Simulate the entropic uncertainty relation under non-Hermitian evolution.

    Reproduces the EUR traces and criticality scans as CSV and SVG, runs custom
    configurations and checks the closed forms against a numerical oracle.
    """
    _configure_logging(verbose)
    ctx.obj = AppState(out=out, threads=threads or os.cpu_count())


@contextmanager
def _exit_codes(ui: ReportUI) -> Iterator[None]:
    """Render library errors and map them onto exit codes."""
    try:
        yield
    except ConfigError as e:
        ui.display_error(f"Configuration error: {e}")
        raise typer.Exit(EXIT_CONFIG) from e
    except OSError as e:
        ui.display_error(f"I/O error: {e}")
        raise typer.Exit(EXIT_IO) from e
    except BoundViolationError as e:
        ui.display_error(f"Validation failed: {e}")
        raise typer.Exit(EXIT_VALIDATION) from e
    except NHEURError as e:
        ui.display_error(str(e))
        raise typer.Exit(EXIT_VALIDATION) from e
    except KeyboardInterrupt:
        ui.console.print("\n[yellow]Cancelled by user.[/yellow]")
        raise typer.Exit(0) from None


def _scan_summary(label: str, result: ScanResult) -> str:
    analytic = "none" if result.analytic_point is None else f"{result.analytic_point:.6g}"
    return (
        f"{label} param={result.param_name} metric={result.metric_kind.value} "
        f"critical_point={result.critical_point:.6g} jump={result.critical_jump:.3g} "
        f"transition_detected={str(result.transition_detected).lower()} "
        f"exceptional_point={analytic}"
    )


def _figure_summary(output: FigureOutput) -> str:
    if output.scan is not None:
        return _scan_summary(output.figure.value, output.scan)
    return f"{output.figure.value} traces=hermitian,unbroken,broken,exceptional_point"


@app.command()
def figure(
    ctx: typer.Context,
    figure_id: FigureId = typer.Argument(..., help="Figure to reproduce"),
    caption_phi: bool = typer.Option(
        False,
        "--caption-phi",
        help="Run the anti-PT scans at phi = pi/2 instead of phi = 0",
    ),
) -> None:
    """Write the CSV and SVG of one figure and print its detected critical point."""
    state: AppState = ctx.obj
    ui = ReportUI()
    with _exit_codes(ui):
        with ui.progress(f"{figure_id.value}", grid_size(figure_id)) as advance:
            output = render_figure(
                figure_id,
                state.out,
                caption_phi=caption_phi,
                max_workers=state.threads,
                progress=advance,
            )
        ui.print_summary(_figure_summary(output))
        ui.display_written(output.paths)


def _output_dir(cfg: RunConfig, config_path: Path, default: Path) -> Path:
    if cfg.output_directory is None:
        return default
    if cfg.output_directory.is_absolute():
        return cfg.output_directory
    return config_path.parent / cfg.output_directory


def _run_trace(cfg: RunConfig, out_dir: Path, stem: str, ui: ReportUI) -> list[Path]:
    assert cfg.t_max is not None and cfg.n_steps is not None
    trace = eur_trace(cfg.system, cfg.initial, cfg.observables, cfg.t_max, cfg.n_steps)
    description = cfg.describe()
    paths = []
    if "csv" in cfg.formats:
        paths.append(write_trace_csv(out_dir / f"{stem}.csv", trace, description))
    if "svg" in cfg.formats:
        paths.append(
            plot_traces_svg(
                out_dir / f"{stem}.svg",
                trace.times,
                {"EUR": trace.values},
                trace.bound,
                cfg.system.describe(),
            )
        )
    ui.print_summary(
        f"{stem} {cfg.system.describe()} phase={spectrum(cfg.system).phase} "
        f"min_eur={trace.minimum:.6g} final_eur={trace.values[-1]:.6g} bound={trace.bound:.6g}"
    )
    return paths


def _run_scan(
    cfg: RunConfig, out_dir: Path, stem: str, ui: ReportUI, threads: int | None
) -> list[Path]:
    assert cfg.scan is not None
    settings = cfg.scan
    grid = settings.grid
    with ui.progress(stem, len(grid)) as advance:
        result = scan(
            cfg.family(),
            grid,
            settings.metric,
            initial=cfg.initial,
            observables=cfg.observables,
            witness_config=settings.witness,
            beta_config=settings.beta,
            max_workers=threads,
            progress=advance,
        )
    paths = []
    if "csv" in cfg.formats:
        paths.append(write_scan_csv(out_dir / f"{stem}.csv", result, cfg.describe()))
    if "svg" in cfg.formats:
        paths.append(plot_scan_svg(out_dir / f"{stem}.svg", result, cfg.system.describe()))
    ui.print_summary(_scan_summary(stem, result))
    return paths


@app.command()
def run(
    ctx: typer.Context,
    config_path: Path = typer.Argument(
        ...,
        metavar="CONFIG",
        help="Run configuration (key = value lines)",
        dir_okay=False,
    ),
) -> None:
    """Run the trace or scan described by a configuration file."""
    state: AppState = ctx.obj
    ui = ReportUI()
    with _exit_codes(ui):
        cfg = load_config(config_path)
        out_dir = _output_dir(cfg, config_path, state.out)
        stem = config_path.stem
        if cfg.is_scan:
            paths = _run_scan(cfg, out_dir, stem, ui, state.threads)
        else:
            paths = _run_trace(cfg, out_dir, stem, ui)
        ui.display_written(paths)


@app.command()
def validate(
    full: bool = typer.Option(
        False, "--full", help="Acceptance-grade grids and the PT critical-point scan"
    ),
) -> None:
    """Check closed forms against the RK4 oracle and the Born-rule pipeline."""
    ui = ReportUI()
    level = ValidationLevel.FULL if full else ValidationLevel.QUICK
    with _exit_codes(ui):
        results = run_checks(level)
        ui.display_checks(results)
        failed = [r for r in results if not r.passed]
        if failed:
            worst = max(failed, key=lambda r: r.discrepancy / max(r.tolerance, 1e-300))
            ui.display_error(
                f"{len(failed)} of {len(results)} checks failed; worst: {worst.name} "
                f"discrepancy {worst.discrepancy:.3e} (tolerance {worst.tolerance:.1e})"
            )
            raise typer.Exit(EXIT_VALIDATION)
        ui.display_success(f"All {len(results)} checks passed ({level.value})")


if __name__ == "__main__":
    app()
