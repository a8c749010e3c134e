"""CSV and SVG writers for EUR traces and parameter scans."""

from __future__ import annotations

import logging
from collections.abc import Mapping
from pathlib import Path

import matplotlib as mpl
import numpy as np
from matplotlib.figure import Figure

from . import __version__
from .linalg import RealArray
from .models import EURTrace, MetricKind, ScanResult

logger = logging.getLogger(__name__)

TRACE_SCHEMA = "t,eur,h_r,h_q,bound"
SCAN_SCHEMA = "param,metric,phase"
NUMBER_FORMAT = "%.17g"

_METRIC_LABELS = {MetricKind.WITNESS: "W", MetricKind.BETA: "beta"}

# Fixed ids and no date keep repeated SVG writes byte-identical.
_SVG_RC = {"svg.hashsalt": "nh-eur", "svg.fonttype": "path"}
_SVG_METADATA = {"Date": None}


def csv_header(description: str, schema: str) -> str:
    """Comment line with the artifact version and parameters, then the column names."""
    return f"# nh-eur {__version__} {description}\n{schema}"


def _prepare(path: Path) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    return path


def write_trace_csv(path: Path, trace: EURTrace, description: str) -> Path:
    """One row per time sample, bound repeated on every row."""
    bound = np.full_like(trace.times, trace.bound)
    table = np.column_stack((trace.times, trace.values, trace.h_r, trace.h_q, bound))
    np.savetxt(
        _prepare(path),
        table,
        fmt=NUMBER_FORMAT,
        delimiter=",",
        header=csv_header(description, TRACE_SCHEMA),
        comments="",
    )
    logger.debug("wrote %d trace rows to %s", len(table), path)
    return path


def write_columns_csv(
    path: Path, times: RealArray, columns: Mapping[str, RealArray], description: str
) -> Path:
    """Several curves sharing one time axis, columns in mapping order."""
    schema = ",".join(("t", *columns))
    table = np.column_stack((times, *columns.values()))
    np.savetxt(
        _prepare(path),
        table,
        fmt=NUMBER_FORMAT,
        delimiter=",",
        header=csv_header(description, schema),
        comments="",
    )
    logger.debug("wrote %d rows x %d curves to %s", len(table), len(columns), path)
    return path


def write_scan_csv(path: Path, result: ScanResult, description: str) -> Path:
    rows = [
        f"{value:.17g},{metric:.17g},{phase}"
        for value, metric, phase in zip(
            result.grid, result.metric, _phase_labels(result), strict=True
        )
    ]
    np.savetxt(
        _prepare(path),
        np.array(rows, dtype=str),
        fmt="%s",
        header=csv_header(description, SCAN_SCHEMA),
        comments="",
    )
    logger.debug("wrote %d scan rows to %s", len(rows), path)
    return path


def _phase_labels(result: ScanResult) -> list[str]:
    if result.phases:
        return [str(phase) for phase in result.phases]
    return ["unknown"] * len(result.grid)


def _save_svg(fig: Figure, path: Path) -> Path:
    with mpl.rc_context(_SVG_RC):
        fig.savefig(_prepare(path), format="svg", metadata=_SVG_METADATA)
    logger.debug("wrote %s", path)
    return path


def plot_traces_svg(
    path: Path,
    times: RealArray,
    curves: Mapping[str, RealArray],
    bound: float,
    title: str,
) -> Path:
    """EUR(t) curves with the uncertainty bound as a dotted line."""
    fig = Figure(figsize=(7, 4.5))
    ax = fig.add_subplot()
    for label, values in curves.items():
        ax.plot(times, values, label=label, linewidth=1.2)
    ax.axhline(bound, color="grey", linestyle=":", linewidth=1.0, label="bound")
    ax.set_xlabel("t")
    ax.set_ylabel("EUR (bits)")
    ax.set_title(title)
    ax.legend(loc="best", fontsize="small")
    fig.tight_layout()
    return _save_svg(fig, path)


def plot_scan_svg(path: Path, result: ScanResult, title: str) -> Path:
    """Metric against the swept parameter, detected and analytic points marked."""
    fig = Figure(figsize=(7, 4.5))
    ax = fig.add_subplot()
    label = _METRIC_LABELS[result.metric_kind]
    ax.plot(result.grid, result.metric, marker=".", markersize=2, linewidth=1.0, label=label)
    if result.transition_detected:
        ax.axvline(
            result.critical_point,
            color="tab:red",
            linestyle="--",
            linewidth=1.0,
            label=f"detected {result.critical_point:.3f}",
        )
    if result.analytic_point is not None:
        ax.axvline(
            result.analytic_point,
            color="tab:green",
            linestyle=":",
            linewidth=1.0,
            label=f"exceptional point {result.analytic_point:.3f}",
        )
    ax.set_xlabel(result.param_name)
    ax.set_ylabel(label)
    ax.set_title(title)
    ax.legend(loc="best", fontsize="small")
    fig.tight_layout()
    return _save_svg(fig, path)
