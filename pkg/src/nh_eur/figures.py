"""Figure presets: the EUR traces of the four regimes and the criticality scans."""

from __future__ import annotations

import logging
import math
from collections.abc import Callable
from dataclasses import dataclass, field, replace
from enum import Enum
from pathlib import Path

from .criticality import (
    SCAN_BETA_CONFIG,
    SCAN_WITNESS_CONFIG,
    ScanFamily,
    build_grid,
    eur_trace,
    scan,
)
from .linalg import RealArray
from .models import (
    DEFAULT_OBSERVABLES,
    AntiPTParams,
    GeneralNHParams,
    InitialStateSpec,
    MetricKind,
    ScanResult,
)
from .output import plot_scan_svg, plot_traces_svg, write_columns_csv, write_scan_csv

logger = logging.getLogger(__name__)

HALF_PI = math.pi / 2
TRACE_T_MAX = 50.0
TRACE_STEPS = 5000


class FigureId(str, Enum):
    FIG1 = "fig1"
    FIG2A = "fig2a"
    FIG2B = "fig2b"
    FIG3A = "fig3a"
    FIG3B = "fig3b"
    FIG4A = "fig4a"
    FIG4B = "fig4b"


@dataclass(frozen=True)
class ScanPreset:
    """A scan figure: family, grid and metric."""

    family: ScanFamily
    start: float
    stop: float
    step: float
    metric: MetricKind
    title: str

    @property
    def grid(self) -> RealArray:
        return build_grid(self.start, self.stop, self.step)

    def metric_settings(self) -> str:
        if self.metric is MetricKind.BETA:
            b = SCAN_BETA_CONFIG
            return (
                f"window={b.window_start:g}:{b.window_end:g} n_points={b.n_points} "
                f"estimator={b.estimator.value}"
            )
        w = SCAN_WITNESS_CONFIG
        return f"horizon={w.horizon:g} n_points={w.n_points}"

    def describe(self) -> str:
        return (
            f"{self.family.base.describe()} scan={self.family.param}:"
            f"{self.start:.17g}:{self.stop:.17g}:{self.step:.17g} metric={self.metric.value} "
            f"{self.metric_settings()} initial=plus observables=sigma_x;sigma_z"
        )


@dataclass(frozen=True)
class TraceCurve:
    label: str
    params: GeneralNHParams
    initial: InitialStateSpec


@dataclass
class FigureOutput:
    """Files written for one figure, and the scan behind it if any."""

    figure: FigureId
    paths: list[Path] = field(default_factory=list)
    scan: ScanResult | None = None


_PT_SWEEP = ScanFamily(GeneralNHParams.pt(r=0.5, s=2.0, phi=HALF_PI), "r")
_GENERAL_SWEEP = ScanFamily(
    GeneralNHParams(r=0.2, s=math.sqrt(2) / 2, sigma=math.sqrt(2), phi=HALF_PI), "r"
)
_ANTIPT_SWEEP = ScanFamily(AntiPTParams(lam=1.0, s=0.2, phi=0.0), "s")

SCAN_PRESETS: dict[FigureId, ScanPreset] = {
    FigureId.FIG2A: ScanPreset(
        _PT_SWEEP, 0.5, 3.5, 0.01, MetricKind.WITNESS, "W(r), PT symmetric, s = sigma = 2"
    ),
    FigureId.FIG2B: ScanPreset(
        _GENERAL_SWEEP, 0.2, 2.0, 0.01, MetricKind.WITNESS,
        "W(r), sigma = sqrt(2), s = sqrt(2)/2",
    ),
    FigureId.FIG3A: ScanPreset(
        _PT_SWEEP, 0.5, 3.5, 0.01, MetricKind.BETA, "beta(r), PT symmetric, s = sigma = 2"
    ),
    FigureId.FIG3B: ScanPreset(
        _GENERAL_SWEEP, 0.2, 2.0, 0.01, MetricKind.BETA,
        "beta(r), sigma = sqrt(2), s = sqrt(2)/2",
    ),
    FigureId.FIG4A: ScanPreset(
        _ANTIPT_SWEEP, 0.2, 2.0, 0.01, MetricKind.BETA, "beta(s), anti-PT, lambda = 1"
    ),
    FigureId.FIG4B: ScanPreset(
        _ANTIPT_SWEEP, 0.2, 2.0, 0.01, MetricKind.WITNESS, "W(s), anti-PT, lambda = 1"
    ),
}

# |+> does not move under any Hermitian instance, so the reference starts from |0>.
FIG1_CURVES = (
    TraceCurve("hermitian", GeneralNHParams.pt(r=1.0, s=2.0, phi=0.0), InitialStateSpec.zero()),
    TraceCurve("unbroken", GeneralNHParams.pt(r=1.0, s=2.0, phi=HALF_PI), InitialStateSpec.plus()),
    TraceCurve("broken", GeneralNHParams.pt(r=2.0, s=1.0, phi=HALF_PI), InitialStateSpec.plus()),
    TraceCurve(
        "exceptional_point",
        GeneralNHParams.pt(r=1.0, s=1.0, phi=HALF_PI),
        InitialStateSpec.plus(),
    ),
)


def scan_preset(figure: FigureId, caption_phi: bool = False) -> ScanPreset:
    """
    Scan settings for a figure id.

    ``caption_phi`` moves the anti-PT presets to phi = pi/2, where |+> is
    stationary and no transition shows up.
    """
    preset = SCAN_PRESETS[figure]
    if caption_phi and isinstance(preset.family.base, AntiPTParams):
        base = replace(preset.family.base, phi=HALF_PI)
        preset = replace(
            preset,
            family=replace(preset.family, base=base),
            title=preset.title + ", phi = pi/2",
        )
    return preset


def _stem(figure: FigureId, caption_phi: bool) -> str:
    if caption_phi and figure in (FigureId.FIG4A, FigureId.FIG4B):
        return f"{figure.value}_caption_phi"
    return figure.value


def render_fig1(out_dir: Path) -> FigureOutput:
    traces = {
        curve.label: eur_trace(
            curve.params, curve.initial, DEFAULT_OBSERVABLES, TRACE_T_MAX, TRACE_STEPS
        )
        for curve in FIG1_CURVES
    }
    first = traces[FIG1_CURVES[0].label]
    columns = {label: trace.values for label, trace in traces.items()}
    description = "; ".join(
        f"{curve.label}: {curve.params.describe()} initial={curve.initial.label}"
        for curve in FIG1_CURVES
    )
    description += f"; observables=sigma_x;sigma_z t_max={TRACE_T_MAX:g} n_steps={TRACE_STEPS}"
    output = FigureOutput(FigureId.FIG1)
    output.paths.append(write_columns_csv(out_dir / "fig1.csv", first.times, columns, description))
    output.paths.append(
        plot_traces_svg(
            out_dir / "fig1.svg",
            first.times,
            columns,
            first.bound,
            "EUR for Hermitian, unbroken, broken and exceptional-point dynamics",
        )
    )
    return output


def render_scan(
    figure: FigureId,
    out_dir: Path,
    *,
    caption_phi: bool = False,
    max_workers: int | None = None,
    progress: Callable[[int], None] | None = None,
) -> FigureOutput:
    preset = scan_preset(figure, caption_phi)
    logger.debug("rendering %s: %s", figure.value, preset.describe())
    result = scan(
        preset.family,
        preset.grid,
        preset.metric,
        max_workers=max_workers,
        progress=progress,
    )
    stem = _stem(figure, caption_phi)
    output = FigureOutput(figure, scan=result)
    output.paths.append(write_scan_csv(out_dir / f"{stem}.csv", result, preset.describe()))
    output.paths.append(plot_scan_svg(out_dir / f"{stem}.svg", result, preset.title))
    return output


def render_figure(
    figure: FigureId,
    out_dir: Path,
    *,
    caption_phi: bool = False,
    max_workers: int | None = None,
    progress: Callable[[int], None] | None = None,
) -> FigureOutput:
    """Write the CSV and SVG of one figure into out_dir."""
    if figure is FigureId.FIG1:
        return render_fig1(out_dir)
    return render_scan(
        figure, out_dir, caption_phi=caption_phi, max_workers=max_workers, progress=progress
    )


def grid_size(figure: FigureId) -> int:
    """Number of scan points behind a figure; 0 for the trace figure."""
    if figure is FigureId.FIG1:
        return 0
    return len(SCAN_PRESETS[figure].grid)
