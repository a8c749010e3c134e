"""EUR traces, the long-time witness W, the late-time rate beta and parameter scans."""

from __future__ import annotations

import logging
import math
from collections.abc import Callable, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np
import numpy.typing as npt
from scipy.integrate import trapezoid

from .dynamics import (
    exceptional_point_antipt,
    exceptional_point_general,
    normalized_states,
    propagators,
    spectrum,
)
from .exceptions import BoundViolationError, InvalidParameterError
from .linalg import RealArray
from .models import (
    DEFAULT_OBSERVABLES,
    AntiPTParams,
    BetaConfig,
    BetaEstimator,
    BetaResult,
    EURTrace,
    GeneralNHParams,
    InitialStateSpec,
    MetricKind,
    ObservablePair,
    PhaseClass,
    ScanResult,
    SystemParams,
    WitnessConfig,
    WitnessResult,
)
from .measures import binary_entropy, born_probabilities, mu_bound

logger = logging.getLogger(__name__)

BOUND_SLACK = 1e-9
TRANSITION_THRESHOLD = 1e-6
MIN_QUADRATURE_POINTS = 2000
POINTS_PER_PERIOD = 20
GENERAL_FIELDS = frozenset({"r", "s", "sigma", "phi"})
ANTIPT_FIELDS = frozenset({"lam", "s", "phi"})

# Scan windows must span several of the slow oscillations found just before
# an exceptional point.
SCAN_BETA_CONFIG = BetaConfig(window_start=50.0, window_end=250.0, n_points=20001)
SCAN_WITNESS_CONFIG = WitnessConfig(horizon=200.0, n_points=8001)


def eur_series(
    system: SystemParams,
    initial: InitialStateSpec,
    observables: ObservablePair,
    times: npt.ArrayLike,
) -> tuple[RealArray, RealArray]:
    """Entropies H(R), H(Q) along a time grid through the Born-rule pipeline."""
    states = normalized_states(propagators(system, times), initial.amplitudes())
    obs_r, obs_q = observables
    h_r = binary_entropy(born_probabilities(states, obs_r))
    h_q = binary_entropy(born_probabilities(states, obs_q))
    return h_r, h_q


def _check_bound(values: RealArray, bound: float, system: SystemParams) -> None:
    deficit = bound - float(np.min(values))
    if deficit > BOUND_SLACK:
        raise BoundViolationError(
            f"EUR falls {deficit:.3g} below its bound {bound} for {system.describe()}"
        )


def eur_trace(
    system: SystemParams,
    initial: InitialStateSpec,
    observables: ObservablePair = DEFAULT_OBSERVABLES,
    t_max: float = 50.0,
    n_steps: int = 5000,
) -> EURTrace:
    """
    EUR on the uniform grid 0, t_max/n_steps, ..., t_max (n_steps + 1 points).

    Raises:
        InvalidParameterError: If t_max <= 0 or n_steps < 2
        BoundViolationError: If any value drops below the uncertainty bound
    """
    if not (math.isfinite(t_max) and t_max > 0) or n_steps < 2:
        raise InvalidParameterError(f"need t_max > 0 and n_steps >= 2, got {t_max}, {n_steps}")
    times = np.linspace(0.0, t_max, n_steps + 1)
    h_r, h_q = eur_series(system, initial, observables, times)
    values = h_r + h_q
    bound = mu_bound(*observables)
    _check_bound(values, bound, system)
    return EURTrace(
        times=times,
        values=values,
        h_r=h_r,
        h_q=h_q,
        bound=bound,
        params=system,
        observables=observables,
        initial=initial,
    )


def default_witness_points(system: SystemParams, horizon: float) -> int:
    """20 points per EUR period when the spectrum has one, at least 2000."""
    period = spectrum(system).period
    if period is None or period <= 0:
        return MIN_QUADRATURE_POINTS
    return max(MIN_QUADRATURE_POINTS, math.ceil(POINTS_PER_PERIOD * horizon / period) + 1)


def _time_average(values: RealArray, times: RealArray) -> float:
    return float(trapezoid(values, times)) / float(times[-1] - times[0])


def witness(
    system: SystemParams,
    initial: InitialStateSpec,
    observables: ObservablePair = DEFAULT_OBSERVABLES,
    horizon: float = 200.0,
    n_points: int | None = None,
    tolerance: float = 1e-3,
) -> WitnessResult:
    """
    Long-time average W = (1/T) int_0^T EUR(t) dt by the composite trapezoid rule.

    ``converged`` compares W(T) against the average over the first half of the
    grid; the infinite-time limit is only approximated by the finite horizon.
    """
    result = _witness(system, initial, observables, horizon, n_points, tolerance)
    if not result.converged:
        logger.warning(
            "witness not converged at horizon %g: |W(T) - W(T/2)| = %.3g",
            horizon,
            result.tail_delta,
        )
    return result


def _witness(
    system: SystemParams,
    initial: InitialStateSpec,
    observables: ObservablePair,
    horizon: float,
    n_points: int | None,
    tolerance: float,
) -> WitnessResult:
    if not (math.isfinite(horizon) and horizon > 0):
        raise InvalidParameterError(f"horizon must be positive, got {horizon}")
    points = n_points if n_points is not None else default_witness_points(system, horizon)
    if points < 100:
        raise InvalidParameterError(f"witness needs n_points >= 100, got {points}")

    times = np.linspace(0.0, horizon, points)
    h_r, h_q = eur_series(system, initial, observables, times)
    values = h_r + h_q
    _check_bound(values, mu_bound(*observables), system)

    w = _time_average(values, times)
    middle = (points - 1) // 2
    w_half = _time_average(values[: middle + 1], times[: middle + 1])
    tail_delta = abs(w - w_half)
    return WitnessResult(
        w=w,
        horizon=horizon,
        n_points=points,
        converged=tail_delta < tolerance,
        tail_delta=tail_delta,
    )


def beta(
    system: SystemParams,
    initial: InitialStateSpec,
    observables: ObservablePair = DEFAULT_OBSERVABLES,
    window_start: float = 50.0,
    window_end: float = 60.0,
    n_points: int = 1000,
    estimator: BetaEstimator = BetaEstimator.RMS,
) -> BetaResult:
    """
    Late-time rate of change of the EUR.

    dEUR/dt is sampled by second-order central differences on the window and
    reduced to its RMS or its largest magnitude. Oscillating traces give a
    finite value, converged traces give zero.
    """
    if not (0 < window_start < window_end) or not math.isfinite(window_end):
        raise InvalidParameterError(
            f"need 0 < window_start < window_end, got [{window_start}, {window_end}]"
        )
    if n_points < 100:
        raise InvalidParameterError(f"beta needs n_points >= 100, got {n_points}")

    times = np.linspace(window_start, window_end, n_points)
    h_r, h_q = eur_series(system, initial, observables, times)
    rate = np.gradient(h_r + h_q, times, edge_order=2)
    if estimator is BetaEstimator.RMS:
        value = float(np.sqrt(np.mean(rate * rate)))
    else:
        value = float(np.max(np.abs(rate)))
    return BetaResult(
        beta=value,
        window_start=window_start,
        window_end=window_end,
        estimator=estimator,
    )


def build_grid(start: float, stop: float, step: float) -> RealArray:
    """start + step * k for k = 0..round((stop - start) / step)."""
    if not all(math.isfinite(x) for x in (start, stop, step)):
        raise InvalidParameterError("grid bounds must be finite")
    if step <= 0 or stop <= start:
        raise InvalidParameterError(f"need step > 0 and stop > start, got {start}, {stop}, {step}")
    count = round((stop - start) / step) + 1
    return start + step * np.arange(count, dtype=np.float64)


@dataclass(frozen=True)
class ScanFamily:
    """
    One-parameter family of Hamiltonians.

    ``param`` names a field of ``base`` ("lambda" is accepted for the anti-PT
    lam). With ``tie_sigma`` a sweep over s moves sigma along with it.
    """

    base: SystemParams
    param: str
    tie_sigma: bool = False

    def __post_init__(self) -> None:
        allowed = ANTIPT_FIELDS if isinstance(self.base, AntiPTParams) else GENERAL_FIELDS
        if self._field not in allowed:
            raise InvalidParameterError(
                f"cannot scan {self.param!r} for model {self.base.model}"
            )

    @property
    def _field(self) -> str:
        return "lam" if self.param == "lambda" else self.param

    def at(self, value: float) -> SystemParams:
        changes = {self._field: float(value)}
        if self.tie_sigma and isinstance(self.base, GeneralNHParams) and self._field == "s":
            changes["sigma"] = float(value)
        return replace(self.base, **changes)

    def analytic_point(self) -> float | None:
        """Exceptional point along the swept parameter, when it has a closed form."""
        base = self.base
        if isinstance(base, AntiPTParams):
            return exceptional_point_antipt(base.lam, base.phi) if self._field == "s" else None
        if self._field == "r":
            return exceptional_point_general(base.s, base.sigma, base.phi)
        return None


def detect_sudden_change(grid: RealArray, metric: RealArray) -> tuple[float, float]:
    """Midpoint and size of the largest |metric[i+1] - metric[i]|."""
    jumps = np.abs(np.diff(metric))
    index = int(np.argmax(jumps))
    return float((grid[index] + grid[index + 1]) / 2), float(jumps[index])


def _check_grid(grid: RealArray) -> RealArray:
    values = np.asarray(grid, dtype=np.float64)
    if values.ndim != 1 or len(values) < 10:
        raise InvalidParameterError("scan grid needs at least 10 points")
    if not np.all(np.isfinite(values)) or not np.all(np.diff(values) > 0):
        raise InvalidParameterError("scan grid must be finite and strictly increasing")
    return values


def scan(
    family: ScanFamily,
    grid: npt.ArrayLike,
    metric_kind: MetricKind,
    *,
    initial: InitialStateSpec | None = None,
    observables: ObservablePair = DEFAULT_OBSERVABLES,
    witness_config: WitnessConfig | None = None,
    beta_config: BetaConfig | None = None,
    max_workers: int | None = None,
    progress: Callable[[int], None] | None = None,
) -> ScanResult:
    """
    Evaluate W or beta along a parameter grid and locate the sudden change.

    Grid points are independent and run on a thread pool; results come back in
    grid order whatever the worker count.
    """
    values = _check_grid(np.asarray(grid, dtype=np.float64))
    start_state = initial if initial is not None else InitialStateSpec.plus()
    w_cfg = witness_config or SCAN_WITNESS_CONFIG
    b_cfg = beta_config or SCAN_BETA_CONFIG

    def evaluate(value: float) -> tuple[float, PhaseClass, bool]:
        system = family.at(value)
        phase = spectrum(system).phase
        if metric_kind is MetricKind.WITNESS:
            result = _witness(
                system,
                start_state,
                observables,
                w_cfg.horizon,
                w_cfg.n_points,
                w_cfg.tolerance,
            )
            metric, converged = result.w, result.converged
        else:
            rate = beta(
                system,
                start_state,
                observables,
                b_cfg.window_start,
                b_cfg.window_end,
                b_cfg.n_points,
                b_cfg.estimator,
            )
            metric, converged = rate.beta, True
        if progress is not None:
            progress(1)
        return metric, phase, converged

    logger.debug(
        "scanning %s over %d points (%s, %s workers)",
        family.param,
        len(values),
        metric_kind.value,
        max_workers or "default",
    )
    with ThreadPoolExecutor(max_workers=max_workers) as pool:
        outcomes: Sequence[tuple[float, PhaseClass, bool]] = list(
            pool.map(evaluate, values.tolist())
        )

    metric = np.array([o[0] for o in outcomes], dtype=np.float64)
    phases = tuple(o[1] for o in outcomes)
    unconverged = sum(1 for o in outcomes if not o[2])
    if unconverged:
        logger.warning(
            "witness not converged at %d of %d grid points", unconverged, len(values)
        )

    critical_point, jump = detect_sudden_change(values, metric)
    logger.debug("largest jump %.3g at %s = %g", jump, family.param, critical_point)
    return ScanResult(
        grid=values,
        metric=metric,
        critical_point=critical_point,
        critical_jump=jump,
        metric_kind=metric_kind,
        param_name=family.param,
        phases=phases,
        transition_detected=jump > TRANSITION_THRESHOLD,
        analytic_point=family.analytic_point(),
    )
