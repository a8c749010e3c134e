"""Self-checks: closed forms against the RK4 oracle and the Born-rule pipeline."""

from __future__ import annotations

import logging
import math
from collections.abc import Callable, Iterable

import numpy as np

from .criticality import (
    SCAN_BETA_CONFIG,
    ScanFamily,
    build_grid,
    eur_series,
    eur_trace,
    scan,
    witness,
)
from .dynamics import (
    evolve_normalized,
    hamiltonian,
    hermitian_map,
    propagator,
    propagator_general,
    rho_plus_closed,
    unitary_equivalent,
)
from .exceptions import NHEURError
from .linalg import RealArray, inv2, max_norm
from .measures import (
    antipt_probabilities_closed,
    binary_entropy,
    born_probabilities,
    measure,
    prob_closed_ep,
    prob_closed_general,
    pt_probabilities_closed,
)
from .models import (
    DEFAULT_OBSERVABLES,
    SIGMA_X,
    SIGMA_Y,
    SIGMA_Z,
    AntiPTParams,
    CheckResult,
    GeneralNHParams,
    InitialStateSpec,
    MetricKind,
    SystemParams,
    ValidationLevel,
)
from .oracle import IntegratorConfig, integrate_schrodinger, reference_average

logger = logging.getLogger(__name__)

HALF_PI = math.pi / 2
CLOSED_FORM_TOL = 1e-9
ORACLE_TOL = 1e-6
CRITICAL_TOL = 0.02

UNBROKEN = GeneralNHParams.pt(r=1.0, s=2.0, phi=HALF_PI)
BROKEN = GeneralNHParams.pt(r=2.0, s=1.0, phi=HALF_PI)
EXCEPTIONAL = GeneralNHParams.pt(r=1.0, s=1.0, phi=HALF_PI)
GENERAL = GeneralNHParams(r=0.5, s=math.sqrt(2) / 2, sigma=math.sqrt(2), phi=HALF_PI)
ANTI_PT = AntiPTParams(lam=1.0, s=0.5, phi=0.0)

ORACLE_CASES: dict[str, SystemParams] = {
    "unbroken": UNBROKEN,
    "broken": BROKEN,
    "exceptional point": EXCEPTIONAL,
    "general": GENERAL,
    "anti-PT": ANTI_PT,
}

Check = Callable[[ValidationLevel], CheckResult]


def _worst(values: Iterable[float]) -> float:
    return float(max(values, default=0.0))


def _sample_times(level: ValidationLevel, t_max: float = 10.0) -> RealArray:
    return np.linspace(0.0, t_max, 100 if level is ValidationLevel.FULL else 25)


def _oracle_check(label: str, system: SystemParams) -> Check:
    def run(level: ValidationLevel) -> CheckResult:
        cfg = (
            IntegratorConfig(dt=1e-4, t_max=10.0)
            if level is ValidationLevel.FULL
            else IntegratorConfig(dt=1e-3, t_max=5.0)
        )
        psi0 = InitialStateSpec.plus().amplitudes()
        trajectory = integrate_schrodinger(hamiltonian(system), psi0, cfg)
        stride = max(1, len(trajectory.times) // 200)
        errors = []
        for t, reference in zip(
            trajectory.times[::stride], trajectory.states[::stride], strict=True
        ):
            closed = propagator(system, float(t)) @ psi0
            scale = max(1.0, float(np.max(np.abs(reference))))
            errors.append(float(np.max(np.abs(closed - reference))) / scale)
        return CheckResult(run.__name__, _worst(errors), ORACLE_TOL)

    run.__name__ = f"propagator vs RK4 ({label})"
    return run


def check_hermitian_map(level: ValidationLevel) -> CheckResult:
    eta = hermitian_map(UNBROKEN).eta
    eta_inv = inv2(eta)
    errors = [
        max_norm(eta @ propagator_general(UNBROKEN, t) @ eta_inv - unitary_equivalent(UNBROKEN, t))
        for t in _sample_times(level).tolist()
    ]
    return CheckResult("similarity map to unitary evolution", _worst(errors), CLOSED_FORM_TOL)


def check_density_closed(level: ValidationLevel) -> CheckResult:
    plus = InitialStateSpec.plus().amplitudes()
    errors = []
    for system in (UNBROKEN, BROKEN, EXCEPTIONAL, GENERAL):
        for t in _sample_times(level).tolist():
            rho = evolve_normalized(propagator_general(system, t), plus).rho
            errors.append(max_norm(rho_plus_closed(system, t) - rho))
    return CheckResult("density matrix from |+>", _worst(errors), CLOSED_FORM_TOL)


def check_plus_probabilities(level: ValidationLevel) -> CheckResult:
    plus = InitialStateSpec.plus().amplitudes()
    errors = []
    for system in (UNBROKEN, BROKEN, EXCEPTIONAL, GENERAL):
        for t in _sample_times(level).tolist():
            rho = evolve_normalized(propagator_general(system, t), plus).rho
            p_x, p_z = pt_probabilities_closed(system, t)
            errors.append(abs(p_x.p_plus - measure(rho, SIGMA_X).p_plus))
            errors.append(abs(p_z.p_plus - measure(rho, SIGMA_Z).p_plus))
    return CheckResult("sigma_x/sigma_z probabilities from |+>", _worst(errors), CLOSED_FORM_TOL)


_EIGEN_STATES = (
    InitialStateSpec.plus(),
    InitialStateSpec.zero(),
    InitialStateSpec.eigen(1.0),
)


def check_eigenbasis_probability(level: ValidationLevel) -> CheckResult:
    errors = []
    for system in (UNBROKEN, BROKEN):
        for state in _EIGEN_STATES:
            for t in _sample_times(level).tolist():
                rho = evolve_normalized(propagator_general(system, t), state.amplitudes()).rho
                for obs in (SIGMA_X, SIGMA_Y, SIGMA_Z):
                    closed = prob_closed_general(system, state, obs, t)
                    errors.append(abs(closed - measure(rho, obs).p_plus))
    return CheckResult("eigenbasis probability", _worst(errors), CLOSED_FORM_TOL)


def check_printed_normalization(level: ValidationLevel) -> CheckResult:
    errors = []
    for state in _EIGEN_STATES:
        rho = evolve_normalized(propagator_general(UNBROKEN, 0.0), state.amplitudes()).rho
        for obs in (SIGMA_X, SIGMA_Z):
            printed = prob_closed_general(UNBROKEN, state, obs, 0.0, printed_normalization=True)
            errors.append(abs(printed - measure(rho, obs).p_plus))
    return CheckResult(
        "printed eigenbasis normalization",
        _worst(errors),
        CLOSED_FORM_TOL,
        finding=True,
        detail="a* b in the first term of N breaks p(0) = Born rule",
    )


def check_exceptional_probability(level: ValidationLevel) -> CheckResult:
    errors = []
    for theta in (0.0, 0.7, HALF_PI, 2.5):
        amplitudes = InitialStateSpec.eigen(math.pi - theta).amplitudes()
        for t in _sample_times(level).tolist():
            rho = evolve_normalized(propagator_general(EXCEPTIONAL, t), amplitudes).rho
            for obs in (SIGMA_X, SIGMA_Y, SIGMA_Z):
                closed = prob_closed_ep(EXCEPTIONAL, theta, obs, t)
                errors.append(abs(closed - measure(rho, obs).p_plus))
    return CheckResult("exceptional-point probability", _worst(errors), CLOSED_FORM_TOL)


def check_antipt_probabilities(level: ValidationLevel) -> CheckResult:
    zero = InitialStateSpec.zero().amplitudes()
    errors = []
    for s in (0.5, 1.0, 1.5):
        system = AntiPTParams(lam=1.0, s=s, phi=0.0)
        for t in _sample_times(level).tolist():
            rho = evolve_normalized(propagator(system, t), zero).rho
            p_x, p_z = antipt_probabilities_closed(system, t)
            errors.append(abs(p_x.p_plus - measure(rho, SIGMA_X).p_plus))
            errors.append(abs(p_z.p_plus - measure(rho, SIGMA_Z).p_plus))
    return CheckResult("anti-PT probabilities from |0>", _worst(errors), CLOSED_FORM_TOL)


def check_bound(level: ValidationLevel) -> CheckResult:
    deficits = []
    for system in (*ORACLE_CASES.values(), GeneralNHParams.pt(r=1.0, s=2.0, phi=0.0)):
        for state in (InitialStateSpec.plus(), InitialStateSpec.zero()):
            trace = eur_trace(system, state, DEFAULT_OBSERVABLES, t_max=50.0, n_steps=2000)
            deficits.append(max(0.0, trace.bound - trace.minimum))
    return CheckResult("uncertainty bound", _worst(deficits), 1e-9)


def check_periodicity(level: ValidationLevel) -> CheckResult:
    period = math.pi / math.sqrt(3)
    times = np.linspace(0.0, 5 * period, 500 if level is ValidationLevel.FULL else 100)
    plus = InitialStateSpec.plus()
    h_r, h_q = eur_series(UNBROKEN, plus, DEFAULT_OBSERVABLES, times)
    later_r, later_q = eur_series(UNBROKEN, plus, DEFAULT_OBSERVABLES, times + period)
    now, later = h_r + h_q, later_r + later_q
    return CheckResult("unbroken period pi/omega", float(np.max(np.abs(later - now))), 1e-9)


def check_witness_oracle(level: ValidationLevel) -> CheckResult:
    horizon = 100.0
    cfg = IntegratorConfig(dt=1e-3 if level is ValidationLevel.FULL else 5e-3, t_max=horizon)
    plus = InitialStateSpec.plus()
    trajectory = integrate_schrodinger(hamiltonian(BROKEN), plus.amplitudes(), cfg)
    # Norm grows like exp(sqrt(3) t); still finite at t = 100.
    states = trajectory.states / np.linalg.norm(trajectory.states, axis=1)[:, None]
    obs_r, obs_q = DEFAULT_OBSERVABLES
    values = binary_entropy(born_probabilities(states, obs_r)) + binary_entropy(
        born_probabilities(states, obs_q)
    )
    reference = reference_average(values, trajectory.times)
    closed = witness(BROKEN, plus, DEFAULT_OBSERVABLES, horizon, n_points=len(trajectory.times))
    return CheckResult(
        "witness vs RK4 average (broken)",
        abs(closed.w - reference),
        ORACLE_TOL,
        detail=f"W = {closed.w:.6f}",
    )


def check_pt_scan(level: ValidationLevel) -> CheckResult:
    family = ScanFamily(GeneralNHParams.pt(r=0.5, s=2.0, phi=HALF_PI), "r")
    result = scan(
        family, build_grid(0.5, 3.5, 0.01), MetricKind.BETA, beta_config=SCAN_BETA_CONFIG
    )
    return CheckResult(
        "PT critical point (beta scan)",
        abs(result.critical_point - 2.0),
        CRITICAL_TOL + 1e-12,
        detail=f"detected r = {result.critical_point:.4f}",
    )


QUICK_CHECKS: tuple[Check, ...] = (
    *(_oracle_check(label, system) for label, system in ORACLE_CASES.items()),
    check_hermitian_map,
    check_density_closed,
    check_plus_probabilities,
    check_eigenbasis_probability,
    check_exceptional_probability,
    check_antipt_probabilities,
    check_bound,
    check_periodicity,
    check_witness_oracle,
    check_printed_normalization,
)
FULL_CHECKS: tuple[Check, ...] = (*QUICK_CHECKS, check_pt_scan)


def _safe(check: Check, level: ValidationLevel) -> CheckResult:
    try:
        return check(level)
    except NHEURError as e:
        name = getattr(check, "__name__", "check").removeprefix("check_").replace("_", " ")
        logger.debug("check %s raised %r", name, e)
        return CheckResult(name, math.inf, 0.0, detail=str(e))


def run_checks(level: ValidationLevel = ValidationLevel.QUICK) -> list[CheckResult]:
    """Run the suite for a level; a check that raises is reported as failed."""
    checks = FULL_CHECKS if level is ValidationLevel.FULL else QUICK_CHECKS
    results = [_safe(check, level) for check in checks]
    failed = [r.name for r in results if not r.passed]
    logger.debug("%d checks, %d failed", len(results), len(failed))
    return results
