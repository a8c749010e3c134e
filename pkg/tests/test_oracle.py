"""Tests for the RK4 reference integrator."""

import math

import numpy as np
import pytest

from nh_eur.dynamics import hamiltonian, propagator, spectrum
from nh_eur.exceptions import IntegratorError
from nh_eur.models import GeneralNHParams, InitialStateSpec
from nh_eur.oracle import IntegratorConfig, integrate_schrodinger, reference_average


def test_config_step_count() -> None:
    """Test the step count rounds up to cover t_max."""
    assert IntegratorConfig(dt=1e-4, t_max=10.0).n_steps == 100_000
    assert IntegratorConfig(dt=0.3, t_max=1.0).n_steps == 4


@pytest.mark.parametrize(
    "kwargs",
    [{"dt": 0.0}, {"dt": 2.0, "t_max": 1.0}, {"method": "euler"}, {"t_max": float("inf")}],
)
def test_config_rejects(kwargs: dict) -> None:
    """Test invalid settings raise IntegratorError."""
    with pytest.raises(IntegratorError):
        IntegratorConfig(**kwargs)


def test_stability_guard(unbroken) -> None:
    """Test max|H| * dt >= 0.1 is refused."""
    cfg = IntegratorConfig(dt=0.1, t_max=1.0)
    with pytest.raises(IntegratorError):
        integrate_schrodinger(hamiltonian(unbroken), InitialStateSpec.plus().amplitudes(), cfg)


def test_trajectory_ends_at_t_max(unbroken) -> None:
    """Test the last sample lands on t_max."""
    cfg = IntegratorConfig(dt=0.003, t_max=1.0)
    trajectory = integrate_schrodinger(
        hamiltonian(unbroken), InitialStateSpec.plus().amplitudes(), cfg
    )
    assert trajectory.times[-1] == pytest.approx(1.0)
    assert len(trajectory.states) == cfg.n_steps + 1


@pytest.mark.parametrize("fixture", ["unbroken", "broken", "exceptional", "general", "anti_pt"])
def test_closed_form_matches_rk4(fixture: str, request) -> None:
    """Test closed-form propagators against RK4 in every phase."""
    p = request.getfixturevalue(fixture)
    psi0 = InitialStateSpec.plus().amplitudes()
    trajectory = integrate_schrodinger(hamiltonian(p), psi0, IntegratorConfig(dt=1e-3, t_max=5.0))
    for t in (0.0, 1.0, 2.5, 5.0):
        reference = trajectory.at(t)
        closed = propagator(p, t) @ psi0
        scale = max(1.0, float(np.max(np.abs(reference))))
        assert np.max(np.abs(closed - reference)) / scale < 1e-6


@pytest.mark.slow
@pytest.mark.parametrize("fixture", ["unbroken", "broken", "exceptional", "anti_pt"])
def test_closed_form_matches_rk4_fine_grid(fixture: str, request) -> None:
    """Test the acceptance-grade comparison with dt = 1e-4 over [0, 10]."""
    p = request.getfixturevalue(fixture)
    psi0 = InitialStateSpec.plus().amplitudes()
    trajectory = integrate_schrodinger(hamiltonian(p), psi0, IntegratorConfig())
    for t, reference in zip(trajectory.times[::1000], trajectory.states[::1000], strict=True):
        closed = propagator(p, float(t)) @ psi0
        scale = max(1.0, float(np.max(np.abs(reference))))
        assert np.max(np.abs(closed - reference)) / scale < 1e-6


def test_reference_average_linear() -> None:
    """Test the trapezoid rule is exact for linear data."""
    times = np.linspace(0.0, 4.0, 9)
    assert reference_average(2 * times + 1, times) == pytest.approx(5.0)


def test_reference_average_rejects_mismatch() -> None:
    """Test values and times must align."""
    with pytest.raises(IntegratorError):
        reference_average([1.0, 2.0], [0.0, 1.0, 2.0])


def _worst_rk4_error(p, dt: float) -> float:
    psi0 = InitialStateSpec.plus().amplitudes()
    trajectory = integrate_schrodinger(hamiltonian(p), psi0, IntegratorConfig(dt=dt, t_max=4.0))
    errors = []
    for t, reference in zip(trajectory.times, trajectory.states, strict=True):
        closed = propagator(p, float(t)) @ psi0
        errors.append(np.max(np.abs(closed - reference)) / max(1.0, np.max(np.abs(reference))))
    return float(max(errors))


@pytest.mark.parametrize(
    "p",
    [
        GeneralNHParams.pt(r=1.0, s=2.0, phi=math.pi / 2),
        GeneralNHParams.pt(r=2.0, s=1.0, phi=math.pi / 2),
        # Tilted so H is not nilpotent; RK4 is exact for I - iHt.
        GeneralNHParams.pt(r=1.0 / math.sin(math.pi / 3), s=1.0, phi=math.pi / 3),
    ],
    ids=["unbroken", "broken", "exceptional"],
)
def test_rk4_fourth_order_convergence(p) -> None:
    """Test halving dt shrinks the closed-form discrepancy at least 12-fold."""
    coarse = _worst_rk4_error(p, 0.04)
    fine = _worst_rk4_error(p, 0.02)
    assert coarse > 1e-12
    assert coarse / fine >= 12.0


def test_tilted_instance_is_exceptional() -> None:
    """Test the tilted convergence instance sits on its exceptional point."""
    p = GeneralNHParams.pt(r=1.0 / math.sin(math.pi / 3), s=1.0, phi=math.pi / 3)
    assert spectrum(p).phase.is_exceptional
