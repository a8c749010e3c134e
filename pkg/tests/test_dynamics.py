"""Tests for Hamiltonians, spectra and propagators."""

import math

import numpy as np
import pytest
from scipy.linalg import expm

from nh_eur.dynamics import (
    basis_in_eigenvectors,
    build_antipt,
    build_general,
    classify_phase,
    eigen_amplitudes,
    eigenvectors_general,
    evolve_normalized,
    exceptional_point_antipt,
    exceptional_point_general,
    hamiltonian,
    hermitian_map,
    is_anti_pt_symmetric,
    is_pt_symmetric,
    normalized_states,
    propagator,
    propagator_ep,
    propagator_general,
    propagators,
    rho_plus_closed,
    spectrum,
    spectrum_antipt,
    spectrum_general,
    unitary_equivalent,
)
from nh_eur.exceptions import InvalidParameterError, NormalizationError, PhaseError
from nh_eur.linalg import inv2
from nh_eur.models import AntiPTParams, GeneralNHParams, InitialStateSpec, PhaseKind

HALF_PI = math.pi / 2


def test_build_general_unbroken_example(unbroken) -> None:
    """Test (r=1, s=sigma=2, phi=pi/2) gives [[i, 2], [2, -i]]."""
    np.testing.assert_allclose(build_general(unbroken), [[1j, 2], [2, -1j]], atol=1e-15)


def test_build_general_broken_example(broken) -> None:
    """Test (r=2, s=sigma=1, phi=pi/2) gives [[2i, 1], [1, -2i]]."""
    np.testing.assert_allclose(build_general(broken), [[2j, 1], [1, -2j]], atol=1e-15)


def test_pt_symmetry(unbroken, general) -> None:
    """Test s = sigma is PT symmetric and s != sigma is not."""
    assert is_pt_symmetric(build_general(unbroken))
    assert not is_pt_symmetric(build_general(general))


def test_anti_pt_symmetry() -> None:
    """Test the anti-PT model anticommutes with PT."""
    H = build_antipt(AntiPTParams(lam=1.3, s=0.7, phi=0.4))
    assert is_anti_pt_symmetric(H)
    assert not is_pt_symmetric(H)


@pytest.mark.parametrize(
    ("discriminant", "expected"),
    [
        (3.0, PhaseKind.UNBROKEN),
        (-3.0, PhaseKind.BROKEN),
        (0.0, PhaseKind.EXCEPTIONAL_POINT),
        (4e-9, PhaseKind.EXCEPTIONAL_POINT),
    ],
)
def test_classify_phase(discriminant: float, expected: PhaseKind) -> None:
    """Test discriminants are bucketed with tolerance tol * (1 + scale)."""
    assert classify_phase(discriminant, 4.0, 1e-9).kind is expected


def test_classify_phase_rejects_bad_tolerance() -> None:
    """Test tol must be positive."""
    with pytest.raises(InvalidParameterError):
        classify_phase(1.0, 1.0, 0.0)


def test_spectrum_unbroken(unbroken) -> None:
    """Test real eigenvalues, omega = sqrt 3 and Theta = pi/6."""
    spectral = spectrum_general(unbroken)
    assert spectral.phase.is_unbroken
    assert spectral.omega == pytest.approx(math.sqrt(3))
    assert spectral.e_plus == pytest.approx(math.sqrt(3), abs=1e-15)
    assert spectral.theta == pytest.approx(math.pi / 6)
    assert spectral.period == pytest.approx(math.pi / math.sqrt(3))


def test_spectrum_broken(broken) -> None:
    """Test the broken phase has imaginary omega and no period."""
    spectral = spectrum_general(broken)
    assert spectral.phase.is_broken
    assert spectral.omega == pytest.approx(1j * math.sqrt(3))
    assert spectral.period is None
    assert spectral.theta is not None and abs(spectral.theta.imag) > 0


def test_spectrum_exceptional(exceptional) -> None:
    """Test s sigma = r^2 sin^2 phi is an exceptional point."""
    spectral = spectrum_general(exceptional)
    assert spectral.phase.is_exceptional
    assert spectral.omega == 0


def test_spectrum_without_coupling_has_no_theta() -> None:
    """Test s * sigma = 0 leaves Theta undefined."""
    assert spectrum_general(GeneralNHParams(r=1.0, s=0.0, sigma=1.0, phi=0.3)).theta is None


def test_spectrum_antipt_phases() -> None:
    """Test the anti-PT model oscillates only below s = lambda cos phi."""
    oscillating = spectrum_antipt(AntiPTParams(lam=1.0, s=0.5, phi=0.0))
    converging = spectrum_antipt(AntiPTParams(lam=1.0, s=2.0, phi=0.0))
    assert oscillating.phase.is_broken
    assert oscillating.period == pytest.approx(math.pi / math.sqrt(0.75))
    assert oscillating.delta_e == pytest.approx(2 * math.sqrt(0.75))
    assert converging.phase.is_unbroken
    assert converging.period is None
    assert converging.theta is None


def test_exceptional_points() -> None:
    """Test the analytic locations used next to detected critical points."""
    assert exceptional_point_general(2.0, 2.0, HALF_PI) == pytest.approx(2.0)
    assert exceptional_point_general(math.sqrt(2) / 2, math.sqrt(2), HALF_PI) == pytest.approx(1.0)
    assert exceptional_point_general(1.0, 1.0, 0.0) is None
    assert exceptional_point_antipt(1.0, 0.0) == pytest.approx(1.0)
    assert exceptional_point_antipt(1.0, HALF_PI) == pytest.approx(0.0, abs=1e-15)


@pytest.mark.parametrize("fixture", ["unbroken", "broken", "exceptional", "general", "hermitian"])
def test_propagator_general_matches_expm(fixture: str, request) -> None:
    """Test the closed form equals the matrix exponential in every phase."""
    p = request.getfixturevalue(fixture)
    H = build_general(p)
    for t in (0.0, 0.7, 3.1):
        np.testing.assert_allclose(propagator_general(p, t), expm(-1j * H * t), atol=1e-10)


def test_propagator_antipt_matches_expm(anti_pt) -> None:
    """Test the anti-PT propagator against scipy."""
    H = build_antipt(anti_pt)
    np.testing.assert_allclose(propagator(anti_pt, 2.0), expm(-2j * H), atol=1e-12)


def test_propagator_rejects_negative_time(unbroken) -> None:
    """Test t < 0 is rejected."""
    with pytest.raises(InvalidParameterError):
        propagator_general(unbroken, -1.0)


def test_propagator_ep_agrees_with_general(exceptional) -> None:
    """Test the polynomial exceptional-point form against the sinc form."""
    for t in (0.0, 1.0, 4.0):
        np.testing.assert_allclose(
            propagator_ep(exceptional, t), propagator_general(exceptional, t), atol=1e-12
        )


def test_propagator_ep_requires_exceptional_point(unbroken) -> None:
    """Test the polynomial form is refused away from s = r sin phi."""
    with pytest.raises(PhaseError):
        propagator_ep(unbroken, 1.0)


def test_propagators_batch_matches_pointwise_after_normalization(broken) -> None:
    """Test the rescaled batch gives the same normalized states."""
    times = np.linspace(0.0, 30.0, 31)
    psi0 = InitialStateSpec.plus().amplitudes()
    batch = normalized_states(propagators(broken, times), psi0)
    for t, state in zip(times[:10], batch[:10], strict=True):
        single = evolve_normalized(propagator_general(broken, float(t)), psi0).state
        assert abs(np.vdot(single, state)) == pytest.approx(1.0, abs=1e-12)


def test_propagators_rejects_negative_times(unbroken) -> None:
    """Test time grids must be non-negative."""
    with pytest.raises(InvalidParameterError):
        propagators(unbroken, [0.0, -1.0])


def test_eigenvectors_general(general, unbroken, broken) -> None:
    """Test H |E+-> = E+- |E+-> with s = sigma and s != sigma."""
    for p in (general, unbroken, broken):
        H = build_general(p)
        spectral = spectrum_general(p)
        plus, minus = eigenvectors_general(p)
        np.testing.assert_allclose(H @ plus, spectral.e_plus * plus, atol=1e-10)
        np.testing.assert_allclose(H @ minus, spectral.e_minus * minus, atol=1e-10)


def test_eigenvectors_rejected_at_exceptional_point(exceptional) -> None:
    """Test the coalesced eigenvectors are refused."""
    with pytest.raises(PhaseError):
        eigenvectors_general(exceptional)


def test_basis_in_eigenvectors_reconstructs_basis(unbroken) -> None:
    """Test |0> and |1> are rebuilt from their eigenbasis coefficients."""
    plus, minus = eigenvectors_general(unbroken)
    c0, c1 = basis_in_eigenvectors(unbroken)
    np.testing.assert_allclose(c0[0] * plus + c0[1] * minus, [1, 0], atol=1e-12)
    np.testing.assert_allclose(c1[0] * plus + c1[1] * minus, [0, 1], atol=1e-12)


@pytest.mark.parametrize("fixture", ["unbroken", "broken"])
def test_eigen_amplitudes_equal_propagated_state(fixture: str, request) -> None:
    """Test the eigenbasis amplitudes equal U(t) psi0 in both phases."""
    p = request.getfixturevalue(fixture)
    for state in (InitialStateSpec.plus(), InitialStateSpec.eigen(1.1)):
        for t in (0.0, 0.4, 2.0):
            expected = propagator_general(p, t) @ state.amplitudes()
            np.testing.assert_allclose(eigen_amplitudes(p, state, t), expected, atol=1e-10)


def test_eigen_amplitudes_need_pt(general) -> None:
    """Test s != sigma is refused."""
    with pytest.raises(PhaseError):
        eigen_amplitudes(general, InitialStateSpec.plus(), 1.0)


def test_hermitian_map(unbroken) -> None:
    """Test eta H eta^-1 = r cos phi + omega sigma_x."""
    mapped = hermitian_map(unbroken)
    np.testing.assert_allclose(mapped.h, [[0, math.sqrt(3)], [math.sqrt(3), 0]], atol=1e-12)


def test_hermitian_map_general_model(general) -> None:
    """Test the map also works with s != sigma."""
    mapped = hermitian_map(general)
    np.testing.assert_allclose(mapped.h, mapped.h.conj().T, atol=1e-12)


def test_hermitian_map_refused_when_broken(broken) -> None:
    """Test no Hermitian map exists in the broken phase."""
    with pytest.raises(PhaseError):
        hermitian_map(broken)


def test_unitary_equivalent(unbroken) -> None:
    """Test eta U eta^-1 equals the unitary evolution."""
    eta = hermitian_map(unbroken).eta
    for t in np.linspace(0.0, 10.0, 100):
        U = eta @ propagator_general(unbroken, t) @ inv2(eta)
        np.testing.assert_allclose(U, unitary_equivalent(unbroken, t), atol=1e-9)


def test_evolve_normalized_tracks_growth(broken) -> None:
    """Test the state is unit length and norm_growth is |U psi0|^2."""
    psi0 = InitialStateSpec.plus().amplitudes()
    U = propagator_general(broken, 2.0)
    evolved = evolve_normalized(U, psi0)
    assert np.linalg.norm(evolved.state) == pytest.approx(1.0)
    assert evolved.norm_growth == pytest.approx(np.linalg.norm(U @ psi0) ** 2)
    assert np.trace(evolved.rho).real == pytest.approx(1.0)


def test_evolve_normalized_rejects_decay() -> None:
    """Test a vanishing state raises."""
    with pytest.raises(NormalizationError):
        evolve_normalized(np.zeros((2, 2), dtype=complex), np.array([1.0, 0.0], dtype=complex))


def test_evolve_normalized_rejects_unnormalized_input() -> None:
    """Test psi0 must be a unit vector."""
    with pytest.raises(InvalidParameterError):
        evolve_normalized(np.eye(2, dtype=complex), np.array([1.0, 1.0], dtype=complex))


@pytest.mark.parametrize("fixture", ["unbroken", "broken", "exceptional", "general"])
def test_rho_plus_closed_matches_pipeline(fixture: str, request) -> None:
    """Test the closed density matrix from |+> against the Born pipeline."""
    p = request.getfixturevalue(fixture)
    psi0 = InitialStateSpec.plus().amplitudes()
    for t in np.linspace(0.0, 10.0, 100):
        rho = evolve_normalized(propagator_general(p, t), psi0).rho
        np.testing.assert_allclose(rho_plus_closed(p, t), rho, atol=1e-9)


def test_rho_plus_closed_broken_limit(broken) -> None:
    """Test rho00 tends to (2 + sqrt 3) / 4 in the broken phase."""
    assert rho_plus_closed(broken, 40.0)[0, 0].real == pytest.approx((2 + math.sqrt(3)) / 4)


def test_spectrum_dispatch(anti_pt, unbroken) -> None:
    """Test spectrum picks the model-specific routine."""
    assert spectrum(anti_pt) == spectrum_antipt(anti_pt)
    assert spectrum(unbroken) == spectrum_general(unbroken)


@pytest.mark.parametrize(
    "p",
    [
        GeneralNHParams.pt(r=1.0, s=2.0, phi=HALF_PI),
        GeneralNHParams.pt(r=2.0, s=1.0, phi=HALF_PI),
        GeneralNHParams.pt(r=1.0, s=1.0, phi=HALF_PI),
        GeneralNHParams.pt(r=1.5, s=2.0, phi=0.7),
        GeneralNHParams(r=0.5, s=math.sqrt(2) / 2, sigma=math.sqrt(2), phi=2.0),
        AntiPTParams(lam=1.0, s=0.5, phi=0.0),
        AntiPTParams(lam=1.0, s=0.5, phi=0.4),
    ],
)
def test_propagator_determinant(p) -> None:
    """Test det U(t) = exp(-i (E+ + E-) t) = exp(-i tr H t)."""
    spectral = spectrum(p)
    trace = complex(np.trace(hamiltonian(p)))
    assert spectral.e_plus + spectral.e_minus == pytest.approx(trace, abs=1e-12)
    for t in (0.5, 1.7, 3.0):
        expected = np.exp(-1j * trace * t)
        assert np.linalg.det(propagator(p, t)) == pytest.approx(expected, rel=1e-10)


def test_propagator_continuous_across_exceptional_point() -> None:
    """Test U at r0 -+ 1e-6 agrees on both sides and with the polynomial form."""
    r0 = exceptional_point_general(2.0, 2.0, HALF_PI)
    assert r0 == pytest.approx(2.0)
    delta = 1e-6
    at_ep = propagator_ep(GeneralNHParams.pt(r=2.0, s=2.0, phi=HALF_PI), 0.0)
    np.testing.assert_allclose(at_ep, np.eye(2), atol=1e-15)
    for t in (0.5, 2.0, 5.0):
        below = propagator(GeneralNHParams.pt(r=r0 - delta, s=2.0, phi=HALF_PI), t)
        above = propagator(GeneralNHParams.pt(r=r0 + delta, s=2.0, phi=HALF_PI), t)
        polynomial = propagator_ep(GeneralNHParams.pt(r=2.0, s=2.0, phi=HALF_PI), t)
        assert np.max(np.abs(below - above)) < 1e-4
        assert np.max(np.abs(below - polynomial)) < 1e-4
        assert np.max(np.abs(above - polynomial)) < 1e-4


@pytest.mark.parametrize("fixture", ["unbroken", "broken", "exceptional", "general", "anti_pt"])
def test_evolve_normalized_is_pure(fixture: str, request) -> None:
    """Test tr rho = 1 and tr rho^2 = 1 for every evolved state."""
    p = request.getfixturevalue(fixture)
    for state in (InitialStateSpec.plus(), InitialStateSpec.zero(), InitialStateSpec.eigen(1.0)):
        for t in (0.0, 1.0, 7.5, 20.0):
            rho = evolve_normalized(propagator(p, t), state.amplitudes()).rho
            assert abs(np.trace(rho) - 1.0) < 1e-14
            assert abs(np.trace(rho @ rho) - 1.0) < 1e-12
