"""Tests for measurements, entropies and closed-form probabilities."""

import logging
import math

import numpy as np
import pytest

from nh_eur.dynamics import evolve_normalized, propagator, propagator_general
from nh_eur.exceptions import DensityMatrixError, InvalidParameterError, PhaseError
from nh_eur.measures import (
    antipt_probabilities_closed,
    binary_entropy,
    born_probabilities,
    eur,
    eur_antipt_closed,
    measure,
    mu_bound,
    prob_closed_ep,
    prob_closed_general,
    projector,
    pt_probabilities_closed,
    shannon_entropy,
    von_neumann_entropy,
)
from nh_eur.models import (
    SIGMA_X,
    SIGMA_Y,
    SIGMA_Z,
    AntiPTParams,
    InitialStateSpec,
    ProbabilityPair,
    ProjectiveObservable,
)

PLUS_RHO = np.full((2, 2), 0.5, dtype=complex)


def test_projectors_are_complementary() -> None:
    """Test P+ + P- = I and P+^2 = P+."""
    obs = ProjectiveObservable.from_vector(0.6, 0.0, 0.8)
    plus, minus = projector(obs), projector(obs, -1)
    np.testing.assert_allclose(plus + minus, np.eye(2), atol=1e-15)
    np.testing.assert_allclose(plus @ plus, plus, atol=1e-15)


def test_measure_plus_state() -> None:
    """Test |+> is certain under sigma_x and uniform under sigma_z."""
    assert measure(PLUS_RHO, SIGMA_X).p_plus == pytest.approx(1.0)
    assert measure(PLUS_RHO, SIGMA_Z).p_plus == pytest.approx(0.5)


def test_measure_rejects_bad_trace() -> None:
    """Test a trace other than 1 is refused."""
    with pytest.raises(DensityMatrixError):
        measure(2 * PLUS_RHO, SIGMA_X)


def test_measure_rejects_non_hermitian() -> None:
    """Test non-Hermitian input is refused."""
    with pytest.raises(DensityMatrixError):
        measure(np.array([[1, 0.3], [0, 0]], dtype=complex), SIGMA_Z)


def test_born_probabilities_stack() -> None:
    """Test the vectorized Born rule on |0>, |1> and |+>."""
    states = np.array([[1, 0], [0, 1], [1 / math.sqrt(2), 1 / math.sqrt(2)]], dtype=complex)
    np.testing.assert_allclose(born_probabilities(states, SIGMA_Z), [1.0, 0.0, 0.5], atol=1e-15)


def test_shannon_entropy_extremes() -> None:
    """Test certain and uniform outcomes give 0 and 1 bit."""
    assert shannon_entropy(ProbabilityPair(1.0, 0.0)) == 0.0
    assert shannon_entropy(ProbabilityPair(0.5, 0.5)) == pytest.approx(1.0)


def test_binary_entropy_array() -> None:
    """Test the array form agrees with the scalar one."""
    values = binary_entropy(np.array([0.0, 0.25, 0.5]))
    assert values[0] == 0.0
    assert values[1] == pytest.approx(shannon_entropy(ProbabilityPair(0.25, 0.75)))
    assert values[2] == pytest.approx(1.0)


def test_von_neumann_entropy() -> None:
    """Test pure states have zero entropy and the maximally mixed state one bit."""
    assert von_neumann_entropy(PLUS_RHO) == pytest.approx(0.0, abs=1e-12)
    assert von_neumann_entropy(np.eye(2) / 2) == pytest.approx(1.0)


def test_mu_bound_complementary_pair() -> None:
    """Test sigma_x and sigma_z give exactly one bit."""
    assert mu_bound(SIGMA_X, SIGMA_Z) == 1.0


def test_mu_bound_same_observable() -> None:
    """Test a repeated observable has no bound."""
    assert mu_bound(SIGMA_Z, SIGMA_Z) == 0.0


def test_mu_bound_mixed_state() -> None:
    """Test the mixed-state term adds S(rho)."""
    assert mu_bound(SIGMA_X, SIGMA_Z, np.eye(2) / 2) == pytest.approx(2.0)


def test_eur_plus_state_saturates_bound() -> None:
    """Test EUR(|+>) = 1 for sigma_x and sigma_z."""
    sample = eur(PLUS_RHO, SIGMA_X, SIGMA_Z)
    assert sample.eur == pytest.approx(1.0, abs=1e-12)
    assert sample.bound == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("fixture", ["unbroken", "broken"])
@pytest.mark.parametrize(
    "state",
    [InitialStateSpec.plus(), InitialStateSpec.zero(), InitialStateSpec.eigen(2.2)],
    ids=["plus", "zero", "eigen"],
)
def test_prob_closed_general_matches_born_rule(fixture: str, state, request) -> None:
    """Test the eigenbasis probability against the Born pipeline."""
    p = request.getfixturevalue(fixture)
    for t in np.linspace(0.0, 10.0, 100):
        rho = evolve_normalized(propagator_general(p, t), state.amplitudes()).rho
        for obs in (SIGMA_X, SIGMA_Y, SIGMA_Z):
            assert prob_closed_general(p, state, obs, t) == pytest.approx(
                measure(rho, obs).p_plus, abs=1e-9
            )


def test_prob_closed_general_plus_at_zero(unbroken) -> None:
    """Test p_x(0) = 1 and p_z(0) = 1/2 for |+>."""
    plus = InitialStateSpec.plus()
    assert prob_closed_general(unbroken, plus, SIGMA_X, 0.0) == pytest.approx(1.0)
    assert prob_closed_general(unbroken, plus, SIGMA_Z, 0.0) == pytest.approx(0.5)


def test_printed_normalization_differs(unbroken) -> None:
    """Test the printed normalization gives cos^2 Theta instead of 1 at t = 0."""
    value = prob_closed_general(
        unbroken, InitialStateSpec.plus(), SIGMA_X, 0.0, printed_normalization=True
    )
    assert value == pytest.approx(math.cos(math.pi / 6) ** 2)


def test_prob_closed_general_refused_at_exceptional_point(exceptional) -> None:
    """Test sec Theta diverges at the exceptional point."""
    with pytest.raises(PhaseError):
        prob_closed_general(exceptional, InitialStateSpec.plus(), SIGMA_X, 1.0)


def test_prob_closed_general_refused_off_pt(general) -> None:
    """Test the eigenbasis form needs s = sigma."""
    with pytest.raises(PhaseError):
        prob_closed_general(general, InitialStateSpec.plus(), SIGMA_X, 1.0)


@pytest.mark.parametrize("theta", [0.0, 0.7, math.pi / 2, 2.5])
def test_prob_closed_ep_matches_born_rule(exceptional, theta: float) -> None:
    """Test the exceptional-point probability for (cos theta/2, sin theta/2)."""
    amplitudes = InitialStateSpec.eigen(math.pi - theta).amplitudes()
    for t in np.linspace(0.0, 10.0, 100):
        rho = evolve_normalized(propagator_general(exceptional, t), amplitudes).rho
        for obs in (SIGMA_X, SIGMA_Y, SIGMA_Z):
            assert prob_closed_ep(exceptional, theta, obs, t) == pytest.approx(
                measure(rho, obs).p_plus, abs=1e-9
            )


def test_prob_closed_ep_refused_elsewhere(unbroken) -> None:
    """Test the closed form is refused away from the exceptional point."""
    with pytest.raises(PhaseError):
        prob_closed_ep(unbroken, 0.0, SIGMA_Z, 1.0)


@pytest.mark.parametrize("fixture", ["unbroken", "broken", "exceptional", "general"])
def test_pt_probabilities_closed(fixture: str, request) -> None:
    """Test the |+> sigma_x/sigma_z probabilities against the Born pipeline."""
    p = request.getfixturevalue(fixture)
    psi0 = InitialStateSpec.plus().amplitudes()
    for t in np.linspace(0.0, 10.0, 100):
        rho = evolve_normalized(propagator_general(p, t), psi0).rho
        p_x, p_z = pt_probabilities_closed(p, t)
        assert p_x.p_plus == pytest.approx(measure(rho, SIGMA_X).p_plus, abs=1e-9)
        assert p_z.p_plus == pytest.approx(measure(rho, SIGMA_Z).p_plus, abs=1e-9)


def test_pt_probabilities_exceptional_point_asymptote(exceptional) -> None:
    """Test all four probabilities approach 1/2 at the exceptional point."""
    p_x, p_z = pt_probabilities_closed(exceptional, 1000.0)
    assert p_x.p_plus == pytest.approx(0.5, abs=1e-3)
    assert p_z.p_plus == pytest.approx(0.5, abs=1e-3)


@pytest.mark.parametrize("s", [0.3, 1.0, 1.7])
def test_antipt_probabilities_match_born_rule(s: float) -> None:
    """Test the anti-PT closed form from |0> in both phases and at the EP."""
    p = AntiPTParams(lam=1.0, s=s, phi=0.0)
    psi0 = InitialStateSpec.zero().amplitudes()
    for t in np.linspace(0.0, 10.0, 100):
        rho = evolve_normalized(propagator(p, t), psi0).rho
        p_x, p_z = antipt_probabilities_closed(p, t)
        assert p_x.p_plus == pytest.approx(measure(rho, SIGMA_X).p_plus, abs=1e-9)
        assert p_z.p_plus == pytest.approx(measure(rho, SIGMA_Z).p_plus, abs=1e-9)


def test_antipt_probabilities_large_time_branch() -> None:
    """Test the tanh/sech branch stays finite and tends to its limit."""
    p = AntiPTParams(lam=1.0, s=2.0, phi=0.0)
    p_x, p_z = antipt_probabilities_closed(p, 500.0)
    omega = math.sqrt(3.0)
    assert p_x.p_plus == pytest.approx((1 + omega / 2) / 2)
    assert p_z.p_plus == pytest.approx(0.5)


def test_antipt_probabilities_reject_degenerate() -> None:
    """Test s = lambda cos phi = 0 is refused."""
    with pytest.raises(InvalidParameterError):
        antipt_probabilities_closed(AntiPTParams(lam=0.0, s=0.0, phi=0.0), 1.0)


def test_eur_antipt_closed_starts_at_one() -> None:
    """Test |0> starts with H(x) = 1 and H(z) = 0."""
    sample = eur_antipt_closed(AntiPTParams(lam=1.0, s=0.5, phi=0.0), 0.0)
    assert sample.h_r == pytest.approx(1.0)
    assert sample.h_q == pytest.approx(0.0, abs=1e-12)
    assert sample.bound == 1.0


def test_imaginary_residue_is_logged(unbroken, caplog) -> None:
    """Test the printed normalization leaves a logged imaginary residue."""
    with caplog.at_level(logging.WARNING, logger="nh_eur.measures"):
        prob_closed_general(
            unbroken, InitialStateSpec.eigen(1.0), SIGMA_X, 0.5, printed_normalization=True
        )
    assert any("imaginary part" in record.message for record in caplog.records)
