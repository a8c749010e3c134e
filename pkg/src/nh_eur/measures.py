"""Projective measurements, entropies, uncertainty bounds and closed-form probabilities."""

from __future__ import annotations

import cmath
import logging
import math

import numpy as np
import numpy.typing as npt
from scipy.stats import entropy

from .dynamics import (
    DEFAULT_PHASE_TOL,
    eigen_amplitudes,
    plus_state_factors,
    pt_mixing,
    rho_plus_closed,
    spectrum_antipt,
    spectrum_general,
)
from .exceptions import DensityMatrixError, InvalidParameterError, PhaseError
from .linalg import (
    IDENTITY,
    SIGMA_X_MATRIX,
    SIGMA_Y_MATRIX,
    SIGMA_Z_MATRIX,
    C2Matrix,
    ComplexArray,
    RealArray,
    sinc_c,
)
from .models import (
    SIGMA_X,
    SIGMA_Z,
    AntiPTParams,
    EURSample,
    GeneralNHParams,
    InitialStateSpec,
    ProbabilityPair,
    ProjectiveObservable,
)

logger = logging.getLogger(__name__)

CLAMP_BAND = 1e-10
DENSITY_TOL = 1e-8
IMAG_RESIDUE_TOL = 1e-10
# Beyond this 2 omega t the hyperbolic forms are evaluated through tanh/sech.
HYPERBOLIC_SWITCH = 40.0


def projector(obs: ProjectiveObservable, sign: int = 1) -> C2Matrix:
    """(I + sign * n.sigma) / 2."""
    n1, n2, n3 = obs.n
    n_sigma = n1 * SIGMA_X_MATRIX + n2 * SIGMA_Y_MATRIX + n3 * SIGMA_Z_MATRIX
    return (IDENTITY + sign * n_sigma) / 2


def _check_density(rho: npt.ArrayLike) -> C2Matrix:
    matrix = np.asarray(rho, dtype=np.complex128)
    if matrix.shape != (2, 2) or not np.all(np.isfinite(matrix)):
        raise DensityMatrixError(f"not a finite 2x2 matrix: {matrix}")
    trace = complex(np.trace(matrix))
    if abs(trace - 1) > DENSITY_TOL:
        raise DensityMatrixError(f"trace {trace} differs from 1")
    if np.max(np.abs(matrix - np.conj(matrix).T)) > DENSITY_TOL:
        raise DensityMatrixError("matrix is not Hermitian")
    return matrix


def _clamp(values: RealArray) -> RealArray:
    if np.any(values < -CLAMP_BAND) or np.any(values > 1 + CLAMP_BAND):
        worst = float(np.max(np.maximum(-values, values - 1)))
        raise DensityMatrixError(f"probability leaves [0, 1] by {worst}")
    return np.clip(values, 0.0, 1.0)


def measure(rho: npt.ArrayLike, obs: ProjectiveObservable) -> ProbabilityPair:
    """Born-rule outcome probabilities tr(P+ rho), tr(P- rho)."""
    matrix = _check_density(rho)
    p_plus = float(np.trace(projector(obs) @ matrix).real)
    p_plus = float(_clamp(np.array([p_plus]))[0])
    return ProbabilityPair.from_plus(p_plus)


def born_probabilities(states: ComplexArray, obs: ProjectiveObservable) -> RealArray:
    """<psi|P+|psi> for a stack of normalized states, shape (n,)."""
    P = projector(obs)
    values = np.einsum("ni,ij,nj->n", np.conj(states), P, states).real
    return _clamp(values)


def shannon_entropy(probs: ProbabilityPair) -> float:
    """Shannon entropy in bits, 0 log 0 = 0."""
    return float(entropy([probs.p_plus, probs.p_minus], base=2))


def binary_entropy(p_plus: RealArray) -> RealArray:
    """Shannon entropy in bits of each (p, 1 - p) outcome pair."""
    p = np.asarray(p_plus, dtype=np.float64)
    return np.asarray(entropy(np.stack([p, 1.0 - p]), base=2, axis=0))


def von_neumann_entropy(rho: npt.ArrayLike) -> float:
    """-tr(rho log2 rho) from the eigenvalues of rho."""
    matrix = _check_density(rho)
    eigenvalues = np.linalg.eigvalsh((matrix + np.conj(matrix).T) / 2)
    return float(entropy(np.clip(eigenvalues, 0.0, 1.0), base=2))


def mu_bound(
    obs_r: ProjectiveObservable,
    obs_q: ProjectiveObservable,
    rho: npt.ArrayLike | None = None,
) -> float:
    """
    Uncertainty lower bound -2 log2 c, plus S(rho) when rho is given.

    For Bloch vectors n and m the largest eigenvector overlap satisfies
    c^2 = (1 + |n.m|) / 2.
    """
    overlap = abs(float(np.dot(obs_r.n, obs_q.n)))
    c_squared = min(1.0, (1.0 + overlap) / 2)
    bound = -math.log2(c_squared)
    if rho is not None:
        bound += von_neumann_entropy(rho)
    return bound


def eur(
    rho: npt.ArrayLike,
    obs_r: ProjectiveObservable,
    obs_q: ProjectiveObservable,
    t: float = 0.0,
) -> EURSample:
    """H(R) + H(Q) for one density matrix, with the mixed-state bound."""
    h_r = shannon_entropy(measure(rho, obs_r))
    h_q = shannon_entropy(measure(rho, obs_q))
    return EURSample(
        t=t, h_r=h_r, h_q=h_q, eur=h_r + h_q, bound=mu_bound(obs_r, obs_q, rho)
    )


def prob_closed_general(
    p: GeneralNHParams,
    state: InitialStateSpec,
    obs: ProjectiveObservable,
    t: float,
    *,
    printed_normalization: bool = False,
) -> float:
    """
    Probability of the + outcome from the eigenbasis coefficients alpha, beta.

    In the unbroken phase the closed expression with Delta E = 2 omega is used:

        p = {2 a b* [n3 cos T - i (n2 - sin T)]
             + 2 a* b [n3 cos T + i (n2 - sin T)] e^{2i dE t}
             + [(n2 sin T - 1) sec^2 T - n1 sin theta] e^{i dE t}} / N
        N = 4i sin T (a b* - a* b e^{2i dE t}) - 2 sec^2 T e^{i dE t}

    ``printed_normalization`` swaps in N with a* b in both terms, which does not
    reproduce the Born rule except at Theta = 0. In the broken phase the
    evolved amplitudes are normalized directly. PT model only.
    """
    spectral = spectrum_general(p)
    if spectral.phase.is_broken:
        amplitudes = eigen_amplitudes(p, state, t)
        scale = np.max(np.abs(amplitudes))
        if scale == 0:
            raise PhaseError("evolved state vanished")
        unit = amplitudes / scale
        unit = unit / np.linalg.norm(unit)
        P = projector(obs)
        return float(np.vdot(unit, P @ unit).real)

    theta = pt_mixing(p)[1].real
    expanded = state.expanded(theta)
    assert expanded.alpha_coeff is not None and expanded.beta_coeff is not None
    a, b = expanded.alpha_coeff, expanded.beta_coeff
    n1, n2, n3 = obs.n
    sin_t, cos_t = math.sin(theta), math.cos(theta)
    sec2 = 1 / (cos_t * cos_t)
    phase = cmath.exp(1j * spectral.delta_e.real * t)

    numerator = (
        2 * a * b.conjugate() * (n3 * cos_t - 1j * (n2 - sin_t))
        + 2 * a.conjugate() * b * (n3 * cos_t + 1j * (n2 - sin_t)) * phase * phase
        + ((n2 * sin_t - 1) * sec2 - n1 * math.sin(state.eigen_angle)) * phase
    )
    if printed_normalization:
        first = a.conjugate() * b
    else:
        first = a * b.conjugate()
    normalization = (
        4j * sin_t * (first - a.conjugate() * b * phase * phase) - 2 * sec2 * phase
    )
    value = numerator / normalization
    if abs(value.imag) > IMAG_RESIDUE_TOL:
        logger.warning("closed-form probability has imaginary part %.3g", value.imag)
    return float(value.real)


def prob_closed_ep(
    p: GeneralNHParams, theta: float, obs: ProjectiveObservable, t: float
) -> float:
    """
    Probability of the + outcome at the PT exceptional point.

    The initial state is (cos theta/2, sin theta/2):

        p = [2 - 2 n2 + 2 (n2 + n3 cos theta + n1 sin theta + 2 n3 r t sin phi)
             / (1 + r^2 t^2 + r t (2 cos theta sin phi - r t cos 2 phi))] / 4
    """
    r_sin = p.r * math.sin(p.phi)
    spectral = spectrum_general(p)
    if not (spectral.phase.is_exceptional and p.is_pt_symmetric):
        raise PhaseError(f"not a PT exceptional point: {p.describe()}")
    if abs(p.s - r_sin) > DEFAULT_PHASE_TOL * (1 + p.s):
        raise PhaseError("closed form needs s = sigma = r sin(phi)")
    n1, n2, n3 = obs.n
    rt = p.r * t
    numerator = n2 + n3 * math.cos(theta) + n1 * math.sin(theta) + 2 * n3 * rt * math.sin(p.phi)
    denominator = 1 + rt * rt + rt * (
        2 * math.cos(theta) * math.sin(p.phi) - rt * math.cos(2 * p.phi)
    )
    return (2 - 2 * n2 + 2 * numerator / denominator) / 4


def pt_probabilities_closed(
    p: GeneralNHParams, t: float
) -> tuple[ProbabilityPair, ProbabilityPair]:
    """
    sigma_x and sigma_z outcome probabilities for the initial state |+>.

    p_x+ = (4 C^2 + (s + sigma)^2 S^2) / 4T and p_z+ = rho00, with C, S and T
    as in :func:`nh_eur.dynamics.rho_plus_closed`.
    """
    rho = rho_plus_closed(p, t)
    C, S, norm_factor = plus_state_factors(p, t)
    p_x = (4 * C * C + (p.s + p.sigma) ** 2 * S * S) / (4 * norm_factor)
    p_z = float(rho[0, 0].real)
    return (
        ProbabilityPair.from_plus(min(1.0, max(0.0, p_x))),
        ProbabilityPair.from_plus(min(1.0, max(0.0, p_z))),
    )


def antipt_probabilities_closed(
    p: AntiPTParams, t: float
) -> tuple[ProbabilityPair, ProbabilityPair]:
    """
    sigma_x and sigma_z outcome probabilities of the anti-PT model from |0>.

    With D = s^2 cosh(2wt) - lambda^2 cos^2 phi:
        p_x+ = (1 + s w sinh(2wt) / D) / 2
        p_z+ = (1 + w^2 / D) / 2
    The ratios are evaluated as D / w^2 = 1 + 2 s^2 t^2 (sinh(wt)/wt)^2, which
    is regular at the exceptional point and real in both phases; large real
    2wt switches to the tanh/sech form.
    """
    if t < 0 or not math.isfinite(t):
        raise InvalidParameterError(f"time must be finite and >= 0, got {t}")
    l_cos = p.lam * math.cos(p.phi)
    if p.s * p.s + l_cos * l_cos < 1e-300:
        raise InvalidParameterError("denominator vanishes for s = lambda cos(phi) = 0")
    omega = spectrum_antipt(p).omega

    if omega.imag == 0 and 2 * omega.real * t > HYPERBOLIC_SWITCH:
        w = omega.real
        y = 2 * w * t
        sech = 2 * math.exp(-y) / (1 + math.exp(-2 * y))
        reduced = p.s * p.s - l_cos * l_cos * sech
        x_ratio = p.s * w * math.tanh(y) / reduced
        z_ratio = w * w * sech / reduced
    else:
        half = sinc_c(1j * omega * t)
        full = sinc_c(2j * omega * t)
        scaled = 1 + 2 * (p.s * t) ** 2 * half * half
        x_ratio = (2 * p.s * t * full / scaled).real
        z_ratio = (1 / scaled).real

    p_x = min(1.0, max(0.0, (1 + x_ratio) / 2))
    p_z = min(1.0, max(0.0, (1 + z_ratio) / 2))
    return ProbabilityPair.from_plus(p_x), ProbabilityPair.from_plus(p_z)


def eur_antipt_closed(p: AntiPTParams, t: float) -> EURSample:
    """EUR of sigma_x and sigma_z for the anti-PT model started in |0>."""
    p_x, p_z = antipt_probabilities_closed(p, t)
    h_x = shannon_entropy(p_x)
    h_z = shannon_entropy(p_z)
    return EURSample(t=t, h_r=h_x, h_q=h_z, eur=h_x + h_z, bound=mu_bound(SIGMA_X, SIGMA_Z))
