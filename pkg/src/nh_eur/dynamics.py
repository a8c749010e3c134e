"""Hamiltonians, spectra, phase classification and closed-form propagators."""

from __future__ import annotations

import cmath
import math

import numpy as np
import numpy.typing as npt

from .exceptions import InvalidParameterError, NormalizationError, PhaseError
from .linalg import (
    IDENTITY,
    SIGMA_X_MATRIX,
    C2Matrix,
    C2Vector,
    ComplexArray,
    c2matrix,
    c2vector,
    cos_sinc_pair,
    inv2,
    mat2_exp_batch,
    mat2_exp_times,
    max_norm,
    sinc_c,
)
from .models import (
    AntiPTParams,
    EvolvedState,
    GeneralNHParams,
    HermitianEquivalent,
    InitialStateSpec,
    PhaseClass,
    PhaseKind,
    SpectralData,
    SystemParams,
)

DEFAULT_PHASE_TOL = 1e-9
SYMMETRY_TOL = 1e-12
MIN_NORM = 1e-300


def build_general(p: GeneralNHParams) -> C2Matrix:
    """[[r e^{i phi}, sigma], [s, r e^{-i phi}]]."""
    return c2matrix(
        p.r * cmath.exp(1j * p.phi),
        p.sigma,
        p.s,
        p.r * cmath.exp(-1j * p.phi),
    )


def build_antipt(p: AntiPTParams) -> C2Matrix:
    """[[lambda e^{i phi}, i s], [i s, -lambda e^{-i phi}]]."""
    return c2matrix(
        p.lam * cmath.exp(1j * p.phi),
        1j * p.s,
        1j * p.s,
        -p.lam * cmath.exp(-1j * p.phi),
    )


def hamiltonian(p: SystemParams) -> C2Matrix:
    if isinstance(p, AntiPTParams):
        return build_antipt(p)
    return build_general(p)


def _pt_conjugate(H: C2Matrix) -> C2Matrix:
    # (PT) H (PT)^-1 with P = sigma_x and T complex conjugation
    return SIGMA_X_MATRIX @ np.conj(H) @ SIGMA_X_MATRIX


def is_pt_symmetric(H: C2Matrix, tol: float = SYMMETRY_TOL) -> bool:
    """True when (PT) H (PT)^-1 = H."""
    return max_norm(_pt_conjugate(H) - H) <= tol * (1 + max_norm(H))


def is_anti_pt_symmetric(H: C2Matrix, tol: float = SYMMETRY_TOL) -> bool:
    """True when (PT) H (PT)^-1 = -H."""
    return max_norm(_pt_conjugate(H) + H) <= tol * (1 + max_norm(H))


def classify_phase(
    discriminant: float, scale: float, tol: float = DEFAULT_PHASE_TOL
) -> PhaseClass:
    """
    Bucket a spectral discriminant into a phase.

    The exceptional point is reported when |discriminant| <= tol * (1 + scale),
    so scan grids that step through it are classified deterministically.
    """
    if scale < 0 or tol <= 0:
        raise InvalidParameterError(f"need scale >= 0 and tol > 0, got {scale}, {tol}")
    if abs(discriminant) <= tol * (1 + scale):
        return PhaseClass(PhaseKind.EXCEPTIONAL_POINT, tolerance=tol)
    if discriminant > 0:
        return PhaseClass(PhaseKind.UNBROKEN)
    return PhaseClass(PhaseKind.BROKEN)


def spectrum_general(p: GeneralNHParams, tol: float = DEFAULT_PHASE_TOL) -> SpectralData:
    """
    Spectrum of the general model.

    omega is the principal root of s*sigma - r^2 sin^2 phi, so omega = i|omega|
    in the broken phase. Theta satisfies cos Theta = omega / sqrt(s sigma) and
    sin Theta = r sin phi / sqrt(s sigma), which continues it to complex values
    once the phase breaks; it is None when s * sigma = 0.
    """
    r_sin = p.r * math.sin(p.phi)
    r_cos = p.r * math.cos(p.phi)
    coupling = p.s * p.sigma
    discriminant = coupling - r_sin * r_sin
    phase = classify_phase(discriminant, max(coupling, r_sin * r_sin, 1.0), tol)
    omega = cmath.sqrt(complex(discriminant))

    theta: complex | None = None
    if coupling > 0:
        g = math.sqrt(coupling)
        theta = -1j * cmath.log(omega / g + 1j * r_sin / g)

    period = math.pi / omega.real if phase.is_unbroken else None
    return SpectralData(
        e_plus=r_cos + omega,
        e_minus=r_cos - omega,
        omega=omega,
        theta=theta,
        delta_e=2 * omega,
        period=period,
        phase=phase,
    )


def spectrum_antipt(p: AntiPTParams, tol: float = DEFAULT_PHASE_TOL) -> SpectralData:
    """
    Spectrum of the anti-PT model.

    omega = sqrt(s^2 - lambda^2 cos^2 phi). The eigenvalues are
    i lambda sin phi +- sqrt(lambda^2 cos^2 phi - s^2), so delta_e = e_plus -
    e_minus is imaginary in the unbroken phase. The EUR oscillates only in the
    broken phase, with period pi/|omega|.
    """
    l_cos = p.lam * math.cos(p.phi)
    l_sin = p.lam * math.sin(p.phi)
    discriminant = p.s * p.s - l_cos * l_cos
    phase = classify_phase(discriminant, max(p.s * p.s, l_cos * l_cos, 1.0), tol)
    omega = cmath.sqrt(complex(discriminant))
    root = cmath.sqrt(complex(-discriminant))
    e_plus = 1j * l_sin + root
    e_minus = 1j * l_sin - root
    period = math.pi / abs(omega) if phase.is_broken else None
    return SpectralData(
        e_plus=e_plus,
        e_minus=e_minus,
        omega=omega,
        theta=None,
        delta_e=e_plus - e_minus,
        period=period,
        phase=phase,
    )


def spectrum(p: SystemParams, tol: float = DEFAULT_PHASE_TOL) -> SpectralData:
    if isinstance(p, AntiPTParams):
        return spectrum_antipt(p, tol)
    return spectrum_general(p, tol)


def exceptional_point_general(s: float, sigma: float, phi: float) -> float | None:
    """r0 = sqrt(s sigma) / |sin phi|, or None when sin phi vanishes."""
    sin_phi = abs(math.sin(phi))
    if sin_phi < 1e-15:
        return None
    return math.sqrt(s * sigma) / sin_phi


def exceptional_point_antipt(lam: float, phi: float) -> float:
    """s0 = |lambda cos phi|."""
    return abs(lam * math.cos(phi))


def _traceless_general(p: GeneralNHParams) -> C2Matrix:
    r_sin = p.r * math.sin(p.phi)
    return np.array([[1j * r_sin, p.sigma], [p.s, -1j * r_sin]], dtype=np.complex128)


def _require_time(t: float) -> None:
    if not math.isfinite(t) or t < 0:
        raise InvalidParameterError(f"time must be finite and >= 0, got {t}")


def propagator_general(p: GeneralNHParams, t: float) -> C2Matrix:
    """
    Non-unitary propagator exp(-iHt) of the general model.

    e^{-i t r cos phi} [cos(wt) I - i t sinc(wt) M] with M the traceless part;
    the same expression covers both phases and the exceptional point.
    """
    _require_time(t)
    omega = spectrum_general(p).omega
    z = omega * t
    scalar = cmath.exp(-1j * t * p.r * math.cos(p.phi))
    U = scalar * (cmath.cos(z) * IDENTITY - 1j * t * sinc_c(z) * _traceless_general(p))
    if not np.all(np.isfinite(U)):
        raise InvalidParameterError(f"propagator overflows at t={t}")
    return U


def propagator_ep(p: GeneralNHParams, t: float) -> C2Matrix:
    """
    Propagator at the PT exceptional point s = sigma = r sin phi.

    Returns e^{-i t r cos phi} [[1 + u, -iu], [-iu, 1 - u]] with u = r t sin phi.
    """
    _require_time(t)
    r_sin = p.r * math.sin(p.phi)
    if not p.is_pt_symmetric or abs(p.s - r_sin) > DEFAULT_PHASE_TOL * (1 + p.s):
        raise PhaseError(f"not a PT exceptional point: {p.describe()}")
    u = r_sin * t
    scalar = cmath.exp(-1j * t * p.r * math.cos(p.phi))
    return scalar * np.array([[1 + u, -1j * u], [-1j * u, 1 - u]], dtype=np.complex128)


def propagator_antipt(p: AntiPTParams, t: float) -> C2Matrix:
    """exp(-i H t) of the anti-PT model."""
    _require_time(t)
    return mat2_exp_times(build_antipt(p), t)


def propagator(p: SystemParams, t: float) -> C2Matrix:
    if isinstance(p, AntiPTParams):
        return propagator_antipt(p, t)
    return propagator_general(p, t)


def propagators(p: SystemParams, times: npt.ArrayLike) -> ComplexArray:
    """
    Propagators on a whole time grid, shape (n, 2, 2), up to a scalar per time.

    Each slice is rescaled so it stays bounded for growing modes; only use the
    result where states are normalized afterwards.
    """
    t = np.asarray(times, dtype=np.float64)
    if t.ndim != 1 or not np.all(np.isfinite(t)) or np.any(t < 0):
        raise InvalidParameterError("times must be a finite 1-d grid of t >= 0")
    return mat2_exp_batch(hamiltonian(p), t)


def pt_mixing(p: GeneralNHParams) -> tuple[SpectralData, complex]:
    """Spectrum and mixing angle Theta of a PT instance away from the exceptional point."""
    if not p.is_pt_symmetric:
        raise PhaseError(f"eigenbasis forms need s = sigma, got {p.describe()}")
    spectral = spectrum_general(p)
    if spectral.phase.is_exceptional:
        raise PhaseError("sec(Theta) diverges at the exceptional point")
    if spectral.theta is None:
        raise PhaseError("Theta is undefined when s * sigma = 0")
    return spectral, spectral.theta


def _coupling_scale(p: GeneralNHParams) -> C2Matrix:
    # diag((sigma/s)^{1/4}, (s/sigma)^{1/4}) maps the PT case onto s != sigma
    ratio = (p.sigma / p.s) ** 0.25
    return np.diag([ratio, 1 / ratio]).astype(np.complex128)


def eigenvectors_general(p: GeneralNHParams) -> tuple[C2Vector, C2Vector]:
    """
    Right eigenvectors |E+>, |E-> normalized as 1/sqrt(2 cos Theta).

    Defined in both phases away from the exceptional point; requires s sigma > 0.
    """
    spectral = spectrum_general(p)
    if spectral.theta is None:
        raise PhaseError("eigenvectors need s * sigma > 0")
    if spectral.phase.is_exceptional:
        raise PhaseError("eigenvectors coalesce at the exceptional point")
    theta = spectral.theta
    norm = 1 / cmath.sqrt(2 * cmath.cos(theta))
    half = cmath.exp(0.5j * theta)
    scale = _coupling_scale(p)
    plus = scale @ (norm * np.array([half, 1 / half]))
    minus = scale @ (norm * np.array([1 / half, -half]))
    return c2vector(plus[0], plus[1]), c2vector(minus[0], minus[1])


def basis_in_eigenvectors(p: GeneralNHParams) -> tuple[C2Vector, C2Vector]:
    """
    Coefficients of |0> and |1> in the eigenbasis.

    Returns (c0, c1) with |k> = c_k[0] |E+> + c_k[1] |E->.
    """
    plus, minus = eigenvectors_general(p)
    V = np.column_stack([plus, minus])
    inverse = inv2(V)
    return inverse[:, 0].copy(), inverse[:, 1].copy()


def eigen_amplitudes(p: GeneralNHParams, state: InitialStateSpec, t: float) -> C2Vector:
    """
    Unnormalized amplitudes of U(t) psi0 through the eigenbasis coefficients.

    psi0 = (sin theta/2, cos theta/2) evolves to
    (alpha e^{-iE+t} - e^{-i Theta} beta e^{-iE-t},
     e^{-i Theta} alpha e^{-iE+t} + beta e^{-iE-t}).
    PT model only; complex Theta covers the broken phase.
    """
    _require_time(t)
    spectral, theta = pt_mixing(p)
    expanded = state.expanded(theta)
    assert expanded.alpha_coeff is not None and expanded.beta_coeff is not None
    alpha, beta = expanded.alpha_coeff, expanded.beta_coeff
    plus = alpha * cmath.exp(-1j * spectral.e_plus * t)
    minus = beta * cmath.exp(-1j * spectral.e_minus * t)
    shift = cmath.exp(-1j * theta)
    return c2vector(plus - shift * minus, shift * plus + minus)


def hermitian_map(p: GeneralNHParams) -> HermitianEquivalent:
    """
    Similarity transform taking H to the Hermitian r cos(phi) I + omega sigma_x.

    Only exists in the unbroken phase.
    """
    spectral = spectrum_general(p)
    if not spectral.phase.is_unbroken:
        raise PhaseError(f"no Hermitian map in the {spectral.phase} phase")
    assert spectral.theta is not None
    theta = spectral.theta.real
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    eta = np.array([[c, -1j * s], [1j * s, c]], dtype=np.complex128)
    eta = (eta / math.sqrt(math.cos(theta))) @ inv2(_coupling_scale(p))
    h = eta @ build_general(p) @ inv2(eta)
    return HermitianEquivalent(eta=eta, h=h)


def unitary_equivalent(p: GeneralNHParams, t: float) -> C2Matrix:
    """e^{-i t r cos phi} exp(-i omega t sigma_x), unbroken phase only."""
    _require_time(t)
    spectral = spectrum_general(p)
    if not spectral.phase.is_unbroken:
        raise PhaseError(f"no unitary equivalent in the {spectral.phase} phase")
    wt = spectral.omega.real * t
    scalar = cmath.exp(-1j * t * p.r * math.cos(p.phi))
    return scalar * (math.cos(wt) * IDENTITY - 1j * math.sin(wt) * SIGMA_X_MATRIX)


def _require_unit(psi0: C2Vector) -> C2Vector:
    psi = np.asarray(psi0, dtype=np.complex128)
    if psi.shape != (2,):
        raise InvalidParameterError(f"state must have 2 components, got {psi.shape}")
    if abs(float(np.vdot(psi, psi).real) - 1.0) > 1e-12:
        raise InvalidParameterError("initial state must be normalized")
    return psi


def evolve_normalized(U: C2Matrix, psi0: C2Vector) -> EvolvedState:
    """Apply U and renormalize; norm_growth is |U psi0|^2."""
    psi = _require_unit(psi0)
    raw = np.asarray(U, dtype=np.complex128) @ psi
    scale = float(np.max(np.abs(raw)))
    if not scale >= MIN_NORM:
        raise NormalizationError(f"evolved norm {scale} too small to normalize")
    unit = raw / scale
    size = float(np.linalg.norm(unit))
    state = unit / size
    rho = np.outer(state, np.conj(state))
    rho = rho / np.trace(rho).real
    return EvolvedState(state=state, rho=rho, norm_growth=(scale * size) ** 2)


def normalized_states(Us: ComplexArray, psi0: C2Vector) -> ComplexArray:
    """Apply a stack of propagators to psi0 and normalize each row, shape (n, 2)."""
    psi = _require_unit(psi0)
    raw = np.einsum("nij,j->ni", Us, psi)
    scale = np.max(np.abs(raw), axis=1)
    if not np.all(scale >= MIN_NORM):
        raise NormalizationError("evolved state decayed too far to normalize")
    unit = raw / scale[:, None]
    return unit / np.linalg.norm(unit, axis=1)[:, None]


def plus_state_factors(p: GeneralNHParams, t: float) -> tuple[float, float, float]:
    """
    (C, S, T) for the closed forms started from |+>.

    C = cos(wt), S = sin(wt)/w and T = C^2 + (s^2 + sigma^2 + 2 r^2 sin^2 phi) S^2 / 2.
    C and S are real in every phase and only ratios of these are used, so both
    are rescaled by the same factor to stay bounded.
    """
    _require_time(t)
    omega = spectrum_general(p).omega
    cos_part, sinc_part = cos_sinc_pair(omega, [t], damped=True)
    C = float(cos_part[0].real)
    S = float(sinc_part[0].real)
    g = p.r * math.sin(p.phi)
    return C, S, C * C + (p.s**2 + p.sigma**2 + 2 * g * g) * S * S / 2


def rho_plus_closed(p: GeneralNHParams, t: float) -> npt.NDArray[np.complex128]:
    """
    Closed-form normalized density matrix at time t for the initial state |+>.

    With g = r sin phi and (C, S, T) from :func:`plus_state_factors`:
      rho00 = (sigma^2 S^2 + (C + g S)^2) / 2T
      rho11 = (s^2 S^2 + (C - g S)^2) / 2T
      rho01 = (C + (g - i sigma) S)(C + (i s - g) S) / 2T
    """
    C, S, norm_factor = plus_state_factors(p, t)
    g = p.r * math.sin(p.phi)
    rho00 = (p.sigma**2 * S * S + (C + g * S) ** 2) / (2 * norm_factor)
    rho11 = (p.s**2 * S * S + (C - g * S) ** 2) / (2 * norm_factor)
    rho01 = (C + (g - 1j * p.sigma) * S) * (C + (1j * p.s - g) * S) / (2 * norm_factor)
    return np.array(
        [[rho00, rho01], [np.conj(rho01), rho11]], dtype=np.complex128
    )
