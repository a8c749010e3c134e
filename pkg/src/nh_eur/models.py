"""Data models for Hamiltonian parameters, states, observables and results."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field, replace
from enum import Enum

import numpy as np
import numpy.typing as npt

from .exceptions import InvalidParameterError

RealArray = npt.NDArray[np.float64]
NORM_TOL = 1e-12


def _require_finite(**values: float) -> None:
    for name, value in values.items():
        if not math.isfinite(value):
            raise InvalidParameterError(f"{name} must be finite, got {value}")


def _fmt(value: float) -> str:
    return format(value, ".17g")


@dataclass(frozen=True)
class GeneralNHParams:
    """Parameters (r, s, sigma, phi) of H = [[r e^{i phi}, sigma], [s, r e^{-i phi}]]."""

    r: float
    s: float
    sigma: float
    phi: float

    def __post_init__(self) -> None:
        _require_finite(r=self.r, s=self.s, sigma=self.sigma, phi=self.phi)
        if self.s < 0 or self.sigma < 0:
            raise InvalidParameterError(
                f"couplings must be non-negative, got s={self.s}, sigma={self.sigma}"
            )
        if not 0 <= self.phi < 2 * math.pi:
            raise InvalidParameterError(f"phi must lie in [0, 2*pi), got {self.phi}")

    @classmethod
    def pt(cls, r: float, s: float, phi: float) -> GeneralNHParams:
        """PT-symmetric member of the family (s = sigma)."""
        return cls(r=r, s=s, sigma=s, phi=phi)

    @property
    def is_pt_symmetric(self) -> bool:
        """True when s and sigma agree to rounding."""
        return abs(self.s - self.sigma) <= NORM_TOL * max(1.0, self.s, self.sigma)

    @property
    def model(self) -> str:
        return "pt" if self.is_pt_symmetric else "general"

    def describe(self) -> str:
        return (
            f"model={self.model} r={_fmt(self.r)} s={_fmt(self.s)} "
            f"sigma={_fmt(self.sigma)} phi={_fmt(self.phi)}"
        )


@dataclass(frozen=True)
class AntiPTParams:
    """Parameters (lambda, s, phi) of the anti-PT Hamiltonian."""

    lam: float
    s: float
    phi: float

    def __post_init__(self) -> None:
        _require_finite(lam=self.lam, s=self.s, phi=self.phi)

    @property
    def model(self) -> str:
        return "antipt"

    def describe(self) -> str:
        return (
            f"model=antipt lambda={_fmt(self.lam)} s={_fmt(self.s)} "
            f"phi={_fmt(self.phi)}"
        )


SystemParams = GeneralNHParams | AntiPTParams


class PhaseKind(str, Enum):
    """Spectral phase of a two-level non-Hermitian Hamiltonian."""

    UNBROKEN = "unbroken"
    BROKEN = "broken"
    EXCEPTIONAL_POINT = "exceptional_point"


@dataclass(frozen=True)
class PhaseClass:
    """Phase classification; the exceptional point keeps the tolerance it was found with."""

    kind: PhaseKind
    tolerance: float | None = None

    @property
    def is_unbroken(self) -> bool:
        return self.kind is PhaseKind.UNBROKEN

    @property
    def is_broken(self) -> bool:
        return self.kind is PhaseKind.BROKEN

    @property
    def is_exceptional(self) -> bool:
        return self.kind is PhaseKind.EXCEPTIONAL_POINT

    def __str__(self) -> str:
        return self.kind.value


@dataclass(frozen=True)
class SpectralData:
    """
    Eigenvalues, frequency, mixing angle and phase of a Hamiltonian.

    ``period`` is the repetition time of the EUR, or None when it does not
    repeat. The general model repeats only when unbroken, with pi / Re omega.
    The anti-PT model is the other way round: its broken phase (s below
    |lambda cos phi|) has real eigenvalues and repeats with pi / |omega|, while
    its unbroken phase relaxes and has no period.
    """

    e_plus: complex
    e_minus: complex
    omega: complex
    theta: complex | None
    delta_e: complex
    period: float | None
    phase: PhaseClass


@dataclass(frozen=True, eq=False)
class HermitianEquivalent:
    """Similarity transform eta and the Hermitian image h = eta H eta^-1."""

    eta: npt.NDArray[np.complex128]
    h: npt.NDArray[np.complex128]


@dataclass(frozen=True, eq=False)
class EvolvedState:
    """Normalized state after non-unitary evolution."""

    state: npt.NDArray[np.complex128]
    rho: npt.NDArray[np.complex128]
    norm_growth: float


class StateKind(str, Enum):
    """Named initial states."""

    ZERO = "zero"
    ONE = "one"
    PLUS = "plus"
    EIGEN = "eigen"


# Angle theta with (sin theta/2, cos theta/2) equal to the named state.
_NAMED_ANGLES = {
    StateKind.ZERO: math.pi,
    StateKind.ONE: 0.0,
    StateKind.PLUS: math.pi / 2,
}


@dataclass(frozen=True)
class InitialStateSpec:
    """
    Initial state of an evolution.

    ``EIGEN`` states are parameterized by the angle theta of the eigenbasis
    superposition sin(theta/2)|E+> + cos(theta/2)|E->, written in the
    computational basis as (sin theta/2, cos theta/2). The named states are the
    special cases theta = pi (|0>), 0 (|1>) and pi/2 (|+>).
    """

    kind: StateKind
    theta_angle: float | None = None
    alpha_coeff: complex | None = None
    beta_coeff: complex | None = None

    def __post_init__(self) -> None:
        if self.kind is StateKind.EIGEN:
            if self.theta_angle is None or not math.isfinite(self.theta_angle):
                raise InvalidParameterError("eigen states need a finite theta")
        elif self.theta_angle is not None:
            raise InvalidParameterError(f"{self.kind.value} state takes no theta")

    @classmethod
    def zero(cls) -> InitialStateSpec:
        return cls(StateKind.ZERO)

    @classmethod
    def one(cls) -> InitialStateSpec:
        return cls(StateKind.ONE)

    @classmethod
    def plus(cls) -> InitialStateSpec:
        return cls(StateKind.PLUS)

    @classmethod
    def eigen(cls, theta: float) -> InitialStateSpec:
        return cls(StateKind.EIGEN, theta_angle=theta)

    @classmethod
    def parse(cls, text: str) -> InitialStateSpec:
        """Parse 'zero', 'one', 'plus' or 'eigen:<theta>'."""
        name = text.strip().lower()
        aliases = {"0": "zero", "1": "one", "+": "plus"}
        name = aliases.get(name, name)
        if name.startswith("eigen:"):
            try:
                theta = float(name.split(":", 1)[1])
            except ValueError as e:
                raise InvalidParameterError(f"bad eigen angle in {text!r}") from e
            return cls.eigen(theta)
        try:
            return cls(StateKind(name))
        except ValueError as e:
            raise InvalidParameterError(f"unknown initial state {text!r}") from e

    @property
    def eigen_angle(self) -> float:
        """Angle theta of this state in the eigenbasis parameterization."""
        if self.kind is StateKind.EIGEN:
            assert self.theta_angle is not None
            return self.theta_angle
        return _NAMED_ANGLES[self.kind]

    @property
    def label(self) -> str:
        if self.kind is StateKind.EIGEN:
            return f"eigen:{_fmt(self.eigen_angle)}"
        return self.kind.value

    def amplitudes(self) -> npt.NDArray[np.complex128]:
        """Normalized computational-basis amplitudes."""
        if self.kind is StateKind.ZERO:
            return np.array([1.0, 0.0], dtype=np.complex128)
        if self.kind is StateKind.ONE:
            return np.array([0.0, 1.0], dtype=np.complex128)
        if self.kind is StateKind.PLUS:
            return np.array([1.0, 1.0], dtype=np.complex128) / math.sqrt(2.0)
        half = self.eigen_angle / 2
        return np.array([math.sin(half), math.cos(half)], dtype=np.complex128)

    def expanded(self, mixing: complex) -> InitialStateSpec:
        """
        Return a copy with the eigenbasis coefficients alpha and beta filled in.

        alpha = sec(Theta)/2 (cos theta/2 + e^{i Theta} sin theta/2)
        beta  = sec(Theta)/2 (e^{i Theta} cos theta/2 - sin theta/2)
        """
        cos_mix = cmath.cos(mixing)
        if cos_mix == 0:
            raise InvalidParameterError("sec(Theta) diverges at the exceptional point")
        half = self.eigen_angle / 2
        phase = cmath.exp(1j * mixing)
        sec_half = 0.5 / cos_mix
        alpha = sec_half * (math.cos(half) + phase * math.sin(half))
        beta = sec_half * (phase * math.cos(half) - math.sin(half))
        return replace(self, alpha_coeff=complex(alpha), beta_coeff=complex(beta))


@dataclass(frozen=True)
class ProjectiveObservable:
    """Projector pair P_pm = (I pm n.sigma)/2 for a unit Bloch vector n."""

    n: tuple[float, float, float]
    name: str = ""

    def __post_init__(self) -> None:
        if len(self.n) != 3:
            raise InvalidParameterError(f"Bloch vector needs 3 components, got {self.n}")
        _require_finite(n1=self.n[0], n2=self.n[1], n3=self.n[2])
        length = math.sqrt(sum(x * x for x in self.n))
        if abs(length - 1.0) > NORM_TOL:
            raise InvalidParameterError(f"Bloch vector must be unit length, got {length}")

    @classmethod
    def from_axis(cls, axis: str) -> ProjectiveObservable:
        """Observable along x, y or z, optionally negated ('-x')."""
        text = axis.strip().lower()
        sign = -1.0 if text.startswith("-") else 1.0
        key = text.lstrip("+-")
        index = {"x": 0, "y": 1, "z": 2}.get(key)
        if index is None:
            raise InvalidParameterError(f"unknown axis {axis!r}")
        n = [0.0, 0.0, 0.0]
        n[index] = sign
        return cls((n[0], n[1], n[2]), name=f"sigma_{text}")

    @classmethod
    def from_vector(cls, n1: float, n2: float, n3: float) -> ProjectiveObservable:
        return cls((n1, n2, n3), name=f"n=({_fmt(n1)},{_fmt(n2)},{_fmt(n3)})")

    @property
    def label(self) -> str:
        return self.name or f"n=({_fmt(self.n[0])},{_fmt(self.n[1])},{_fmt(self.n[2])})"


SIGMA_X = ProjectiveObservable.from_axis("x")
SIGMA_Y = ProjectiveObservable.from_axis("y")
SIGMA_Z = ProjectiveObservable.from_axis("z")
DEFAULT_OBSERVABLES = (SIGMA_X, SIGMA_Z)

ObservablePair = tuple[ProjectiveObservable, ProjectiveObservable]


@dataclass(frozen=True)
class ProbabilityPair:
    """Outcome probabilities of a binary projective measurement."""

    p_plus: float
    p_minus: float

    def __post_init__(self) -> None:
        for value in (self.p_plus, self.p_minus):
            if not 0.0 <= value <= 1.0:
                raise InvalidParameterError(f"probability out of [0, 1]: {value}")
        if abs(self.p_plus + self.p_minus - 1.0) > NORM_TOL:
            raise InvalidParameterError(
                f"probabilities must sum to 1, got {self.p_plus + self.p_minus}"
            )

    @classmethod
    def from_plus(cls, p_plus: float) -> ProbabilityPair:
        return cls(p_plus, 1.0 - p_plus)


@dataclass(frozen=True)
class EURSample:
    """Entropies of two measurements on one state, and their lower bound (bits)."""

    t: float
    h_r: float
    h_q: float
    eur: float
    bound: float


@dataclass(frozen=True, eq=False)
class EURTrace:
    """EUR time series on a uniform grid."""

    times: RealArray
    values: RealArray
    h_r: RealArray
    h_q: RealArray
    bound: float
    params: SystemParams
    observables: ObservablePair
    initial: InitialStateSpec

    def __post_init__(self) -> None:
        if len(self.values) != len(self.times) or len(self.h_r) != len(self.times):
            raise InvalidParameterError("trace arrays must match the time grid")
        if len(self.times) > 1 and not np.all(np.diff(self.times) > 0):
            raise InvalidParameterError("trace times must be strictly increasing")

    @property
    def minimum(self) -> float:
        return float(np.min(self.values))


@dataclass(frozen=True)
class WitnessResult:
    """Long-time average of the EUR over a finite horizon."""

    w: float
    horizon: float
    n_points: int
    converged: bool
    tail_delta: float


class BetaEstimator(str, Enum):
    """Magnitude estimator for the late-time EUR rate."""

    RMS = "rms"
    MAX_ABS = "maxabs"


@dataclass(frozen=True)
class BetaResult:
    """Late-time rate of change of the EUR over a window."""

    beta: float
    window_start: float
    window_end: float
    estimator: BetaEstimator


class MetricKind(str, Enum):
    """Criticality metric evaluated along a parameter scan."""

    WITNESS = "witness"
    BETA = "beta"


@dataclass(frozen=True)
class WitnessConfig:
    """Settings for witness evaluation."""

    horizon: float = 200.0
    n_points: int | None = None
    tolerance: float = 1e-3


@dataclass(frozen=True)
class BetaConfig:
    """Settings for beta evaluation."""

    window_start: float = 50.0
    window_end: float = 60.0
    n_points: int = 1000
    estimator: BetaEstimator = BetaEstimator.RMS


@dataclass(frozen=True, eq=False)
class ScanResult:
    """Metric values along a parameter grid and the detected sudden change."""

    grid: RealArray
    metric: RealArray
    critical_point: float
    critical_jump: float
    metric_kind: MetricKind
    param_name: str
    phases: tuple[PhaseClass, ...] = field(default_factory=tuple)
    transition_detected: bool = True
    analytic_point: float | None = None


class ValidationLevel(str, Enum):
    QUICK = "quick"
    FULL = "full"


@dataclass(frozen=True)
class CheckResult:
    """
    Outcome of one validation check.

    ``finding`` rows report a known discrepancy and never fail a run.
    """

    name: str
    discrepancy: float
    tolerance: float
    finding: bool = False
    detail: str = ""

    @property
    def passed(self) -> bool:
        return self.finding or self.discrepancy < self.tolerance

    @property
    def status(self) -> str:
        if self.finding:
            return "finding"
        return "pass" if self.passed else "FAIL"
