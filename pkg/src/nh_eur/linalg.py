"""Exact-size complex linear algebra for 2-vectors and 2x2 matrices."""

from __future__ import annotations

import cmath
from dataclasses import dataclass
from typing import overload

import numpy as np
import numpy.typing as npt

from .exceptions import InvalidParameterError

C2Vector = npt.NDArray[np.complex128]
C2Matrix = npt.NDArray[np.complex128]
RealArray = npt.NDArray[np.float64]
ComplexArray = npt.NDArray[np.complex128]

SINC_SWITCH = 1e-4
DEFECT_TOL = 1e-12

IDENTITY: C2Matrix = np.eye(2, dtype=np.complex128)
SIGMA_X_MATRIX: C2Matrix = np.array([[0, 1], [1, 0]], dtype=np.complex128)
SIGMA_Y_MATRIX: C2Matrix = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
SIGMA_Z_MATRIX: C2Matrix = np.array([[1, 0], [0, -1]], dtype=np.complex128)


@dataclass(frozen=True, eq=False)
class Eigensystem:
    """Eigenvalues and unit eigenvectors of a 2x2 matrix."""

    eigenvalues: tuple[complex, complex]
    eigenvectors: tuple[C2Vector, C2Vector]
    defective: bool


def c2vector(a0: complex, a1: complex) -> C2Vector:
    """Build a finite complex 2-vector."""
    return _require_finite(np.array([a0, a1], dtype=np.complex128), "C2Vector")


def c2matrix(m00: complex, m01: complex, m10: complex, m11: complex) -> C2Matrix:
    """Build a finite complex 2x2 matrix from its entries."""
    return _require_finite(
        np.array([[m00, m01], [m10, m11]], dtype=np.complex128), "C2Matrix"
    )


def _require_finite(values: ComplexArray, what: str) -> ComplexArray:
    if not np.all(np.isfinite(values)):
        raise InvalidParameterError(f"{what} has non-finite entries: {values}")
    return values


def max_norm(M: ComplexArray) -> float:
    """Max-entry magnitude, the only norm used at this size."""
    return float(np.max(np.abs(M)))


def dagger(M: C2Matrix) -> C2Matrix:
    """Conjugate transpose."""
    return np.conj(M).T


def inv2(M: C2Matrix) -> C2Matrix:
    """Closed-form inverse of an invertible 2x2 matrix."""
    det = M[0, 0] * M[1, 1] - M[0, 1] * M[1, 0]
    if det == 0:
        raise InvalidParameterError("matrix is singular")
    return np.array([[M[1, 1], -M[0, 1]], [-M[1, 0], M[0, 0]]]) / det


def mat2_eig(M: C2Matrix) -> Eigensystem:
    """
    Eigen-decomposition of a 2x2 complex matrix from its characteristic polynomial.

    Eigenvalues are returned as (tr/2 + d, tr/2 - d) with d the principal square
    root of the half-discriminant. The matrix is flagged defective when the
    discriminant vanishes to within 1e-12*(1 + |M|^2); the two eigenvectors are
    then (numerically) the same direction.

    Args:
        M: Finite 2x2 complex matrix

    Returns:
        Eigensystem with unit-norm eigenvectors
    """
    M = _require_finite(np.asarray(M, dtype=np.complex128), "C2Matrix")
    a, b, c, d = M[0, 0], M[0, 1], M[1, 0], M[1, 1]
    half_trace = (a + d) / 2
    disc = complex((a - d) ** 2 + 4 * b * c)
    norm = max_norm(M)
    defective = abs(disc) <= DEFECT_TOL * (1 + norm**2)
    half_gap = cmath.sqrt(disc) / 2
    values = (complex(half_trace + half_gap), complex(half_trace - half_gap))

    vectors = []
    for index, lam in enumerate(values):
        # Null vector of M - lam I from either row; keep the better conditioned one.
        from_row0 = np.array([b, lam - a], dtype=np.complex128)
        from_row1 = np.array([lam - d, c], dtype=np.complex128)
        if np.linalg.norm(from_row0) >= np.linalg.norm(from_row1):
            vec = from_row0
        else:
            vec = from_row1
        size = float(np.linalg.norm(vec))
        if size <= DEFECT_TOL * (1 + norm):
            vec = np.eye(2, dtype=np.complex128)[index]
            size = 1.0
        vectors.append(vec / size)

    return Eigensystem(values, (vectors[0], vectors[1]), bool(defective))


@overload
def sinc_c(z: complex) -> complex: ...


@overload
def sinc_c(z: ComplexArray) -> ComplexArray: ...


def sinc_c(z: complex | ComplexArray) -> complex | ComplexArray:
    """
    Stable sin(z)/z for complex arguments.

    Below |z| = 1e-4 the truncated series 1 - z^2/6 + z^4/120 is used; its
    truncation error is below 1e-17 there.
    """
    values = np.asarray(z, dtype=np.complex128)
    small = np.abs(values) < SINC_SWITCH
    safe = np.where(small, 1.0, values)
    z2 = values * values
    with np.errstate(over="ignore", invalid="ignore"):
        result = np.where(small, 1 - z2 / 6 + z2 * z2 / 120, np.sin(safe) / safe)
    if result.ndim == 0:
        return complex(result)
    return result


def traceless_split(A: C2Matrix) -> tuple[complex, C2Matrix, complex]:
    """
    Split A into (tr A / 2) I + M and return (tr A / 2, M, mu).

    M squares to mu^2 I with mu^2 = -det M; mu is the principal root.
    """
    half_trace = complex((A[0, 0] + A[1, 1]) / 2)
    M = A - half_trace * IDENTITY
    mu = cmath.sqrt(complex(-(M[0, 0] * M[1, 1] - M[0, 1] * M[1, 0])))
    return half_trace, M, mu


def mat2_exp_times(A: C2Matrix, t: float) -> C2Matrix:
    """
    exp(-i A t) through the trace/traceless split.

    exp(-iAt) = e^{-i tr(A) t / 2} [cos(mu t) I - i t sinc(mu t) M], which stays
    valid for defective A because sinc_c is regular at zero.
    """
    A = _require_finite(np.asarray(A, dtype=np.complex128), "C2Matrix")
    half_trace, M, mu = traceless_split(A)
    z = mu * t
    result = cmath.exp(-1j * half_trace * t) * (
        cmath.cos(z) * IDENTITY - 1j * t * sinc_c(z) * M
    )
    return _require_finite(result, "exp(-iAt)")


def cos_sinc_pair(
    mu: complex, times: npt.ArrayLike, *, damped: bool = False
) -> tuple[ComplexArray, ComplexArray]:
    """
    cos(mu t) and t*sinc(mu t) on a time grid.

    With ``damped`` both are multiplied by e^{-|Im mu| t}, which keeps them
    bounded for growing modes; callers that normalize afterwards lose nothing.
    """
    t = np.asarray(times, dtype=np.float64)
    z = mu * t
    if not damped:
        return np.cos(z), t * sinc_c(z)

    decay = -abs(mu.imag) * t
    with np.errstate(over="ignore", invalid="ignore"):
        near = np.exp(decay)
        cos_near = np.cos(z) * near
        sinc_near = t * sinc_c(z) * near
        # Far branch from exponentials whose real exponents are <= 0.
        up = np.exp(1j * z + decay)
        down = np.exp(-1j * z + decay)
        cos_far = (up + down) / 2
        sinc_far = (up - down) / (2j * (mu if mu != 0 else 1.0))
    far = -decay > 20.0
    return np.where(far, cos_far, cos_near), np.where(far, sinc_far, sinc_near)


def mat2_exp_batch(A: C2Matrix, times: npt.ArrayLike) -> ComplexArray:
    """
    exp(-iAt) up to a scalar factor on a whole time grid, shape (n, 2, 2).

    The scalar trace factor and the e^{|Im mu| t} growth are dropped, so the
    result never overflows; use it only where states are normalized afterwards.
    """
    _, M, mu = traceless_split(np.asarray(A, dtype=np.complex128))
    cos_part, sinc_part = cos_sinc_pair(mu, times, damped=True)
    return (
        cos_part[:, None, None] * IDENTITY[None, :, :]
        - 1j * sinc_part[:, None, None] * M[None, :, :]
    )
