"""Reference integrator for i d|psi>/dt = H|psi> and plain trapezoid averages."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
import numpy.typing as npt

from .exceptions import IntegratorError
from .linalg import C2Matrix, C2Vector, ComplexArray, RealArray, max_norm

logger = logging.getLogger(__name__)

STABILITY_LIMIT = 0.1


@dataclass(frozen=True)
class IntegratorConfig:
    """Fixed-step classical Runge-Kutta settings."""

    dt: float = 1e-4
    t_max: float = 10.0
    method: str = "rk4"

    def __post_init__(self) -> None:
        if not (math.isfinite(self.dt) and math.isfinite(self.t_max)):
            raise IntegratorError("dt and t_max must be finite")
        if self.dt <= 0 or self.dt > self.t_max:
            raise IntegratorError(f"need 0 < dt <= t_max, got dt={self.dt}, t_max={self.t_max}")
        if self.method != "rk4":
            raise IntegratorError(f"unsupported method {self.method!r}")

    @property
    def n_steps(self) -> int:
        return max(1, math.ceil(self.t_max / self.dt - 1e-9))


@dataclass(frozen=True, eq=False)
class Trajectory:
    """States sampled on the integrator grid, shape (n_steps + 1, 2)."""

    times: RealArray
    states: ComplexArray

    def at(self, t: float) -> C2Vector:
        """State at the grid time closest to t."""
        index = int(np.argmin(np.abs(self.times - t)))
        return self.states[index]


def integrate_schrodinger(H: C2Matrix, psi0: C2Vector, cfg: IntegratorConfig) -> Trajectory:
    """
    Integrate d psi/dt = -i H psi with classical RK4.

    The step is shrunk to t_max / n_steps so the last sample lands on t_max.
    The norm is never renormalized along the way.

    Raises:
        IntegratorError: If max|H_ij| * dt >= 0.1
    """
    H = np.asarray(H, dtype=np.complex128)
    n_steps = cfg.n_steps
    dt = cfg.t_max / n_steps
    if max_norm(H) * dt >= STABILITY_LIMIT:
        raise IntegratorError(
            f"step too large: max|H| * dt = {max_norm(H) * dt:.3g} >= {STABILITY_LIMIT}"
        )

    # Plain complex scalars keep the inner loop cheap.
    h00, h01, h10, h11 = (complex(x) for x in H.ravel())
    a, b = complex(psi0[0]), complex(psi0[1])
    states = np.empty((n_steps + 1, 2), dtype=np.complex128)
    states[0] = (a, b)
    half = dt / 2

    def rhs(x: complex, y: complex) -> tuple[complex, complex]:
        return -1j * (h00 * x + h01 * y), -1j * (h10 * x + h11 * y)

    for step in range(1, n_steps + 1):
        k1a, k1b = rhs(a, b)
        k2a, k2b = rhs(a + half * k1a, b + half * k1b)
        k3a, k3b = rhs(a + half * k2a, b + half * k2b)
        k4a, k4b = rhs(a + dt * k3a, b + dt * k3b)
        a += dt / 6 * (k1a + 2 * k2a + 2 * k3a + k4a)
        b += dt / 6 * (k1b + 2 * k2b + 2 * k3b + k4b)
        states[step] = (a, b)

    logger.debug("rk4: %d steps of %.3g", n_steps, dt)
    return Trajectory(times=dt * np.arange(n_steps + 1), states=states)


def reference_average(values: npt.ArrayLike, times: npt.ArrayLike) -> float:
    """Trapezoid time average (1/(t_n - t_0)) sum (t_{i+1} - t_i)(f_i + f_{i+1})/2."""
    f = np.asarray(values, dtype=np.float64)
    t = np.asarray(times, dtype=np.float64)
    if f.shape != t.shape or f.ndim != 1 or len(t) < 2:
        raise IntegratorError("values and times must be aligned 1-d arrays of length >= 2")
    widths = t[1:] - t[:-1]
    total = float(np.sum(widths * (f[1:] + f[:-1]) / 2))
    return total / float(t[-1] - t[0])
