"""Fixed-step RK4 integration and the projectile phase-space flow."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DomainError, NonFiniteEvaluationError, SingularEvaluationError

Rhs = Callable[[float, np.ndarray], np.ndarray]


@dataclass(frozen=True)
class Trajectory:
    """Time grid plus the state at every grid point (rows)."""

    times: np.ndarray
    states: np.ndarray

    def final_state(self) -> np.ndarray:
        return self.states[-1]


def rk4_step(rhs: Rhs, t: float, y: np.ndarray, tau: float) -> np.ndarray:
    k1 = rhs(t, y)
    k2 = rhs(t + 0.5 * tau, y + 0.5 * tau * k1)
    k3 = rhs(t + 0.5 * tau, y + 0.5 * tau * k2)
    k4 = rhs(t + tau, y + tau * k3)
    return y + (tau / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def rk4_integrate(
    rhs: Rhs, y0, t0: float, t1: float, steps: int
) -> Trajectory:
    """Classical fourth-order Runge-Kutta with constant step (t1-t0)/steps.

    The trajectory includes both endpoints.  A non-finite state aborts with
    the offending step index and state snapshot attached.
    """
    if not t1 > t0:
        raise DomainError("t1 must exceed t0")
    if steps < 1:
        raise DomainError("steps must be >= 1")
    y = np.array(y0, dtype=float)
    tau = (t1 - t0) / steps
    times = t0 + tau * np.arange(steps + 1)
    states = np.empty((steps + 1, y.size))
    states[0] = y
    for k in range(steps):
        y = rk4_step(rhs, times[k], y, tau)
        if not np.all(np.isfinite(y)):
            raise NonFiniteEvaluationError(
                f"non-finite state after step {k + 1}", step=k + 1, state=y
            )
        states[k + 1] = y
    return Trajectory(times=times, states=states)


def projectile_system(lambdas) -> Rhs:
    """Right-hand side of the scaled free-flight equations on (xi, xi').

    w1' = w2, w2' = -lambda1 / (1 + lambda2*w1)**2.  The initial data of the
    model are (0, lambda3); callers supply them to the integrator.
    """
    lam1, lam2, lam3 = (float(v) for v in lambdas)
    if min(lam1, lam2, lam3) <= 0:
        raise DomainError("lambdas must be strictly positive")

    def rhs(t: float, y: np.ndarray) -> np.ndarray:
        denom = 1.0 + lam2 * y[0]
        if denom == 0.0:
            raise SingularEvaluationError(
                f"singular point: 1 + lambda2*w1 = 0 at w1 = {y[0]!r}"
            )
        return np.array([y[1], -lam1 / denom**2])

    return rhs


@dataclass(frozen=True)
class FlowField:
    """Tangent vectors of the projectile system on a rectangular lattice."""

    w1: np.ndarray  # (n1,)
    w2: np.ndarray  # (n2,)
    dw1: np.ndarray  # (n2, n1)
    dw2: np.ndarray  # (n2, n1)
    singular_points: list[tuple[float, float]]


def flow_field(lambdas, w1_range, w2_range, grid_counts) -> FlowField:
    """Sample (w1', w2') on a lattice spanning the given ranges.

    Points where the rate is singular are reported, not silently skipped;
    their tangent entries are NaN.
    """
    (w1_lo, w1_hi), (w2_lo, w2_hi) = w1_range, w2_range
    n1, n2 = grid_counts
    if n1 < 2 or n2 < 2:
        raise DomainError("grid counts must be >= 2")
    if not (w1_hi > w1_lo and w2_hi > w2_lo):
        raise DomainError("ranges must be nonempty")
    rhs = projectile_system(lambdas)
    w1 = np.linspace(w1_lo, w1_hi, n1)
    w2 = np.linspace(w2_lo, w2_hi, n2)
    dw1 = np.empty((n2, n1))
    dw2 = np.empty((n2, n1))
    singular: list[tuple[float, float]] = []
    for i, b in enumerate(w2):
        for j, a in enumerate(w1):
            try:
                d = rhs(0.0, np.array([a, b]))
                dw1[i, j], dw2[i, j] = d
            except SingularEvaluationError:
                dw1[i, j] = dw2[i, j] = np.nan
                singular.append((float(a), float(b)))
    return FlowField(w1=w1, w2=w2, dw1=dw1, dw2=dw2, singular_points=singular)
