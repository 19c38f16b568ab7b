"""Dimensionless two-phase cluster population balance solver.

The transport + nucleation + migration + aggregation system for the
non-equilibrium distribution ``m`` and the equilibrium distribution ``w`` is
semi-discretized on a fixed uniform volume grid (the solution is tracked
along constant curves, so the advection term keeps its spatial derivative).
Volume derivatives use a fourth-order five-point scheme, the aggregation
integrals use composite Simpson weights, and time stepping is classical RK4.

The point-mass nucleation source is regularized as a narrow Gaussian of
width ``sigma_c``; when the grid cannot resolve that width the solution
develops the negative oscillations the diagnostics here are built to expose.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, fields, replace
from typing import NamedTuple

import numpy as np

from .errors import DomainError, NonFiniteEvaluationError
from .models import LatexConstants
from .scaling import ScalingSolution, ScalingProblem

TRUNCATION_TOLERANCE = 1e-6


@dataclass(frozen=True)
class LatexCoefficients:
    """The 19 dimensionless rate coefficients plus scale-free constants.

    ``sigma_c`` is the width of the Gaussian standing in for the nucleation
    point mass; it must stay well below the nucleation volume ``lam_c``.
    """

    lam_a_m: float
    lam_a_w: float
    lam_d: float
    lam_p: float
    lam_n: float
    lam_c: float
    lam_mu_m: float
    lam_mu_w: float
    lam_dm_mat: float
    lam_dw_mat: float
    lam_s_m: float
    lam_s_mat: float
    lam_pol1_pol2: float
    lam_pol1_mat: float
    lam_p_m: float
    lam_p_w: float
    lam_p_pol2: float
    lam_p_pol1: float
    lam_p_mat: float
    Phi_s: float
    Psi_bar: float
    Psi_r: float
    sigma_c: float = 0.0  # 0 means "use lam_c / 50"

    def __post_init__(self):
        if self.sigma_c == 0.0:
            object.__setattr__(self, "sigma_c", self.lam_c / 50.0)
        # lam_n and lam_s_m may be zero together (the nucleation off-switch;
        # they are tied by the moment identity lam_s_m = lam_n * lam_c).
        for f in fields(self):
            if f.name in ("Phi_s", "Psi_bar", "Psi_r"):
                continue
            value = getattr(self, f.name)
            if f.name in ("lam_n", "lam_s_m"):
                if value < 0:
                    raise DomainError(f"{f.name} must be >= 0")
                continue
            if not value > 0:
                raise DomainError(f"{f.name} must be > 0")
        if self.lam_c / self.sigma_c < 10.0:
            raise DomainError("lam_c must dominate sigma_c (ratio >= 10)")

    @classmethod
    def from_solution(
        cls,
        problem: ScalingProblem,
        solution: ScalingSolution,
        constants: LatexConstants,
        sigma_rule: float = 50.0,
    ) -> "LatexCoefficients":
        """Bundle a scaling solution of the 19-coefficient problem."""
        lam = dict(zip(problem.labels, solution.lambdas))
        return cls(
            lam_a_m=lam["a_m"], lam_a_w=lam["a_w"], lam_d=lam["d"],
            lam_p=lam["p"], lam_n=lam["n"], lam_c=lam["c"],
            lam_mu_m=lam["mu_m"], lam_mu_w=lam["mu_w"],
            lam_dm_mat=lam["dm_mat"], lam_dw_mat=lam["dw_mat"],
            lam_s_m=lam["s_m"], lam_s_mat=lam["s_mat"],
            lam_pol1_pol2=lam["pol1_pol2"], lam_pol1_mat=lam["pol1_mat"],
            lam_p_m=lam["p_m"], lam_p_w=lam["p_w"],
            lam_p_pol2=lam["p_pol2"], lam_p_pol1=lam["p_pol1"],
            lam_p_mat=lam["p_mat"],
            Phi_s=constants.Phi_s, Psi_bar=constants.Psi_bar,
            Psi_r=constants.Psi_r,
            sigma_c=lam["c"] / sigma_rule,
        )


@dataclass(frozen=True)
class Grid:
    """Uniform volume grid phi_k = k*h for k = 0..N."""

    N: int
    h: float

    def __post_init__(self):
        if self.N < 8:
            raise DomainError("grid needs N >= 8 (five-point stencils)")
        if not self.h > 0:
            raise DomainError("h must be > 0")

    @classmethod
    def from_vmax(cls, N: int, v_max: float) -> "Grid":
        return cls(N=N, h=v_max / N)

    @property
    def v_max(self) -> float:
        return self.N * self.h

    def nodes(self) -> np.ndarray:
        return self.h * np.arange(self.N + 1)


@dataclass
class PbeState:
    """Distribution values on the grid plus the five auxiliary scalars."""

    m: np.ndarray
    w: np.ndarray
    V_mat: float
    V_cm: float
    V_cw: float
    Psi: float
    V_pol2: float

    @classmethod
    def initial(cls, grid: Grid, psi_bar: float) -> "PbeState":
        zeros = np.zeros(grid.N + 1)
        return cls(m=zeros.copy(), w=zeros.copy(),
                   V_mat=0.0, V_cm=0.0, V_cw=0.0, Psi=psi_bar, V_pol2=0.0)


def gaussian_delta(v: float, lc: float, sc: float):
    """Gaussian density of mean lc and width sc, the mollified point mass."""
    if not sc > 0:
        raise DomainError("sigma must be > 0")
    z = (np.asarray(v, dtype=float) - lc) / sc
    return np.exp(-0.5 * z * z) / (sc * math.sqrt(2.0 * math.pi))


def phi_and_vp(coeffs: LatexCoefficients, state: PbeState) -> tuple[float, float]:
    """Monomer availability Phi (clamped at 0) and swollen volume V_p."""
    psi1 = state.Psi + 1.0
    phi = max(
        state.V_mat / (psi1 * (state.V_mat + coeffs.lam_pol1_mat)) - coeffs.Phi_s,
        0.0,
    )
    v_p = psi1 * (
        coeffs.lam_p_mat * state.V_mat
        + coeffs.lam_p_m * state.V_cm
        + coeffs.lam_p_w * state.V_cw
        + coeffs.lam_p_pol1
    )
    return phi, v_p


class Rates(NamedTuple):
    a_m: float
    a_w: float
    g: float
    dg_dv: float
    n: float
    mu_m: float
    mu_w: float


def rate_functions(coeffs: LatexCoefficients, state: PbeState, v: float, u: float) -> Rates:
    """Point values of every rate at volumes (v, u) for the given state.

    The aggregation kernel and the growth derivative carry a v**(-1/3)
    singularity, so v must be strictly positive.
    """
    if v <= 0 or u <= 0:
        raise DomainError("rate functions need strictly positive volumes")
    phi, v_p = phi_and_vp(coeffs, state)
    if v_p <= 0:
        raise DomainError("state corruption: V_p <= 0")
    psi1 = state.Psi + 1.0
    kernel = v ** (-1.0 / 3.0) + u ** (-1.0 / 3.0)
    agg = psi1 ** (14.0 / 3.0) * kernel
    growth_coef = coeffs.lam_d * phi * psi1 ** (2.0 / 3.0)
    dilation = coeffs.lam_p * state.Psi / v_p
    return Rates(
        a_m=coeffs.lam_a_m * agg,
        a_w=coeffs.lam_a_w * agg,
        g=growth_coef * v ** (2.0 / 3.0) + dilation * v,
        dg_dv=(2.0 / 3.0) * growth_coef * v ** (-1.0 / 3.0) + dilation,
        n=coeffs.lam_n * phi * float(gaussian_delta(v, coeffs.lam_c, coeffs.sigma_c)),
        mu_m=coeffs.lam_mu_m,
        mu_w=coeffs.lam_mu_w,
    )


def fd4_derivative(values, h: float) -> np.ndarray:
    """Fourth-order first derivative at nodes 1..N of a uniform grid.

    Central five-point formula in the interior, one-sided variants at the
    last three nodes and at node 1.  Node 0 feeds the stencils but gets no
    derivative (its value is a boundary condition).
    """
    values = np.asarray(values, dtype=float)
    n = values.size - 1
    if n < 4:
        raise DomainError("fd4 needs at least 5 nodes")
    out = np.empty(n)
    out[1:n - 2] = (
        -values[4:] + 8.0 * values[3:-1] - 8.0 * values[1:-3] + values[:-4]
    ) / (12.0 * h)
    out[0] = (
        values[4] - 6.0 * values[3] + 18.0 * values[2]
        - 10.0 * values[1] - 3.0 * values[0]
    ) / (12.0 * h)
    out[n - 2] = (
        3.0 * values[n] + 10.0 * values[n - 1] - 18.0 * values[n - 2]
        + 6.0 * values[n - 3] - values[n - 4]
    ) / (12.0 * h)
    out[n - 1] = (
        25.0 * values[n] - 48.0 * values[n - 1] + 36.0 * values[n - 2]
        - 16.0 * values[n - 3] + 3.0 * values[n - 4]
    ) / (12.0 * h)
    return out


def simpson_weights(upto: int, h: float) -> np.ndarray:
    """Quadrature weights on nodes 0..upto for the integral over [0, upto*h].

    Even subinterval counts use composite Simpson; odd counts use Simpson on
    the first upto-3 subintervals plus the 3/8 rule on the last three, which
    keeps the global order at four.
    """
    if upto < 2:
        raise DomainError("quadrature needs at least 2 subintervals")
    w = np.zeros(upto + 1)
    if upto % 2 == 0:
        w[0] = w[upto] = h / 3.0
        w[1:upto:2] = 4.0 * h / 3.0
        w[2:upto:2] = 2.0 * h / 3.0
    else:
        head = upto - 3
        if head >= 2:
            w[0] = w[head] = h / 3.0
            w[1:head:2] = 4.0 * h / 3.0
            w[2:head:2] = 2.0 * h / 3.0
        w[head] += 3.0 * h / 8.0
        w[head + 1] += 9.0 * h / 8.0
        w[head + 2] += 9.0 * h / 8.0
        w[upto] += 3.0 * h / 8.0
    return w


def simpson_integral(values, h: float, upto: int | None = None) -> float:
    """Integral of grid samples over [0, phi_upto] at fourth order."""
    values = np.asarray(values, dtype=float)
    if upto is None:
        upto = values.size - 1
    return float(simpson_weights(upto, h) @ values[: upto + 1])


class GmocWorkspace:
    """Grid-dependent precomputations for the semi-discrete right-hand side."""

    def __init__(self, coeffs: LatexCoefficients, grid: Grid):
        self.coeffs = coeffs
        self.grid = grid
        n = grid.N
        nodes = grid.nodes()
        self.nodes = nodes
        inv_cbrt = np.zeros(n + 1)
        inv_cbrt[1:] = nodes[1:] ** (-1.0 / 3.0)
        self.inv_cbrt = inv_cbrt
        # Full-grid loss weights with the origin excluded (the kernel is
        # singular at u = 0 and the open-interval indicator drops it anyway).
        loss_w = simpson_weights(n, grid.h)
        loss_w[0] = 0.0
        self.loss_weights = loss_w
        # Gain term: for each target node k the convolution integral runs
        # over [0, phi_k] with its own Simpson row; endpoints j = 0 and
        # j = k are excluded by the open-interval indicator.  The kernel
        # factor (phi_{k-j}^(-1/3) + phi_j^(-1/3)) is state-independent and
        # folded into the weight matrix.
        gain_w = np.zeros((n + 1, n + 1))
        for k in range(2, n + 1):
            row = simpson_weights(k, grid.h)
            gain_w[k, 1:k] = row[1:k] * (inv_cbrt[k - 1:0:-1] + inv_cbrt[1:k])
        self.gain_weights = gain_w
        # Gather index for dist[k - j] (entries with j > k are masked by
        # the zero weights above).
        kj = np.arange(n + 1)[:, None] - np.arange(n + 1)[None, :]
        self.kj_index = np.clip(kj, 0, n)
        self.moment0_weights = simpson_weights(n, grid.h)
        self.surface_integrand = nodes ** (2.0 / 3.0)
        self.nucleation_shape = np.asarray(
            gaussian_delta(nodes, coeffs.lam_c, coeffs.sigma_c)
        )

    def aggregation(self, dist: np.ndarray, prefactor: float) -> tuple[np.ndarray, np.ndarray]:
        """(gain, loss) at nodes 1..N for kernel prefactor*(v^-1/3 + u^-1/3)."""
        shifted = dist[self.kj_index]
        gain = 0.5 * prefactor * ((self.gain_weights * shifted) @ dist)
        s0 = self.loss_weights @ dist
        s1 = self.loss_weights @ (self.inv_cbrt * dist)
        loss = prefactor * dist * (self.inv_cbrt * s0 + s1)
        return gain[1:], loss[1:]


def aggregation_terms(
    coeffs: LatexCoefficients, dist, which: str, state: PbeState, grid: Grid
) -> tuple[np.ndarray, np.ndarray]:
    """Aggregation gain and loss vectors at nodes 1..N for one distribution."""
    if which not in ("m", "w"):
        raise DomainError("which must be 'm' or 'w'")
    lam_a = coeffs.lam_a_m if which == "m" else coeffs.lam_a_w
    prefactor = lam_a * (state.Psi + 1.0) ** (14.0 / 3.0)
    ws = GmocWorkspace(coeffs, grid)
    return ws.aggregation(np.asarray(dist, dtype=float), prefactor)


def _pack(state: PbeState) -> np.ndarray:
    return np.concatenate(
        [state.m, state.w,
         [state.V_mat, state.V_cm, state.V_cw, state.Psi, state.V_pol2]]
    )


def _unpack(y: np.ndarray, n: int) -> PbeState:
    return PbeState(
        m=y[: n + 1], w=y[n + 1 : 2 * n + 2],
        V_mat=float(y[-5]), V_cm=float(y[-4]), V_cw=float(y[-3]),
        Psi=float(y[-2]), V_pol2=float(y[-1]),
    )


def _rhs_vector(ws: GmocWorkspace, y: np.ndarray) -> np.ndarray:
    c = ws.coeffs
    n = ws.grid.N
    state = _unpack(y, n)
    m, w = state.m, state.w
    phi, v_p = phi_and_vp(c, state)
    if v_p <= 0:
        raise NonFiniteEvaluationError("state corruption: V_p <= 0")
    psi1 = state.Psi + 1.0
    surf = psi1 ** (2.0 / 3.0)
    sigma_m = surf * float(ws.moment0_weights @ (ws.surface_integrand * m))
    sigma_w = surf * float(ws.moment0_weights @ (ws.surface_integrand * w))

    growth_coef = c.lam_d * phi * surf
    dilation = c.lam_p * state.Psi / v_p
    g = growth_coef * ws.surface_integrand + dilation * ws.nodes
    dg = (2.0 / 3.0) * growth_coef * ws.inv_cbrt[1:] + dilation

    agg = psi1 ** (14.0 / 3.0)
    gain_m, loss_m = ws.aggregation(m, c.lam_a_m * agg)
    gain_w, loss_w = ws.aggregation(w, c.lam_a_w * agg)

    dm = np.zeros(n + 1)
    dw = np.zeros(n + 1)
    dm[1:] = (
        -g[1:] * fd4_derivative(m, ws.grid.h)
        - (dg + c.lam_mu_m) * m[1:]
        + c.lam_n * phi * ws.nucleation_shape[1:]
        + gain_m - loss_m
    )
    dw[1:] = (
        -g[1:] * fd4_derivative(w, ws.grid.h)
        - dg * w[1:]
        + c.lam_mu_w * m[1:]
        + gain_w - loss_w
    )

    transfer = c.lam_p * state.Psi / v_p
    d_v_mat = transfer * (state.V_mat + c.lam_pol1_mat) - phi * (
        c.lam_s_mat + c.lam_dm_mat * sigma_m + c.lam_dw_mat * sigma_w
    )
    d_v_cm = transfer * state.V_cm + phi * (c.lam_s_m + c.lam_d * sigma_m) \
        - c.lam_mu_m * state.V_cm
    d_v_cw = transfer * state.V_cw + c.lam_d * phi * sigma_w \
        + c.lam_mu_w * state.V_cm
    d_psi = -c.lam_p_pol2 * state.Psi / psi1 * (state.Psi + c.Psi_r) / (
        state.V_pol2 + c.lam_pol1_pol2
    )
    d_v_pol2 = c.lam_p_pol2 * state.Psi / psi1

    out = np.concatenate([dm, dw, [d_v_mat, d_v_cm, d_v_cw, d_psi, d_v_pol2]])
    if not np.all(np.isfinite(out)):
        raise NonFiniteEvaluationError(_diagnose_nonfinite(dm, dw, out[-5:]))
    return out


def _diagnose_nonfinite(dm, dw, aux) -> str:
    bad = []
    if not np.all(np.isfinite(dm)):
        bad.append(f"dm at nodes {np.flatnonzero(~np.isfinite(dm)).tolist()[:5]}")
    if not np.all(np.isfinite(dw)):
        bad.append(f"dw at nodes {np.flatnonzero(~np.isfinite(dw)).tolist()[:5]}")
    names = ("dV_mat", "dV_cm", "dV_cw", "dPsi", "dV_pol2")
    bad.extend(name for name, v in zip(names, aux) if not np.isfinite(v))
    return "non-finite right-hand side: " + "; ".join(bad)


def assemble_rhs(coeffs: LatexCoefficients, grid: Grid, state: PbeState, t: float = 0.0) -> PbeState:
    """Time derivative of the full state (boundary nodes pinned to zero)."""
    ws = GmocWorkspace(coeffs, grid)
    return _unpack(_rhs_vector(ws, _pack(state)), grid.N)


@dataclass
class SimulationReport:
    """Sampled series, diagnostics, and final distributions of one run."""

    times: np.ndarray
    V_mat: np.ndarray
    V_cm: np.ndarray
    V_cw: np.ndarray
    Psi: np.ndarray
    V_pol2: np.ndarray
    F_m: np.ndarray
    F_w: np.ndarray
    min_m: float
    min_w: float
    final_m: np.ndarray
    final_w: np.ndarray
    settings: dict
    aborted: str | None = None
    eps_m: np.ndarray | None = field(default=None)
    eps_w: np.ndarray | None = field(default=None)

    @property
    def max_eps_m(self) -> float | None:
        return None if self.eps_m is None else float(np.max(self.eps_m))

    @property
    def max_eps_w(self) -> float | None:
        return None if self.eps_w is None else float(np.max(self.eps_w))


def default_step_count(
    coeffs: LatexCoefficients, grid: Grid, t_max: float, cfl: float = 0.5
) -> int:
    """Step count keeping tau*max|g|/h below the cfl number.

    Uses conservative bounds Phi <= 1, Psi <= Psi(0) and the smallest
    reachable swollen volume; there is no sharp stability criterion for
    this system, so this is a heuristic with margin.
    """
    psi = coeffs.Psi_bar
    g_bound = (
        coeffs.lam_d * (psi + 1.0) ** (2.0 / 3.0) * grid.v_max ** (2.0 / 3.0)
        + coeffs.lam_p * psi / coeffs.lam_p_pol1 * grid.v_max
    )
    return max(int(math.ceil(t_max * g_bound / (cfl * grid.h))), 100)


def simulate(
    coeffs: LatexCoefficients,
    grid: Grid,
    t_max: float,
    steps: int,
    sample_every: int = 1,
) -> SimulationReport:
    """Integrate from the empty initial state and collect diagnostics.

    Deterministic for identical inputs.  The run stops early (with a
    warning recorded in the report) if the distribution support reaches the
    upper grid boundary, where the truncated aggregation integral stops
    being a valid approximation.
    """
    if steps < 1 or sample_every < 1:
        raise DomainError("steps and sample_every must be >= 1")
    ws = GmocWorkspace(coeffs, grid)
    n = grid.N
    tau = t_max / steps
    y = _pack(PbeState.initial(grid, coeffs.Psi_bar))

    sample_times = [0.0]
    samples = [_sample(ws, y)]
    min_m = 0.0
    min_w = 0.0
    aborted = None
    for k in range(steps):
        k1 = _rhs_vector(ws, y)
        k2 = _rhs_vector(ws, y + 0.5 * tau * k1)
        k3 = _rhs_vector(ws, y + 0.5 * tau * k2)
        k4 = _rhs_vector(ws, y + tau * k3)
        y = y + (tau / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if not np.all(np.isfinite(y)):
            raise NonFiniteEvaluationError(
                f"state overflow after step {k + 1}", step=k + 1, state=y
            )
        m = y[: n + 1]
        w = y[n + 1 : 2 * n + 2]
        min_m = min(min_m, float(m.min()))
        min_w = min(min_w, float(w.min()))
        if (k + 1) % sample_every == 0 or k + 1 == steps:
            sample_times.append((k + 1) * tau)
            samples.append(_sample(ws, y))
        peak = float(m.max())
        if peak > 0 and m[n] > TRUNCATION_TOLERANCE * peak:
            aborted = (
                f"support reached the grid boundary at step {k + 1}: "
                f"m_N = {m[n]:.3e} vs max(m) = {peak:.3e}"
            )
            warnings.warn(aborted, RuntimeWarning, stacklevel=2)
            break

    series = np.array(samples)  # (S, 7)
    state = _unpack(y, n)
    report = SimulationReport(
        times=np.array(sample_times),
        V_mat=series[:, 0], V_cm=series[:, 1], V_cw=series[:, 2],
        Psi=series[:, 3], V_pol2=series[:, 4],
        F_m=series[:, 5], F_w=series[:, 6],
        min_m=min_m, min_w=min_w,
        final_m=state.m.copy(), final_w=state.w.copy(),
        settings={
            "N": n, "h": grid.h, "t_max": t_max, "steps": steps,
            "sample_every": sample_every, "sigma_c": coeffs.sigma_c,
            "lam_c": coeffs.lam_c,
        },
        aborted=aborted,
    )
    report.eps_m, report.eps_w = error_series(report)
    return report


def _sample(ws: GmocWorkspace, y: np.ndarray) -> list[float]:
    n = ws.grid.N
    state = _unpack(y, n)
    f_m = float(ws.moment0_weights @ (ws.nodes * state.m))
    f_w = float(ws.moment0_weights @ (ws.nodes * state.w))
    return [state.V_mat, state.V_cm, state.V_cw, state.Psi, state.V_pol2, f_m, f_w]


def _time_integral(times: np.ndarray, values: np.ndarray) -> float:
    """Composite Simpson over the uniform prefix, trapezoid on the tail."""
    n = len(times) - 1
    if n < 1:
        return 0.0
    dt = np.diff(times)
    h = dt[0]
    nonuniform = np.flatnonzero(~np.isclose(dt, h, rtol=1e-9, atol=0.0))
    end = int(nonuniform[0]) if nonuniform.size else n
    even = end if end % 2 == 0 else end - 1
    total = 0.0
    if even >= 2:
        total += float(simpson_weights(even, h) @ values[: even + 1])
    for seg in range(even, n):
        total += 0.5 * (values[seg] + values[seg + 1]) * dt[seg]
    return total


def error_series(report: SimulationReport) -> tuple[np.ndarray | None, np.ndarray | None]:
    """Moment-consistency errors for both phases.

    eps(t) = |V_c(t) - F(t)| normalized by the L2 norm in time of V_c.  A
    zero denominator (nothing ever nucleated) reports the series as absent.
    """
    out = []
    for v_c, f in ((report.V_cm, report.F_m), (report.V_cw, report.F_w)):
        denom = math.sqrt(_time_integral(report.times, v_c**2))
        out.append(None if denom == 0.0 else np.abs(v_c - f) / denom)
    return out[0], out[1]
