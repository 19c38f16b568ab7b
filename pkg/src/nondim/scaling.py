"""Scaling problems as monomials in characteristic factors, and their solvers.

A scaling problem collects the dimensionless coefficients of an equation as
monomials ``lambda_i = kappa_i * prod_j theta_j**alpha_ij`` over strictly
positive factors ``theta``.  Everything here works on ``rho = log10(theta)``,
where each ``log10(lambda_i)`` is affine and the Euclidean cost is a linear
least-squares problem with an explicit normal-equations solution.

Solvers provided:

* :func:`solve_euclidean` -- analytic minimizer of the squared log-distance
  from the per-coefficient targets;
* :func:`anneal_minimize` -- simulated annealing on either cost, for the
  max-norm cost in particular;
* :func:`solve_subset` / :func:`enumerate_traditional` -- force a chosen set
  of ``N_x`` coefficients to 1 and survey all such choices.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DegenerateExponentsError,
    DomainError,
    EnumerationCapError,
    UnsolvableSubsetError,
)

SINGULARITY_EPS = 1e-12


@dataclass(frozen=True)
class Monomial:
    """One dimensionless coefficient: kappa * prod_j theta_j**exponents[j].

    ``target`` is the desired order of magnitude (base-10 log) for this
    coefficient, 0 by default.
    """

    label: str
    kappa: float
    exponents: tuple[float, ...]
    target: float = 0.0

    def __post_init__(self):
        if not self.kappa > 0:
            raise DomainError(f"monomial {self.label!r}: kappa must be > 0")
        object.__setattr__(self, "exponents", tuple(float(a) for a in self.exponents))


@dataclass(frozen=True)
class ScalingProblem:
    """A set of monomial coefficients over named positive scaling factors."""

    factor_names: tuple[str, ...]
    monomials: tuple[Monomial, ...]

    def __post_init__(self):
        object.__setattr__(self, "factor_names", tuple(self.factor_names))
        object.__setattr__(self, "monomials", tuple(self.monomials))
        if len(self.factor_names) < 1 or len(self.monomials) < 1:
            raise DomainError("need at least one factor and one monomial")
        if len(set(self.factor_names)) != len(self.factor_names):
            raise DomainError("factor names must be unique")
        for mono in self.monomials:
            if len(mono.exponents) != len(self.factor_names):
                raise DomainError(
                    f"monomial {mono.label!r}: expected "
                    f"{len(self.factor_names)} exponents, got {len(mono.exponents)}"
                )

    @property
    def n_factors(self) -> int:
        return len(self.factor_names)

    @property
    def n_coefficients(self) -> int:
        return len(self.monomials)

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(m.label for m in self.monomials)

    def exponent_matrix(self) -> np.ndarray:
        """(N_d, N_x) array of monomial exponents."""
        return np.array([m.exponents for m in self.monomials], dtype=float)

    def log_kappas(self) -> np.ndarray:
        return np.log10([m.kappa for m in self.monomials])

    def targets(self) -> np.ndarray:
        return np.array([m.target for m in self.monomials], dtype=float)


@dataclass(frozen=True)
class ScalingSolution:
    """Factor values with the realized coefficients and quality metrics."""

    theta: np.ndarray
    lambdas: np.ndarray
    cost: float
    ratio: float
    method_tag: str


@dataclass(frozen=True)
class AnnealConfig:
    """Knobs for :func:`anneal_minimize`.

    The published method fixes only the evaluation budget; the cooling
    schedule and proposal width are this implementation's own (geometric
    cooling, Gaussian log-space steps shrinking with temperature).
    """

    max_evaluations: int = 100_000
    initial_temperature: float = 1.0
    seed: int = 0
    step_scale: float = 2.0

    def __post_init__(self):
        if self.max_evaluations < 1:
            raise DomainError("max_evaluations must be >= 1")
        if not self.initial_temperature > 0:
            raise DomainError("initial_temperature must be > 0")
        if not self.step_scale > 0:
            raise DomainError("step_scale must be > 0")


def _check_theta(problem: ScalingProblem, theta) -> np.ndarray:
    theta = np.asarray(theta, dtype=float)
    if theta.shape != (problem.n_factors,):
        raise DomainError(
            f"theta must have length {problem.n_factors}, got shape {theta.shape}"
        )
    if not np.all(theta > 0):
        raise DomainError("all theta components must be strictly positive")
    return theta


def eval_coefficients(problem: ScalingProblem, theta) -> np.ndarray:
    """Realized coefficients lambda_i = kappa_i * prod_j theta_j**alpha_ij."""
    theta = _check_theta(problem, theta)
    log_lam = problem.log_kappas() + problem.exponent_matrix() @ np.log10(theta)
    return 10.0 ** log_lam


def log_residuals(problem: ScalingProblem, rho: np.ndarray) -> np.ndarray:
    """log10(lambda_i) - target_i as a function of rho = log10(theta)."""
    return problem.log_kappas() + problem.exponent_matrix() @ rho - problem.targets()


def evaluate_cost(problem: ScalingProblem, theta, kind: str) -> float:
    """Distance of the realized coefficient magnitudes from their targets.

    ``kind='euclid'`` is the sum of squared log10 deviations; ``kind='max'``
    the largest absolute log10 deviation.
    """
    theta = _check_theta(problem, theta)
    res = log_residuals(problem, np.log10(theta))
    if kind == "euclid":
        return float(np.sum(res**2))
    if kind == "max":
        return float(np.max(np.abs(res)))
    raise DomainError(f"unknown cost kind {kind!r}")


def ratio(lambdas) -> float:
    """max(lambda) / min(lambda), the tractability metric of a coefficient set."""
    lambdas = np.asarray(lambdas, dtype=float)
    if lambdas.size == 0:
        raise DomainError("ratio of an empty coefficient vector")
    if not np.all(lambdas > 0):
        raise DomainError("ratio requires strictly positive coefficients")
    return float(np.max(lambdas) / np.min(lambdas))


def _solution(problem: ScalingProblem, theta: np.ndarray, kind: str, tag: str) -> ScalingSolution:
    lambdas = eval_coefficients(problem, theta)
    return ScalingSolution(
        theta=theta,
        lambdas=lambdas,
        cost=evaluate_cost(problem, theta, kind),
        ratio=ratio(lambdas),
        method_tag=tag,
    )


def gaussian_elimination_solve(A, b):
    """Solve A x = b by Gaussian elimination with partial pivoting.

    Returns ``(x, det)``.  Raises :class:`DegenerateExponentsError` as soon
    as a pivot magnitude drops to ``SINGULARITY_EPS`` or below, reporting the
    rank reached up to that point.
    """
    A = np.array(A, dtype=float)
    b = np.array(b, dtype=float)
    n = A.shape[0]
    det = 1.0
    for col in range(n):
        pivot_row = col + int(np.argmax(np.abs(A[col:, col])))
        pivot = A[pivot_row, col]
        if abs(pivot) <= SINGULARITY_EPS:
            raise DegenerateExponentsError(rank=col, size=n)
        if pivot_row != col:
            A[[col, pivot_row]] = A[[pivot_row, col]]
            b[[col, pivot_row]] = b[[pivot_row, col]]
            det = -det
        det *= pivot
        factors = A[col + 1 :, col] / pivot
        A[col + 1 :, col:] -= factors[:, None] * A[col, col:]
        b[col + 1 :] -= factors * b[col]
    x = np.empty(n)
    for row in range(n - 1, -1, -1):
        x[row] = (b[row] - A[row, row + 1 :] @ x[row + 1 :]) / A[row, row]
    return x, det


def solve_euclidean(problem: ScalingProblem) -> ScalingSolution:
    """Analytic minimizer of the Euclidean log-distance cost.

    Solves the normal equations ``(A^T A) rho = A^T (targets - log10 kappa)``
    and returns ``theta = 10**rho``.  The cost is convex in rho (a sum of
    squares of affine functions), so the stationary point is the global
    minimum.
    """
    A = problem.exponent_matrix()
    gram = A.T @ A
    rhs = A.T @ (problem.targets() - problem.log_kappas())
    rho, _ = gaussian_elimination_solve(gram, rhs)
    return _solution(problem, 10.0**rho, "euclid", "euclid")


def solve_subset(problem: ScalingProblem, subset) -> ScalingSolution:
    """Force the chosen coefficients to 1 (the traditional scaling recipe).

    ``subset`` holds exactly ``N_x`` distinct 0-based coefficient indices.
    The factors solve ``sum_j alpha_cj * rho_j = target_c - log10(kappa_c)``
    for each chosen c, so the chosen lambdas land exactly on their targets
    (1, for the default zero targets).
    """
    subset = tuple(int(c) for c in subset)
    n_x, n_d = problem.n_factors, problem.n_coefficients
    if len(subset) != n_x or len(set(subset)) != n_x:
        raise DomainError(f"subset must hold {n_x} distinct indices")
    if any(c < 0 or c >= n_d for c in subset):
        raise DomainError(f"subset indices must lie in [0, {n_d - 1}]")
    A = problem.exponent_matrix()[list(subset)]
    rhs = (problem.targets() - problem.log_kappas())[list(subset)]
    det = float(np.linalg.det(A))
    if abs(det) <= SINGULARITY_EPS:
        raise UnsolvableSubsetError(subset, det)
    rho = np.linalg.solve(A, rhs)
    tag = "subset:" + ",".join(str(c) for c in subset)
    return _solution(problem, 10.0**rho, "euclid", tag)


def anneal_minimize(
    problem: ScalingProblem, kind: str, config: AnnealConfig | None = None
) -> ScalingSolution:
    """Simulated annealing over rho = log10(theta) for either cost kind.

    The search is unconstrained in rho, which keeps theta positive by
    construction.  Always returns the best point seen, so the result never
    beats the initial point's cost from below.  Deterministic for a fixed
    seed.
    """
    if kind not in ("euclid", "max"):
        raise DomainError(f"unknown cost kind {kind!r}")
    config = config or AnnealConfig()
    A = problem.exponent_matrix()
    shift = problem.log_kappas() - problem.targets()

    def cost_of(rho):
        res = A @ rho + shift
        if kind == "euclid":
            return float(res @ res)
        return float(np.max(np.abs(res)))

    rng = np.random.default_rng(config.seed)
    n_x = problem.n_factors
    rho = np.zeros(n_x)
    current = cost_of(rho)
    best_rho, best_cost = rho.copy(), current

    t0 = config.initial_temperature
    evals_per_level = max(1, config.max_evaluations // 100)
    for evaluation in range(config.max_evaluations):
        temperature = t0 * 0.95 ** (evaluation // evals_per_level)
        width = config.step_scale * temperature / t0
        proposal = rho + rng.normal(0.0, width, size=n_x)
        proposed = cost_of(proposal)
        delta = proposed - current
        if delta <= 0 or rng.random() < math.exp(-delta / temperature):
            rho, current = proposal, proposed
            if current < best_cost:
                best_rho, best_cost = rho.copy(), current
    return _solution(problem, 10.0**best_rho, kind, f"anneal-{kind}")


@dataclass
class EnumerationResult:
    """All solvable traditional-scaling subsets, sorted ascending by ratio."""

    entries: list[tuple[tuple[int, ...], ScalingSolution]]
    total_subsets: int

    @property
    def solvable_count(self) -> int:
        return len(self.entries)

    @property
    def best(self) -> tuple[tuple[int, ...], ScalingSolution]:
        """The subset whose coefficient ratio is smallest."""
        return self.entries[0]

    @property
    def worst(self) -> tuple[tuple[int, ...], ScalingSolution]:
        return self.entries[-1]

    def fraction_with_ratio_above(self, threshold: float) -> float:
        ratios = np.array([sol.ratio for _, sol in self.entries])
        return float(np.mean(ratios > threshold))


def enumerate_traditional(
    problem: ScalingProblem, cap: int = 10**6, chunk: int = 8192
) -> EnumerationResult:
    """Survey every choice of N_x coefficients forced to 1.

    Iterates all C(N_d, N_x) subsets, discards the ones whose exponent
    submatrix has |det| <= 1e-12, and sorts the solvable ones by the ratio
    of their realized coefficients.  Subsets are solved in vectorized
    batches; the output order does not depend on batching.
    """
    n_x, n_d = problem.n_factors, problem.n_coefficients
    if n_d <= n_x:
        raise DomainError("enumeration needs more coefficients than factors")
    count = math.comb(n_d, n_x)
    if count > cap:
        raise EnumerationCapError(count, cap)

    A = problem.exponent_matrix()
    log_kappas = problem.log_kappas()
    targets = problem.targets()
    entries: list[tuple[tuple[int, ...], ScalingSolution]] = []

    combos = itertools.combinations(range(n_d), n_x)
    while True:
        batch = list(itertools.islice(combos, chunk))
        if not batch:
            break
        idx = np.array(batch)  # (B, N_x)
        mats = A[idx]  # (B, N_x, N_x)
        dets = np.linalg.det(mats)
        solvable = np.abs(dets) > SINGULARITY_EPS
        if not np.any(solvable):
            continue
        rhs = (targets - log_kappas)[idx[solvable]]
        rhos = np.linalg.solve(mats[solvable], rhs[..., None])[..., 0]
        log_lams = log_kappas[None, :] + rhos @ A.T
        res = log_lams - targets[None, :]
        costs = np.sum(res**2, axis=1)
        ratios = 10.0 ** (np.max(log_lams, axis=1) - np.min(log_lams, axis=1))
        for subset, rho, log_lam, cost, rat in zip(
            (batch[i] for i in np.flatnonzero(solvable)),
            rhos,
            log_lams,
            costs,
            ratios,
        ):
            tag = "subset:" + ",".join(str(c) for c in subset)
            entries.append(
                (
                    subset,
                    ScalingSolution(
                        theta=10.0**rho,
                        lambdas=10.0**log_lam,
                        cost=float(cost),
                        ratio=float(rat),
                        method_tag=tag,
                    ),
                )
            )
    entries.sort(key=lambda item: (item[1].ratio, item[0]))
    return EnumerationResult(entries=entries, total_subsets=count)
