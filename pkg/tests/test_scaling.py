import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nondim.errors import (
    DegenerateExponentsError,
    DomainError,
    EnumerationCapError,
    UnsolvableSubsetError,
)
from nondim.scaling import (
    AnnealConfig,
    Monomial,
    ScalingProblem,
    anneal_minimize,
    enumerate_traditional,
    eval_coefficients,
    evaluate_cost,
    gaussian_elimination_solve,
    ratio,
    solve_euclidean,
    solve_subset,
)


def toy_problem():
    return ScalingProblem(
        factor_names=("a", "b"),
        monomials=(
            Monomial("l1", 2.0, (1.0, 0.0)),
            Monomial("l2", 5.0, (0.0, 1.0)),
            Monomial("l3", 1.0, (1.0, 1.0)),
        ),
    )


class TestValidation:
    def test_kappa_must_be_positive(self):
        with pytest.raises(DomainError):
            Monomial("bad", -1.0, (1.0,))

    def test_exponent_length_mismatch(self):
        with pytest.raises(DomainError):
            ScalingProblem(("a",), (Monomial("l", 1.0, (1.0, 2.0)),))

    def test_duplicate_factor_names(self):
        with pytest.raises(DomainError):
            ScalingProblem(("a", "a"), (Monomial("l", 1.0, (1.0, 1.0)),))

    def test_theta_must_be_positive(self):
        with pytest.raises(DomainError):
            eval_coefficients(toy_problem(), [1.0, -1.0])

    def test_ratio_rejects_nonpositive(self):
        with pytest.raises(DomainError):
            ratio([1.0, 0.0])


class TestEvaluation:
    def test_coefficients_by_hand(self):
        lam = eval_coefficients(toy_problem(), [10.0, 100.0])
        assert lam == pytest.approx([20.0, 500.0, 1000.0])

    def test_cost_kinds(self):
        problem = toy_problem()
        theta = [1.0, 1.0]
        res = np.log10([2.0, 5.0, 1.0])
        assert evaluate_cost(problem, theta, "euclid") == pytest.approx(np.sum(res**2))
        assert evaluate_cost(problem, theta, "max") == pytest.approx(np.max(np.abs(res)))
        with pytest.raises(DomainError):
            evaluate_cost(problem, theta, "manhattan")

    @given(st.lists(st.floats(-3, 3), min_size=2, max_size=2))
    def test_coefficients_follow_monomial_law(self, log_theta):
        problem = toy_problem()
        theta = 10.0 ** np.array(log_theta)
        lam = eval_coefficients(problem, theta)
        expected = [2.0 * theta[0], 5.0 * theta[1], theta[0] * theta[1]]
        assert lam == pytest.approx(expected, rel=1e-9)


class TestGaussianElimination:
    @given(st.integers(0, 10_000))
    @settings(max_examples=30, deadline=None)
    def test_matches_numpy_on_well_conditioned_systems(self, seed):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(1, 7))
        A = rng.normal(size=(n, n)) + 3.0 * np.eye(n)
        b = rng.normal(size=n)
        x, det = gaussian_elimination_solve(A, b)
        assert x == pytest.approx(np.linalg.solve(A, b), rel=1e-8, abs=1e-10)
        assert det == pytest.approx(np.linalg.det(A), rel=1e-8)

    def test_singular_reports_rank(self):
        A = [[1.0, 2.0], [2.0, 4.0]]
        with pytest.raises(DegenerateExponentsError) as err:
            gaussian_elimination_solve(A, [1.0, 1.0])
        assert err.value.rank == 1
        assert err.value.size == 2


class TestEuclideanSolver:
    def test_exactly_solvable_targets_are_hit(self):
        problem = ScalingProblem(
            ("a", "b"),
            (Monomial("l1", 4.0, (1.0, 0.0)), Monomial("l2", 0.25, (0.0, 1.0))),
        )
        sol = solve_euclidean(problem)
        assert sol.lambdas == pytest.approx([1.0, 1.0], rel=1e-12)
        assert sol.cost == pytest.approx(0.0, abs=1e-20)

    def test_degenerate_exponents_raise(self):
        problem = ScalingProblem(
            ("a", "b"),
            (Monomial("l1", 2.0, (1.0, 0.0)), Monomial("l2", 3.0, (2.0, 0.0))),
        )
        with pytest.raises(DegenerateExponentsError):
            solve_euclidean(problem)

    @given(st.lists(st.floats(-2, 2), min_size=2, max_size=2))
    @settings(max_examples=50, deadline=None)
    def test_analytic_solution_is_global_minimum(self, log_theta):
        problem = toy_problem()
        best = solve_euclidean(problem)
        other = 10.0 ** np.array(log_theta)
        assert best.cost <= evaluate_cost(problem, other, "euclid") + 1e-9


class TestSubsetSolver:
    def test_chosen_coefficients_land_on_one(self):
        sol = solve_subset(toy_problem(), (0, 1))
        assert sol.lambdas[0] == pytest.approx(1.0, rel=1e-12)
        assert sol.lambdas[1] == pytest.approx(1.0, rel=1e-12)

    def test_wrong_cardinality(self):
        with pytest.raises(DomainError):
            solve_subset(toy_problem(), (0,))

    def test_out_of_range_index(self):
        with pytest.raises(DomainError):
            solve_subset(toy_problem(), (0, 5))

    def test_singular_subset(self):
        problem = ScalingProblem(
            ("a", "b"),
            (
                Monomial("l1", 2.0, (1.0, 1.0)),
                Monomial("l2", 3.0, (2.0, 2.0)),
                Monomial("l3", 5.0, (0.0, 1.0)),
            ),
        )
        with pytest.raises(UnsolvableSubsetError) as err:
            solve_subset(problem, (0, 1))
        assert err.value.subset == (0, 1)


class TestAnnealing:
    def test_deterministic_for_fixed_seed(self):
        problem = toy_problem()
        config = AnnealConfig(max_evaluations=2000, seed=7)
        a = anneal_minimize(problem, "max", config)
        b = anneal_minimize(problem, "max", config)
        assert np.array_equal(a.theta, b.theta)
        assert a.cost == b.cost

    def test_returns_best_seen_never_worse_than_start(self):
        problem = toy_problem()
        start_cost = evaluate_cost(problem, [1.0, 1.0], "euclid")
        sol = anneal_minimize(problem, "euclid", AnnealConfig(max_evaluations=500, seed=1))
        assert sol.cost <= start_cost

    def test_approaches_analytic_euclidean_optimum(self):
        problem = toy_problem()
        analytic = solve_euclidean(problem)
        annealed = anneal_minimize(
            problem, "euclid", AnnealConfig(max_evaluations=20_000, seed=3)
        )
        assert annealed.cost <= analytic.cost + 0.05


class TestEnumeration:
    def test_projectile_style_counts(self):
        result = enumerate_traditional(toy_problem())
        assert result.total_subsets == 3
        assert result.solvable_count == 3
        ratios = [sol.ratio for _, sol in result.entries]
        assert ratios == sorted(ratios)

    def test_cap_enforced(self):
        with pytest.raises(EnumerationCapError) as err:
            enumerate_traditional(toy_problem(), cap=2)
        assert err.value.count == 3

    def test_needs_more_coefficients_than_factors(self):
        problem = ScalingProblem(
            ("a", "b"),
            (Monomial("l1", 1.0, (1.0, 0.0)), Monomial("l2", 1.0, (0.0, 1.0))),
        )
        with pytest.raises(DomainError):
            enumerate_traditional(problem)

    def test_batch_solutions_match_direct_solver(self):
        result = enumerate_traditional(toy_problem())
        for subset, sol in result.entries:
            direct = solve_subset(toy_problem(), subset)
            assert sol.theta == pytest.approx(direct.theta, rel=1e-12)
            assert sol.ratio == pytest.approx(direct.ratio, rel=1e-12)
