import math

import numpy as np
import pytest

from nondim.errors import DomainError, NonFiniteEvaluationError, SingularEvaluationError
from nondim.models import ProjectileParams, build_projectile
from nondim.odes import flow_field, projectile_system, rk4_integrate, rk4_step
from nondim.scaling import eval_coefficients, solve_euclidean


class TestRk4:
    def test_exact_on_quartic_polynomial_rhs(self):
        # One RK4 step integrates polynomial time dependence up to t^3
        # exactly; y' = 4 t^3 gives y = t^4 with zero local error.
        y = rk4_step(lambda t, y: np.array([4.0 * t**3]), 0.0, np.array([0.0]), 1.0)
        assert y[0] == pytest.approx(1.0, abs=1e-14)

    def test_fourth_order_convergence_on_exponential(self):
        def err(steps):
            traj = rk4_integrate(lambda t, y: -y, [1.0], 0.0, 2.0, steps)
            return abs(traj.final_state()[0] - math.exp(-2.0))

        order = math.log2(err(40) / err(80))
        assert order > 3.9

    def test_endpoints_included(self):
        traj = rk4_integrate(lambda t, y: y * 0.0, [1.0, 2.0], 0.5, 1.5, 10)
        assert traj.times[0] == pytest.approx(0.5)
        assert traj.times[-1] == pytest.approx(1.5)
        assert traj.states.shape == (11, 2)

    def test_nonfinite_state_aborts_with_step_index(self):
        with pytest.raises(NonFiniteEvaluationError) as err:
            rk4_integrate(lambda t, y: y**3, [10.0], 0.0, 10.0, 50)
        assert err.value.step is not None
        assert err.value.state is not None

    def test_invalid_interval(self):
        with pytest.raises(DomainError):
            rk4_integrate(lambda t, y: y, [1.0], 1.0, 1.0, 10)


class TestProjectileSystem:
    def test_singular_denominator_raises(self):
        rhs = projectile_system([1.0, 2.0, 3.0])
        with pytest.raises(SingularEvaluationError):
            rhs(0.0, np.array([-0.5, 0.0]))

    def test_small_lambda2_recovers_flat_gravity(self):
        # With lambda2 -> 0 the equation is w2' = -lambda1; apex time
        # is lambda3 / lambda1 for initial slope lambda3.
        lam = [2.0, 1e-12, 1.0]
        traj = rk4_integrate(projectile_system(lam), [0.0, lam[2]], 0.0, 1.0, 200)
        apex = traj.states[np.argmax(traj.states[:, 0])]
        assert traj.times[np.argmax(traj.states[:, 0])] == pytest.approx(0.5, abs=5e-3)
        assert apex[0] == pytest.approx(lam[2] ** 2 / (2 * lam[0]), rel=1e-3)

    def test_scaling_equivariance_roundtrip(self):
        # Integrating in scaled variables and mapping back must equal the
        # dimensional integration on the same physical time grid.
        p = ProjectileParams()
        problem = build_projectile(p)
        sol = solve_euclidean(problem)
        t_c, x_c = sol.theta
        t_max = 5.0
        scaled = rk4_integrate(
            projectile_system(sol.lambdas), [0.0, sol.lambdas[2]],
            0.0, t_max / t_c, 400,
        )
        unit_lam = eval_coefficients(problem, [1.0, 1.0])
        dimensional = rk4_integrate(
            projectile_system(unit_lam), [0.0, unit_lam[2]], 0.0, t_max, 400
        )
        np.testing.assert_allclose(
            x_c * scaled.states[:, 0], dimensional.states[:, 0],
            rtol=1e-8, atol=1e-6,
        )


class TestFlowField:
    def test_singular_points_reported_as_nan(self):
        lam = [1.0, 1.0, 1.0]
        flow = flow_field(lam, (-2.0, 0.0), (-1.0, 1.0), (5, 3))
        # w1 = -1 is the pole of 1/(1 + w1)^2 and lies on this lattice.
        assert flow.singular_points
        for a, b in flow.singular_points:
            assert a == pytest.approx(-1.0)
        assert np.isnan(flow.dw2).sum() == len(flow.singular_points)

    def test_regular_lattice_values(self):
        lam = [2.0, 0.5, 1.0]
        flow = flow_field(lam, (0.0, 1.0), (-1.0, 1.0), (3, 3))
        assert flow.dw1 == pytest.approx(np.tile(flow.w2[:, None], (1, 3)))
        assert flow.dw2[0, 0] == pytest.approx(-2.0)

    def test_range_validation(self):
        with pytest.raises(DomainError):
            flow_field([1.0, 1.0, 1.0], (1.0, 0.0), (0.0, 1.0), (3, 3))
