import numpy as np
import pytest
from scipy import integrate, special

from kmspectral.dynamics import KmParams
from kmspectral.exceptions import QuadratureError, ReactionOverflowError
from kmspectral.oracles import adaptive_quadrature, rk4_sir, splitting_solve
from kmspectral.spectral import (
    RealField,
    constant_field,
    gaussian_bump,
    heat_flow,
    random_band_limited_field,
)


class TestRk4:
    def test_logistic_closed_form(self):
        # mu = 0: u + v = N is conserved and v solves v' = v (N - v).
        u0, v0, T = 0.6, 0.1, 3.0
        N = u0 + v0
        ode = rk4_sir(u0, v0, 0.0, "paper", T, 1e-3)
        t = ode.times
        exact = N * v0 * np.exp(N * t) / (N - v0 + v0 * np.exp(N * t))
        np.testing.assert_allclose(ode.v, exact, atol=1e-13)
        np.testing.assert_allclose(ode.u + ode.v, N, atol=1e-14)

    @pytest.mark.parametrize("sign,sigma", [("paper", 1), ("epidemiological", -1)])
    def test_first_integral(self, sign, sigma):
        # d/dt (u + v) = sigma mu v and d/dt log u = -v, so u + v + sigma mu log u is constant.
        ode = rk4_sir(0.8, 0.05, 0.4, sign, 2.0, 1e-3)
        invariant = ode.u + ode.v + sigma * 0.4 * np.log(ode.u)
        np.testing.assert_allclose(invariant, invariant[0], atol=1e-13)

    def test_fourth_order(self):
        ref = rk4_sir(0.5, 0.3, 0.7, "epidemiological", 1.0, 1e-4)
        errs = [abs(rk4_sir(0.5, 0.3, 0.7, "epidemiological", 1.0, dt).v[-1] - ref.v[-1])
                for dt in (0.02, 0.01)]
        assert errs[0] / errs[1] == pytest.approx(16, rel=0.05)

    def test_at(self):
        ode = rk4_sir(0.5, 0.3, 0.0, "paper", 1.0, 0.1)
        assert ode.at(0.0) == (0.5, 0.3)

    @pytest.mark.parametrize("T,dt", [(1.0, 0.2), (1.0, 0.03), (0.0, 0.1), (1.0, -0.1)])
    def test_step_validation(self, T, dt):
        with pytest.raises(ValueError):
            rk4_sir(0.5, 0.3, 0.0, "paper", T, dt)


class TestSplitting:
    def test_constant_data_matches_rk4(self, grid):
        params = KmParams(mu=0.5, mu_sign="epidemiological")
        traj = splitting_solve(constant_field(grid, 0.02), constant_field(grid, 0.01),
                               params, 0.2, 1e-3)
        ode = rk4_sir(0.02, 0.01, 0.5, "epidemiological", 0.2, 1e-3)
        np.testing.assert_allclose(traj.u_samples, np.outer(ode.u, np.ones(grid.n_points)),
                                   atol=1e-15)
        np.testing.assert_allclose(traj.v_samples, np.outer(ode.v, np.ones(grid.n_points)),
                                   atol=1e-15)

    def test_heat_reduction(self, grid):
        phi = random_band_limited_field(3, 16, 1.0, grid)
        traj = splitting_solve(phi, RealField.zeros(grid), KmParams(mu=1.0), 0.5, 0.05)
        assert np.all(traj.v_samples == 0)
        np.testing.assert_allclose(traj.u_samples[-1], heat_flow(phi, 0.5).samples, atol=1e-13)

    def test_second_order_in_time(self, grid):
        phi = gaussian_bump(grid, 0, 2.0, 0.5)
        psi = gaussian_bump(grid, 1, 3.0, 0.5)
        params = KmParams(mu=0.3)
        ref = splitting_solve(phi, psi, params, 0.5, 0.5 / 1600).v_samples[-1]
        errs = [np.max(np.abs(splitting_solve(phi, psi, params, 0.5, dt).v_samples[-1] - ref))
                for dt in (0.05, 0.025)]
        assert errs[0] / errs[1] == pytest.approx(4, rel=0.1)

    def test_overflow(self, grid):
        with pytest.raises(ReactionOverflowError):
            splitting_solve(constant_field(grid, 1.0), constant_field(grid, 1.0),
                            KmParams(mu=20.0), 1.0, 0.01)


class TestAdaptiveQuadrature:
    @pytest.mark.parametrize("f,a,b", [
        (np.sin, 0.0, np.pi),
        (lambda y: np.exp(-y**2), -3.0, 4.0),
        (lambda y: 1 / (1 + 25 * y**2), -1.0, 1.0),
    ])
    def test_smooth_against_scipy(self, f, a, b):
        expected, _ = integrate.quad(f, a, b, epsabs=1e-14)
        assert adaptive_quadrature(f, a, b, 1e-12) == pytest.approx(expected, abs=1e-12)

    @pytest.mark.parametrize("p,q", [(-0.5, -0.5), (-0.9, -0.1), (-0.3, -0.8), (0.0, -0.7)])
    def test_beta_weight(self, p, q):
        value = adaptive_quadrature(lambda y: np.ones_like(y), 0.0, 1.0, 1e-11, weight=(p, q))
        assert value == pytest.approx(special.beta(1 + p, 1 + q), abs=1e-10)

    def test_arcsine_is_pi(self):
        value = adaptive_quadrature(lambda y: np.ones_like(y), 0.0, 1.0, 1e-11,
                                    weight=(-0.5, -0.5))
        assert value == pytest.approx(np.pi, abs=1e-10)

    def test_budget_exhausted(self):
        with pytest.raises(QuadratureError):
            adaptive_quadrature(lambda y: np.sin(1 / y), 1e-6, 1.0, 1e-14, max_intervals=10)

    @pytest.mark.parametrize("a,b,tol", [(1.0, 0.0, 1e-8), (0.0, 1.0, 0.0)])
    def test_arguments(self, a, b, tol):
        with pytest.raises(ValueError):
            adaptive_quadrature(np.sin, a, b, tol)
