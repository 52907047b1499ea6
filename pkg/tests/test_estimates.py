import math

import numpy as np
import pytest
from scipy import special

from kmspectral.dynamics import uniform_times
from kmspectral.ensembles import narrow_unit_mass_bump
from kmspectral.estimates import (
    BetaLemmaCase,
    alpha_case,
    alpha_case_coverage,
    beta_grid,
    beta_integral,
    bilinear_sample,
    empirical_gate,
    heat_lp_lq_ratio,
    printed_smoothing_constant,
    riesz_extremizer_ratio,
    sharp_smoothing_constant,
    verify_beta_lemma,
    verify_bilinear,
    verify_heat_lp_lq,
    verify_hls,
    verify_lem1_components,
    verify_linear_estimate,
    verify_riesz_smoothing,
)
from kmspectral.spaces import FieldHistory
from kmspectral.spectral import GridSpec, RealField, constant_field


class TestHeatLpLq:
    def test_constant_saturates_l2(self, grid):
        ratio = heat_lp_lq_ratio(constant_field(grid, 1.0), 2, 2, [0.1, 1.0])
        np.testing.assert_allclose(ratio, 1.0, rtol=1e-14)

    def test_narrow_bump_approaches_kernel_peak(self):
        g = GridSpec(n_points=4096)
        ratio = heat_lp_lq_ratio(narrow_unit_mass_bump(g, 0.05), 1, np.inf, [1.0])[0]
        assert 0.999 < ratio <= 1.0

    @pytest.mark.parametrize("q,p", [(2, 2), (2, 4), (1, np.inf)])
    def test_small_ensemble(self, grid, q, p):
        report = verify_heat_lp_lq(0, 10, q, p, grid=grid)
        assert report.passed and report.max_ratio <= 1 + 1e-6
        assert report.to_dict()["pass"] is True

    def test_exponent_order(self, grid):
        with pytest.raises(ValueError):
            verify_heat_lp_lq(0, 1, 4, 2, grid=grid)


class TestRieszSmoothing:
    def test_constants(self):
        assert sharp_smoothing_constant(0) == 1.0
        assert sharp_smoothing_constant(1.0) == pytest.approx(math.sqrt(1 / (2 * math.e)))
        assert printed_smoothing_constant(2.0) == pytest.approx(1.0)

    @pytest.mark.parametrize("s", [0.5, 1.0, 1.5])
    def test_extremizer_is_near_sharp(self, s):
        assert 0.99 <= riesz_extremizer_ratio(s, 1.0) <= 1.0 + 1e-12

    def test_reports_per_s(self, grid):
        reports = verify_riesz_smoothing(1, 10, grid=grid)
        assert [r.parameters["s"] for r in reports] == [0.0, 0.5, 1.0, 1.5]
        assert all(r.passed for r in reports)


class TestHls:
    def test_stable(self, grid):
        report = verify_hls(0, 10, grid=grid)
        assert report.passed and report.bound_constant is None

    @pytest.mark.parametrize("kwargs", [{"alpha": 1.2}, {"p": 5}, {"q": 3}])
    def test_exponents(self, grid, kwargs):
        with pytest.raises(ValueError):
            verify_hls(0, 1, grid=grid, **kwargs)


class TestLinearBilinear:
    def test_linear_constant_above_one(self, grid):
        # Slice 0 alone already gives ratio 1 for the Sobolev part.
        report = verify_linear_estimate(0, 5, 0.0, 0.1, 10, grid)
        assert report.max_ratio > 1 and report.passed

    def test_bilinear_constant_histories(self, grid):
        # f = g = 1 and s = 0: the Duhamel term is t, so the Sobolev part is T sqrt(2L).
        times = uniform_times(0.5, 10)
        one = FieldHistory(grid, times, np.ones((11, grid.n_points)))
        sample = bilinear_sample(one, one, 0.0)
        assert sample["lhs"].sobolev_sup == pytest.approx(0.5 * math.sqrt(grid.length), rel=1e-12)
        assert sample["weighted_product_sup"] == pytest.approx(0.5 * grid.length ** 0.5)

    def test_components_and_gate(self, grid):
        assert len(verify_lem1_components(0, 3, 1.0, 0.1, 10, grid)) == 2
        c_b = verify_bilinear(0, 3, 1.0, 0.1, 10, grid).max_ratio
        gate = empirical_gate(1.0, 0.1, 10, 1.0, n_samples=3, grid=grid)
        assert gate.c_b_hat == c_b
        assert gate.rho == pytest.approx(1 / (3 * c_b))


class TestBetaLemma:
    def test_arcsine(self):
        case = BetaLemmaCase(0.5, 0.5, 1.0)
        assert beta_integral(case) == pytest.approx(math.pi, abs=1e-8)

    def test_scaling_in_t(self):
        for t in (0.1, 10.0):
            case = BetaLemmaCase(0.7, 0.6, t)
            expected = t ** (-case.r) * special.beta(0.3, 0.4)
            assert beta_integral(case) == pytest.approx(expected, rel=1e-9)

    def test_grid(self):
        cases = beta_grid()
        assert len(cases) == 75
        assert all(0 <= c.r <= 1 for c in cases)
        report = verify_beta_lemma(cases[::7])
        assert report.passed

    @pytest.mark.parametrize("args", [(0.2, 0.3, 1.0), (1.0, 0.5, 1.0), (0.5, 0.5, 0.0)])
    def test_invalid_case(self, args):
        with pytest.raises(ValueError):
            BetaLemmaCase(*args)


def test_alpha_cases():
    assert alpha_case(0.5) == "second" and alpha_case(7 / 16) == "first"
    rows = alpha_case_coverage([0.0, 1.0, 1.9])
    assert [r["case"] for r in rows] == ["second", "first", "first"]
    assert [r["proof_safe"] for r in rows] == [True, False, False]
