import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kmspectral.exceptions import GridMismatchError, NonRealFieldError
from kmspectral.spectral import (
    GridSpec,
    RealField,
    SpectralField,
    constant_field,
    dealiased_product,
    forward_transform,
    gaussian_bump,
    heat_flow,
    heat_semigroup,
    inverse_transform,
    random_band_limited_field,
    riesz_derivative,
)


def mode(grid, k):
    return RealField.from_function(grid, lambda x: np.cos(np.pi * k * x / grid.half_length))


class TestGridSpec:
    def test_defaults(self):
        g = GridSpec()
        assert g.n_points == 1024
        assert g.half_length == pytest.approx(32 * np.pi)
        assert g.x[0] == pytest.approx(-g.half_length)
        assert g.dx == pytest.approx(2 * g.half_length / 1024)

    def test_wavenumbers_natural_order(self, grid):
        k = grid.wavenumbers
        assert k[0] == -grid.n_points // 2 and k[-1] == grid.n_points // 2 - 1
        np.testing.assert_allclose(grid.xi, np.pi * k / grid.half_length)

    @pytest.mark.parametrize("n", [0, 3, 7, 100])
    def test_rejects_bad_sizes(self, n):
        with pytest.raises(ValueError):
            GridSpec(n_points=n)

    def test_rejects_bad_length(self):
        with pytest.raises(ValueError):
            GridSpec(half_length=-1.0)

    def test_refined(self, grid):
        assert grid.refined().n_points == 2 * grid.n_points


class TestRealField:
    def test_read_only(self, grid):
        f = constant_field(grid, 1.0)
        with pytest.raises(ValueError):
            f.samples[0] = 2.0

    def test_rejects_nonfinite(self, grid):
        samples = np.zeros(grid.n_points)
        samples[3] = np.nan
        with pytest.raises(ValueError):
            RealField(grid, samples)

    def test_rejects_wrong_length(self, grid):
        with pytest.raises(ValueError):
            RealField(grid, np.zeros(grid.n_points + 1))

    def test_grid_mismatch(self, grid):
        with pytest.raises(GridMismatchError):
            constant_field(grid, 1.0) + constant_field(grid.refined(), 1.0)

    def test_arithmetic(self, grid):
        f = constant_field(grid, 2.0)
        g = constant_field(grid, 0.5)
        np.testing.assert_allclose((f - g * 2).samples, 1.0)
        np.testing.assert_allclose((-f).samples, -2.0)
        assert (f + g).mean() == pytest.approx(2.5)


class TestTransforms:
    def test_cosine_coefficients(self, grid):
        # cos(pi x / L) = (e^{i xi x} + e^{-i xi x}) / 2 exactly.
        F = forward_transform(mode(grid, 1))
        assert F.coefficient(1) == pytest.approx(0.5, abs=1e-15)
        assert F.coefficient(-1) == pytest.approx(0.5, abs=1e-15)
        others = np.delete(F.coefficients, [grid.n_points // 2 - 1, grid.n_points // 2 + 1])
        assert np.max(np.abs(others)) < 1e-15

    def test_constant_is_zero_mode(self, grid):
        F = forward_transform(constant_field(grid, 3.0))
        assert F.coefficient(0) == pytest.approx(3.0)

    def test_sine_phase(self, grid):
        f = RealField.from_function(grid, lambda x: np.sin(3 * np.pi * x / grid.half_length))
        F = forward_transform(f)
        assert F.coefficient(3) == pytest.approx(-0.5j, abs=1e-14)
        assert F.coefficient(-3) == pytest.approx(0.5j, abs=1e-14)

    def test_hermitian(self, grid):
        f = random_band_limited_field(4, 16, 1.0, grid)
        assert forward_transform(f).hermitian_defect() < 1e-15

    def test_non_real_spectrum_rejected(self, grid):
        c = np.zeros(grid.n_points, dtype=complex)
        c[grid.n_points // 2 + 2] = 1.0
        with pytest.raises(NonRealFieldError):
            inverse_transform(SpectralField(grid, c))

    @settings(max_examples=25, deadline=None)
    @given(seed=st.integers(0, 2**32 - 1), cutoff=st.integers(1, 60))
    def test_roundtrip(self, seed, cutoff):
        g = GridSpec(n_points=128)
        f = random_band_limited_field(seed, cutoff, 1.0, g)
        back = inverse_transform(forward_transform(f))
        assert np.max(np.abs(back.samples - f.samples)) <= 1e-12 * np.max(np.abs(f.samples))


class TestMultipliers:
    @pytest.mark.parametrize("k", [1, 5, 40])
    @pytest.mark.parametrize("r", [-1.0, 0.5, 1.0, 2.0])
    def test_riesz_on_mode(self, grid, k, r):
        xi = np.pi * k / grid.half_length
        out = inverse_transform(riesz_derivative(forward_transform(mode(grid, k)), r))
        np.testing.assert_allclose(out.samples, xi**r * mode(grid, k).samples, atol=1e-12 * xi**r)

    def test_second_derivative_matches_calculus(self, grid):
        # D^2 = -d^2/dx^2 on the torus.
        f = gaussian_bump(grid, 0.0, 3.0)
        out = inverse_transform(riesz_derivative(forward_transform(f), 2.0))
        x = grid.x
        exact = -(4 * x**2 / 81 - 2 / 9) * np.exp(-x**2 / 9)
        np.testing.assert_allclose(out.samples, exact, atol=1e-12)

    def test_riesz_kills_mean_unless_r_zero(self, grid):
        F = forward_transform(constant_field(grid, 1.0))
        assert riesz_derivative(F, 0.0).coefficient(0) == 1.0
        assert riesz_derivative(F, 0.7).coefficient(0) == 0.0
        assert riesz_derivative(F, -0.5).coefficient(0) == 0.0

    @pytest.mark.parametrize("r", [-1.5, 2.5])
    def test_riesz_range(self, grid, r):
        with pytest.raises(ValueError):
            riesz_derivative(forward_transform(constant_field(grid, 1.0)), r)

    @pytest.mark.parametrize("t", [0.0, 0.3, 5.0])
    def test_heat_on_mode(self, grid, t):
        k = 7
        xi = np.pi * k / grid.half_length
        out = heat_flow(mode(grid, k), t)
        np.testing.assert_allclose(out.samples, np.exp(-t * xi**2) * mode(grid, k).samples,
                                   atol=1e-14)

    def test_heat_gaussian_closed_form(self, grid512):
        # exp(-x^2/w^2) spreads to w/sqrt(w^2+4t) exp(-x^2/(w^2+4t)) on the line;
        # periodization at L = 32 pi is far below double precision.
        w, t = 2.0, 1.5
        out = heat_flow(gaussian_bump(grid512, 0.0, w), t)
        x = grid512.x
        exact = w / np.sqrt(w**2 + 4 * t) * np.exp(-x**2 / (w**2 + 4 * t))
        np.testing.assert_allclose(out.samples, exact, atol=1e-13)

    def test_heat_negative_time(self, grid):
        with pytest.raises(ValueError):
            heat_semigroup(forward_transform(constant_field(grid, 1.0)), -0.1)

    @settings(max_examples=20, deadline=None)
    @given(s=st.floats(0.0, 3.0), t=st.floats(0.0, 3.0), seed=st.integers(0, 1000))
    def test_semigroup_property(self, s, t, seed):
        g = GridSpec(n_points=128)
        F = forward_transform(random_band_limited_field(seed, 20, 1.0, g))
        a = heat_semigroup(heat_semigroup(F, s), t).coefficients
        b = heat_semigroup(F, s + t).coefficients
        np.testing.assert_allclose(a, b, atol=1e-15)


class TestRandomFields:
    def test_deterministic(self, grid):
        a = random_band_limited_field(11, 8, 0.3, grid)
        b = random_band_limited_field(11, 8, 0.3, grid)
        np.testing.assert_array_equal(a.samples, b.samples)

    def test_amplitude_is_l2_norm(self, grid):
        f = random_band_limited_field(2, 12, 0.25, grid)
        assert np.sqrt(np.sum(f.samples**2) * grid.dx) == pytest.approx(0.25, rel=1e-12)

    def test_grid_independent(self, grid):
        coarse = random_band_limited_field(5, 16, 1.0, grid)
        fine = random_band_limited_field(5, 16, 1.0, grid.refined())
        np.testing.assert_allclose(fine.samples[::2], coarse.samples, atol=1e-13)

    def test_band_limit(self, grid):
        F = forward_transform(random_band_limited_field(9, 10, 1.0, grid, mean_zero=True))
        k = grid.wavenumbers
        assert np.max(np.abs(F.coefficients[np.abs(k) > 10])) < 1e-15
        assert abs(F.coefficient(0)) < 1e-15

    @pytest.mark.parametrize("cutoff", [-1, 128])
    def test_cutoff_range(self, grid, cutoff):
        with pytest.raises(ValueError):
            random_band_limited_field(0, cutoff, 1.0, grid)


def test_dealiased_product_exact_for_low_modes(grid):
    prod = dealiased_product(mode(grid, 3), mode(grid, 5))
    exact = 0.5 * (mode(grid, 2).samples + mode(grid, 8).samples)
    np.testing.assert_allclose(prod.samples, exact, atol=1e-14)
