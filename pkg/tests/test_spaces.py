import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kmspectral.exceptions import EmptyTrajectoryError, GridMismatchError
from kmspectral.spaces import (
    FieldHistory,
    SobolevIndex,
    lp_norm,
    pair_norm,
    sobolev_norm,
    weighted_l4_profile,
    xs_norm,
)
from kmspectral.spectral import GridSpec, RealField, constant_field, random_band_limited_field


def cosine(grid, k):
    return RealField.from_function(grid, lambda x: np.cos(np.pi * k * x / grid.half_length))


class TestSobolevIndex:
    @pytest.mark.parametrize("s,alpha", [(0, 0.5), (1, 0.25), (1.9, 0.025)])
    def test_alpha(self, s, alpha):
        assert SobolevIndex(s).alpha == pytest.approx(alpha)

    @pytest.mark.parametrize("s", [-0.1, 2.0, 3.0])
    def test_range(self, s):
        with pytest.raises(ValueError):
            SobolevIndex(s)

    def test_proof_safe(self):
        assert SobolevIndex(0.5).proof_safe
        assert not SobolevIndex(0.51).proof_safe


class TestLpNorms:
    # Closed forms over a full period of length 2L:
    # ||cos||_1 = 4L/pi, ||cos||_2 = sqrt(L), ||cos||_4 = (3L/4)^(1/4), ||cos||_inf = 1.
    # |cos| has kinks, so the p = 1 rectangle rule is only second-order accurate.
    @pytest.mark.parametrize("p,exact,rel", [
        (1, lambda L: 4 * L / np.pi, 1e-3),
        (2, lambda L: np.sqrt(L), 1e-12),
        (4, lambda L: (0.75 * L) ** 0.25, 1e-12),
        (np.inf, lambda L: 1.0, 1e-12),
    ])
    def test_cosine(self, grid, p, exact, rel):
        f = cosine(grid, 3)
        assert lp_norm(f, p) == pytest.approx(exact(grid.half_length), rel=rel)

    def test_unsupported_p(self, grid):
        with pytest.raises(ValueError):
            lp_norm(constant_field(grid, 1.0), 3)


class TestSobolevNorm:
    @pytest.mark.parametrize("s", [0.0, 0.5, 1.0, 1.9])
    def test_cosine_mode(self, grid, s):
        k = 5
        xi = np.pi * k / grid.half_length
        expected = xi**s * np.sqrt(grid.half_length)
        assert sobolev_norm(cosine(grid, k), s) == pytest.approx(expected, rel=1e-12)

    def test_constant_is_invisible_for_positive_s(self, grid):
        f = constant_field(grid, 2.0)
        assert sobolev_norm(f, 0.5) == 0.0
        assert sobolev_norm(f, 0) == pytest.approx(lp_norm(f, 2), rel=1e-14)

    def test_s_zero_matches_parseval(self, grid):
        f = random_band_limited_field(3, 32, 1.7, grid)
        assert sobolev_norm(f, 0) == pytest.approx(lp_norm(f, 2), rel=1e-13)

    def test_nyquist_weight(self):
        g = GridSpec(n_points=16, half_length=np.pi)
        f = RealField(g, np.cos(8 * (g.x + np.pi)))
        assert sobolev_norm(f, 0) == pytest.approx(np.sqrt(2 * np.pi), rel=1e-13)

    @settings(max_examples=20, deadline=None)
    @given(seed=st.integers(0, 10**6), s=st.floats(0, 1.99), c=st.floats(-5, 5))
    def test_homogeneous(self, seed, s, c):
        g = GridSpec(n_points=128)
        f = random_band_limited_field(seed, 30, 1.0, g)
        assert sobolev_norm(f * c, s) == pytest.approx(abs(c) * sobolev_norm(f, s), rel=1e-12)


class TestXsNorm:
    def test_constant_history(self, grid):
        f = cosine(grid, 2)
        times = np.linspace(0, 0.4, 5)
        hist = FieldHistory(grid, times, np.tile(f.samples, (5, 1)))
        idx = SobolevIndex(1.0)
        report = xs_norm(hist, idx)
        assert report.sobolev_sup == pytest.approx(sobolev_norm(f, 1.0), rel=1e-13)
        assert report.weighted_l4_sup == pytest.approx(0.4**0.25 * lp_norm(f, 4), rel=1e-13)
        assert report.total == report.sobolev_sup + report.weighted_l4_sup

    def test_zero_slice_excluded_from_weight(self, grid):
        times = np.array([0.0, 0.1, 0.2])
        samples = np.zeros((3, grid.n_points))
        samples[0] = 100.0
        assert np.all(weighted_l4_profile(FieldHistory(grid, times, samples), 0) == 0)

    def test_empty(self, grid):
        empty = FieldHistory(grid, np.zeros(0), np.zeros((0, grid.n_points)))
        with pytest.raises(EmptyTrajectoryError):
            xs_norm(empty, 0.0)

    def test_pair_norm_sums(self, grid):
        hist = FieldHistory(grid, [0.0, 0.5, 1.0], np.tile(cosine(grid, 1).samples, (3, 1)))
        r = xs_norm(hist, 0.0)
        assert pair_norm(r, r) == pytest.approx(2 * r.total)

    def test_triangle_inequality(self, grid, rng):
        times = np.linspace(0, 1, 6)
        a = FieldHistory(grid, times, rng.standard_normal((6, grid.n_points)))
        b = FieldHistory(grid, times, rng.standard_normal((6, grid.n_points)))
        assert xs_norm(a + b, 1.0).total <= xs_norm(a, 1.0).total + xs_norm(b, 1.0).total

    def test_history_shape_checked(self, grid):
        with pytest.raises(ValueError):
            FieldHistory(grid, [0.0, 1.0], np.zeros((3, grid.n_points)))

    def test_history_mismatch(self, grid):
        a = FieldHistory(grid, [0.0, 1.0], np.zeros((2, grid.n_points)))
        b = FieldHistory(grid.refined(), [0.0, 1.0], np.zeros((2, 2 * grid.n_points)))
        with pytest.raises(GridMismatchError):
            a - b
