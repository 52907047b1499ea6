"""Seeded random test data: band-limited fields, Gaussian bumps, space-time histories.

Sample ``i`` of an ensemble with seed ``seed`` always comes from
``numpy.random.default_rng((seed, i))``, so serial and parallel evaluation
see identical data.  Band-limited members only use ``|k| <= 32`` and bumps
have width at least 2, which keeps every member (and pairwise products)
resolved on grids with ``n_points >= 512`` at the default half-length.
"""

import numpy as np

from .dynamics import free_flow
from .spaces import FieldHistory, as_index, xs_norm
from .spectral import RealField, gaussian_bump, random_band_limited_field

CUTOFFS = (4, 8, 16, 32)
BUMP_WIDTHS = (2.0, 6.0)
PROFILES = ("constant", "power", "power2", "heat", "cosine")


def sample_rng(seed, index):
    return np.random.default_rng((int(seed), int(index)))


def random_field(rng, grid, mean_zero=True, max_cutoff=32):
    """Band-limited Gaussian field (2/3 of draws) or Gaussian bump (1/3)."""
    if rng.uniform() < 2.0 / 3.0:
        cutoffs = [c for c in CUTOFFS if c <= max_cutoff]
        cutoff = cutoffs[rng.integers(len(cutoffs))]
        sub_seed = int(rng.integers(2**63))
        return random_band_limited_field(sub_seed, cutoff, 1.0, grid, mean_zero=mean_zero)
    L = grid.half_length
    center = rng.uniform(-L / 4, L / 4)
    width = rng.uniform(*BUMP_WIDTHS)
    bump = gaussian_bump(grid, center, width, 1.0)
    if mean_zero:
        bump = bump - bump.mean()
    return bump


def ensemble_field(seed, index, grid, mean_zero=True):
    return random_field(sample_rng(seed, index), grid, mean_zero=mean_zero)


def _profile(rng, kind, times, idx, field_):
    T = times[-1]
    if kind == "constant":
        return np.outer(np.ones_like(times), field_.samples)
    if kind in ("power", "power2"):
        tau = T * rng.uniform(0.1, 1.0)
        power = idx.alpha if kind == "power" else 2.0 * idx.alpha
        return np.outer((tau / (times + tau)) ** power, field_.samples)
    if kind == "cosine":
        return np.outer(np.cos(np.pi * rng.uniform(0.0, 1.0) * times / T), field_.samples)
    if kind == "heat":
        return free_flow(field_, times).samples
    raise ValueError(f"unknown profile {kind!r}")


def random_history(rng, grid, times, idx, profiles=PROFILES, normalize=True):
    """Random field times a temporal profile.

    The ``power`` profiles decay like ``(tau / (t + tau))^alpha`` or
    ``^(2 alpha)`` with ``tau >= T/10``, which stresses the weighted L4 part
    of the norm while staying resolved by the time grid.
    """
    idx = as_index(idx)
    times = np.asarray(times, dtype=float)
    field_ = random_field(rng, grid)
    kind = profiles[rng.integers(len(profiles))]
    hist = FieldHistory(grid, times, _profile(rng, kind, times, idx, field_))
    if normalize:
        hist = hist * (1.0 / xs_norm(hist, idx).total)
    return hist


def narrow_unit_mass_bump(grid, width):
    """Gaussian bump of unit integral centred at the origin."""
    bump = gaussian_bump(grid, 0.0, width, 1.0)
    return RealField(grid, bump.samples / (np.sum(bump.samples) * grid.dx))
