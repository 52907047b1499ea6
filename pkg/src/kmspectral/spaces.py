"""Norms on the grid: L^p, homogeneous Sobolev, and the time-weighted X^s norm.

``X^s`` is normed by

    sup_t ||u(t)||_{H^s}  +  sup_{t > 0} t^alpha ||u(t)||_{L^4},   alpha = 1/2 - s/4,

with both suprema taken over the stored time slices.  The ``t = 0`` slice
is left out of the weighted supremum.
"""

from dataclasses import dataclass, field

import numpy as np

from .exceptions import EmptyTrajectoryError, GridMismatchError
from .spectral import GridSpec, RealField, riesz_symbol, rfft_rows

SUPPORTED_P = (1, 2, 4, np.inf)


@dataclass(frozen=True)
class SobolevIndex:
    """Sobolev exponent ``s`` in ``[0, 2)`` and its weight ``alpha = 1/2 - s/4``."""

    s: float
    alpha: float = field(init=False)

    def __post_init__(self):
        s = float(self.s)
        if not 0.0 <= s < 2.0:
            raise ValueError(f"Sobolev exponent must lie in [0, 2), got {s}")
        object.__setattr__(self, "s", s)
        object.__setattr__(self, "alpha", 0.5 - s / 4.0)

    @property
    def proof_safe(self):
        """Whether ``s`` lies in the subrange ``[0, 1/2]`` covered by the linear-estimate argument."""
        return self.s <= 0.5


def as_index(idx):
    return idx if isinstance(idx, SobolevIndex) else SobolevIndex(idx)


@dataclass(frozen=True)
class XsNormReport:
    sobolev_sup: float
    weighted_l4_sup: float

    @property
    def total(self):
        return self.sobolev_sup + self.weighted_l4_sup


@dataclass(frozen=True)
class FieldHistory:
    """One scalar field sampled on a uniform time grid, shape ``(n_slices, n)``."""

    grid: GridSpec
    times: np.ndarray
    samples: np.ndarray = field(repr=False)

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        samples = np.asarray(self.samples, dtype=float)
        if samples.ndim != 2 or samples.shape != (times.size, self.grid.n_points):
            raise ValueError(
                f"samples shape {samples.shape} does not match "
                f"({times.size}, {self.grid.n_points})"
            )
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "samples", samples)

    def __len__(self):
        return self.times.size

    def slice(self, i):
        return RealField(self.grid, self.samples[i])

    def truncated(self, n_slices):
        """History restricted to the first ``n_slices`` time points."""
        return FieldHistory(self.grid, self.times[:n_slices], self.samples[:n_slices])

    def __sub__(self, other):
        if other.grid != self.grid or other.times.shape != self.times.shape:
            raise GridMismatchError("histories are not on the same space-time grid")
        return FieldHistory(self.grid, self.times, self.samples - other.samples)

    def __add__(self, other):
        if other.grid != self.grid or other.times.shape != self.times.shape:
            raise GridMismatchError("histories are not on the same space-time grid")
        return FieldHistory(self.grid, self.times, self.samples + other.samples)

    def __mul__(self, scalar):
        return FieldHistory(self.grid, self.times, self.samples * float(scalar))

    __rmul__ = __mul__


def lp_norm_rows(samples, grid, p):
    """L^p norm of every row of ``samples`` with the ``dx`` quadrature weight."""
    a = np.abs(np.asarray(samples, dtype=float))
    if p == np.inf:
        return np.max(a, axis=-1)
    if p == 1:
        return np.sum(a, axis=-1) * grid.dx
    if p == 2:
        return np.sqrt(np.sum(a * a, axis=-1) * grid.dx)
    if p == 4:
        a2 = a * a
        return np.sqrt(np.sqrt(np.sum(a2 * a2, axis=-1) * grid.dx))
    raise ValueError(f"p must be one of 1, 2, 4, inf; got {p!r}")


def lp_norm(f, p):
    return float(lp_norm_rows(f.samples, f.grid, p))


def sobolev_norm_rows(samples, grid, s):
    """Homogeneous H^s norm of every row, computed on the Fourier side."""
    coeffs = rfft_rows(samples)
    weight = grid.rweights * riesz_symbol(grid.rxi, 2.0 * s) if s else grid.rweights
    energy = np.sum(weight * (coeffs.real ** 2 + coeffs.imag ** 2), axis=-1)
    return np.sqrt(grid.length * energy)


def sobolev_norm(f, idx):
    """``||D^s f||_{L^2}``; for ``s = 0`` this is the plain L2 norm."""
    idx = as_index(idx)
    return float(sobolev_norm_rows(f.samples, f.grid, idx.s))


def weighted_l4_profile(history, idx):
    """``t^alpha ||u(t)||_{L^4}`` per slice, with the ``t = 0`` slice set to 0."""
    idx = as_index(idx)
    t = history.times
    weights = np.where(t > 0, np.abs(t) ** idx.alpha, 0.0)
    return weights * lp_norm_rows(history.samples, history.grid, 4)


def xs_norm(history, idx):
    """Decomposed X^s norm of a single-field history."""
    idx = as_index(idx)
    if len(history) == 0:
        raise EmptyTrajectoryError("X^s norm of an empty trajectory")
    sob = sobolev_norm_rows(history.samples, history.grid, idx.s)
    wl4 = weighted_l4_profile(history, idx)
    return XsNormReport(float(np.max(sob)), float(np.max(wl4)))


def pair_norm(report_u, report_v):
    """Norm on X^s x X^s: the sum of both totals."""
    return report_u.total + report_v.total
