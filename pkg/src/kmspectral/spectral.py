"""Discrete Fourier machinery on the periodic interval [-L, L).

The real line is replaced by a torus of half-length ``L`` sampled at ``n``
equispaced points ``x_j = -L + j*dx``.  A real field is represented by the
coefficients of its trigonometric interpolant

.. math:: f(x_j) = \\sum_{k=-n/2}^{n/2-1} c_k \\, e^{i \\xi_k x_j}, \\qquad \\xi_k = \\pi k / L,

so a pure mode ``cos(k pi x / L)`` has coefficients ``1/2`` at ``+-k`` and
Parseval reads ``(1/2L) sum |f_j|^2 dx = sum |c_k|^2``.  Coefficients of a
:class:`SpectralField` are stored in natural order ``k = -n/2, ..., n/2 - 1``.

Riesz derivatives ``|xi|^r`` and the heat semigroup ``exp(-t xi^2)`` are
diagonal in this basis.  Besides the single-field API there are batched
helpers (``*_rows``) acting on the last axis of a ``(n_slices, n)`` array;
those work with the unphased ``rfft`` layout, which is fine because every
multiplier used here is real and even in ``k``.
"""

from dataclasses import dataclass, field

import numpy as np

from .exceptions import GridMismatchError, NonRealFieldError

#: Default torus half-length and resolution.
DEFAULT_HALF_LENGTH = 32.0 * np.pi
DEFAULT_N_POINTS = 1024

_IMAG_TOL = 1e-12


def _readonly(arr):
    arr = np.array(arr, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class GridSpec:
    """Uniform periodic grid on ``[-half_length, half_length)``."""

    n_points: int = DEFAULT_N_POINTS
    half_length: float = DEFAULT_HALF_LENGTH

    def __post_init__(self):
        n = self.n_points
        if isinstance(n, bool) or int(n) != n:
            raise ValueError(f"n_points must be an integer, got {n!r}")
        n = int(n)
        if n < 8 or n & (n - 1):
            raise ValueError(f"n_points must be a power of two >= 8, got {n}")
        if not (np.isfinite(self.half_length) and self.half_length > 0):
            raise ValueError(f"half_length must be positive, got {self.half_length!r}")
        object.__setattr__(self, "n_points", n)
        object.__setattr__(self, "half_length", float(self.half_length))

    @property
    def length(self):
        return 2.0 * self.half_length

    @property
    def dx(self):
        return self.length / self.n_points

    @property
    def x(self):
        return -self.half_length + self.dx * np.arange(self.n_points)

    @property
    def wavenumbers(self):
        """Integer wavenumbers ``-n/2 .. n/2-1`` in natural order."""
        n = self.n_points
        return np.arange(-(n // 2), n // 2)

    @property
    def xi(self):
        """Angular frequencies ``pi k / L`` matching :attr:`wavenumbers`."""
        return np.pi * self.wavenumbers / self.half_length

    @property
    def rxi(self):
        """Nonnegative frequencies of the ``rfft`` layout (``k = 0 .. n/2``)."""
        return np.pi * np.arange(self.n_points // 2 + 1) / self.half_length

    @property
    def rweights(self):
        """Multiplicity of each ``rfft`` coefficient in the full spectrum."""
        w = np.full(self.n_points // 2 + 1, 2.0)
        w[0] = 1.0
        w[-1] = 1.0
        return w

    def refined(self, factor=2):
        return GridSpec(self.n_points * factor, self.half_length)


@dataclass(frozen=True)
class RealField:
    """Samples of a real function at the grid points."""

    grid: GridSpec
    samples: np.ndarray = field(repr=False)

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=float)
        if samples.shape != (self.grid.n_points,):
            raise ValueError(
                f"expected {self.grid.n_points} samples, got shape {samples.shape}"
            )
        if not np.all(np.isfinite(samples)):
            raise ValueError("field samples must be finite")
        object.__setattr__(self, "samples", _readonly(samples))

    @classmethod
    def from_function(cls, grid, func):
        return cls(grid, func(grid.x))

    @classmethod
    def zeros(cls, grid):
        return cls(grid, np.zeros(grid.n_points))

    def _check(self, other):
        if isinstance(other, RealField) and other.grid != self.grid:
            raise GridMismatchError("fields live on different grids")

    def __add__(self, other):
        if isinstance(other, RealField):
            self._check(other)
            return RealField(self.grid, self.samples + other.samples)
        return RealField(self.grid, self.samples + other)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, RealField):
            self._check(other)
            return RealField(self.grid, self.samples - other.samples)
        return RealField(self.grid, self.samples - other)

    def __mul__(self, scalar):
        return RealField(self.grid, self.samples * float(scalar))

    __rmul__ = __mul__

    def __neg__(self):
        return RealField(self.grid, -self.samples)

    def mean(self):
        return float(np.mean(self.samples))


@dataclass(frozen=True)
class SpectralField:
    """Fourier coefficients ``c_k`` for ``k = -n/2 .. n/2-1``."""

    grid: GridSpec
    coefficients: np.ndarray = field(repr=False)

    def __post_init__(self):
        coeffs = np.asarray(self.coefficients, dtype=complex)
        if coeffs.shape != (self.grid.n_points,):
            raise ValueError(
                f"expected {self.grid.n_points} coefficients, got shape {coeffs.shape}"
            )
        object.__setattr__(self, "coefficients", _readonly(coeffs))

    @property
    def wavenumbers(self):
        return self.grid.wavenumbers

    @property
    def xi(self):
        return self.grid.xi

    def coefficient(self, k):
        """Coefficient at integer wavenumber ``k``."""
        return self.coefficients[k + self.grid.n_points // 2]

    def hermitian_defect(self):
        """Largest ``|c_{-k} - conj(c_k)|``; the Nyquist entry must be real."""
        c = self.coefficients
        n = self.grid.n_points
        half = n // 2
        pos = c[half + 1:]
        neg = c[1:half][::-1]
        defect = np.max(np.abs(neg - np.conj(pos)), initial=0.0)
        return max(defect, abs(c[0].imag), abs(c[half].imag))


def _phase(grid):
    # (-1)^k relates the x_0 = -L origin to numpy's x_0 = 0 convention.
    return np.where(grid.wavenumbers % 2 == 0, 1.0, -1.0)


def forward_transform(f):
    """Coefficients of the trigonometric interpolant of ``f``."""
    grid = f.grid
    n = grid.n_points
    half = np.fft.rfft(f.samples) / n
    # Mirror the half spectrum so real input gives an exactly Hermitian result.
    raw = np.empty(n, dtype=complex)
    raw[n // 2:] = half[:n // 2]
    raw[1:n // 2] = np.conj(half[1:n // 2][::-1])
    raw[0] = half[n // 2].real
    return SpectralField(grid, raw * _phase(grid))


def inverse_transform(F):
    """Real samples of a Hermitian-symmetric spectrum.

    Raises
    ------
    NonRealFieldError
        If the synthesized field has an imaginary part larger than
        ``1e-12`` relative to its real part.
    """
    grid = F.grid
    unphased = F.coefficients * _phase(grid)
    values = np.fft.ifft(np.fft.ifftshift(unphased)) * grid.n_points
    scale = max(np.max(np.abs(values.real)), np.finfo(float).tiny)
    residual = np.max(np.abs(values.imag))
    if residual > _IMAG_TOL * scale:
        raise NonRealFieldError(
            f"imaginary residual {residual:.3e} exceeds {_IMAG_TOL:g} x {scale:.3e}"
        )
    return RealField(grid, values.real)


def riesz_symbol(xi, r):
    """``|xi|^r`` with the zero mode kept for ``r == 0`` and removed otherwise."""
    xi = np.abs(np.asarray(xi, dtype=float))
    if r == 0:
        return np.ones_like(xi)
    out = np.zeros_like(xi)
    nz = xi > 0
    out[nz] = xi[nz] ** r
    return out


def heat_symbol(xi, t):
    return np.exp(-t * np.asarray(xi, dtype=float) ** 2)


def riesz_derivative(F, r):
    """Apply the Riesz derivative ``D^r`` (multiplier ``|xi|^r``).

    ``r`` is restricted to ``[-1, 2]``.  The zero mode is annihilated for
    any ``r != 0``, so negative powers act on the mean-zero part only.
    """
    if not -1.0 <= r <= 2.0:
        raise ValueError(f"Riesz exponent must lie in [-1, 2], got {r}")
    return SpectralField(F.grid, F.coefficients * riesz_symbol(F.xi, r))


def heat_semigroup(F, t):
    """Free heat flow ``S(t)``: multiply by ``exp(-t xi^2)``."""
    if t < 0:
        raise ValueError(f"heat semigroup time must be nonnegative, got {t}")
    if t == 0:
        return F
    return SpectralField(F.grid, F.coefficients * heat_symbol(F.xi, t))


def heat_flow(f, t):
    """Physical-space convenience wrapper around :func:`heat_semigroup`."""
    return inverse_transform(heat_semigroup(forward_transform(f), t))


def random_band_limited_field(seed, cutoff, amplitude, grid, mean_zero=False):
    """Seeded random real field with spectral support ``|k| <= cutoff``.

    Coefficients for ``k = 0 .. cutoff`` are drawn in a fixed order from
    ``numpy.random.default_rng(seed)``, so the same seed yields the same
    trigonometric polynomial on every grid that resolves it.  The result is
    rescaled to have L2 norm ``amplitude``.
    """
    cutoff = int(cutoff)
    if not 0 <= cutoff < grid.n_points // 2:
        raise ValueError(f"cutoff must lie in [0, n_points/2), got {cutoff}")
    if amplitude <= 0:
        raise ValueError("amplitude must be positive")
    rng = np.random.default_rng(seed)
    c0 = rng.standard_normal()
    ck = (rng.standard_normal(cutoff) + 1j * rng.standard_normal(cutoff)) / np.sqrt(2.0)
    half = np.zeros(grid.n_points // 2 + 1, dtype=complex)
    half[0] = 0.0 if mean_zero else c0
    half[1:cutoff + 1] = ck
    norm = np.sqrt(grid.length * np.sum(grid.rweights * np.abs(half) ** 2))
    if norm == 0:
        raise ValueError("mean-zero field with cutoff 0 is identically zero")
    sign = np.where(np.arange(half.size) % 2 == 0, 1.0, -1.0)
    samples = np.fft.irfft(half * sign, n=grid.n_points) * grid.n_points
    return RealField(grid, samples * (amplitude / norm))


def gaussian_bump(grid, center=0.0, width=1.0, height=1.0):
    """``height * exp(-((x - center) / width)^2)`` sampled on the grid."""
    if width <= 0:
        raise ValueError("width must be positive")
    return RealField(grid, height * np.exp(-(((grid.x - center) / width) ** 2)))


def constant_field(grid, value):
    return RealField(grid, np.full(grid.n_points, float(value)))


# --- batched helpers on (n_slices, n) arrays -------------------------------

def rfft_rows(samples):
    """Unphased half-spectrum ``rfft(f) / n`` along the last axis."""
    samples = np.asarray(samples, dtype=float)
    return np.fft.rfft(samples, axis=-1) / samples.shape[-1]


def irfft_rows(coeffs, n_points):
    return np.fft.irfft(coeffs, n=n_points, axis=-1) * n_points


def dealias_mask(grid):
    """Two-thirds rule: keep ``|k| <= n // 3`` in the ``rfft`` layout."""
    return np.arange(grid.n_points // 2 + 1) <= grid.n_points // 3


def dealiased_product_rows(a, b, grid):
    """Half-spectrum of the pointwise product ``a * b`` with 2/3 truncation."""
    return rfft_rows(np.asarray(a) * np.asarray(b)) * dealias_mask(grid)


def dealiased_product(f, g):
    """Pointwise product of two fields, truncated by the 2/3 rule."""
    if f.grid != g.grid:
        raise GridMismatchError("fields live on different grids")
    coeffs = dealiased_product_rows(f.samples, g.samples, f.grid)
    return RealField(f.grid, irfft_rows(coeffs, f.grid.n_points))
