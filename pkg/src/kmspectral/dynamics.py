"""The diffusive Kermack-McKendrick system and its Duhamel operator.

Nondimensional form::

    u_t = u_xx - u v
    v_t = v_xx + u v + sigma * mu * v

with ``sigma = +1`` for ``MuSign.PAPER`` and ``sigma = -1`` for
``MuSign.EPIDEMIOLOGICAL`` (infected individuals recover at rate ``mu``).
The mild form integrates the forcing against the heat semigroup; the time
integral is a composite trapezoid rule over the stored slices.
"""

import enum
from dataclasses import dataclass, field

import numpy as np

from .exceptions import GridMismatchError, MissingParameterError
from .spaces import FieldHistory, SobolevIndex, as_index, pair_norm, xs_norm
from .spectral import (
    GridSpec,
    RealField,
    dealiased_product_rows,
    heat_symbol,
    irfft_rows,
    rfft_rows,
)

_UNIFORM_RTOL = 1e-9


class MuSign(str, enum.Enum):
    PAPER = "paper"
    EPIDEMIOLOGICAL = "epidemiological"

    @property
    def sigma(self):
        return 1.0 if self is MuSign.PAPER else -1.0


@dataclass(frozen=True)
class KmParams:
    """Model constants.

    ``mu`` is the nondimensional recovery coefficient; ``beta``, ``d_s`` and
    ``d_i`` are the optional dimensional transmission and diffusion rates.
    """

    mu: float = 0.0
    mu_sign: MuSign = MuSign.PAPER
    beta: float | None = None
    d_s: float | None = None
    d_i: float | None = None

    def __post_init__(self):
        if not (np.isfinite(self.mu) and self.mu >= 0):
            raise ValueError(f"mu must be a nonnegative real, got {self.mu!r}")
        object.__setattr__(self, "mu", float(self.mu))
        object.__setattr__(self, "mu_sign", MuSign(self.mu_sign))
        for name in ("beta", "d_s", "d_i"):
            value = getattr(self, name)
            if value is not None:
                if not (np.isfinite(value) and value > 0):
                    raise ValueError(f"{name} must be positive, got {value!r}")
                object.__setattr__(self, name, float(value))

    @property
    def sigma(self):
        return self.mu_sign.sigma

    @property
    def has_dimensions(self):
        return None not in (self.beta, self.d_s, self.d_i)


@dataclass(frozen=True)
class KmState:
    u: RealField
    v: RealField

    def __post_init__(self):
        if self.u.grid != self.v.grid:
            raise GridMismatchError("u and v must share a grid")

    @property
    def grid(self):
        return self.u.grid


def uniform_times(T, n_t):
    if n_t < 2:
        raise ValueError(f"need at least two time steps, got n_t={n_t}")
    if not T > 0:
        raise ValueError(f"horizon must be positive, got T={T}")
    return np.linspace(0.0, T, n_t + 1)


def _check_times(times):
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or times.size < 3:
        raise ValueError("a trajectory needs at least 3 time slices (N_t >= 2)")
    if times[0] != 0.0:
        raise ValueError("time grid must start at t = 0")
    steps = np.diff(times)
    if np.any(steps <= 0):
        raise ValueError("time grid must be strictly increasing")
    dt = (times[-1] - times[0]) / (times.size - 1)
    if np.max(np.abs(steps - dt)) > _UNIFORM_RTOL * times[-1]:
        raise ValueError("time grid must be uniform")
    return times


@dataclass(frozen=True)
class Trajectory:
    """The pair ``(u, v)`` on a uniform time grid ``0 = t_0 < ... < t_N = T``."""

    grid: GridSpec
    times: np.ndarray
    u_samples: np.ndarray = field(repr=False)
    v_samples: np.ndarray = field(repr=False)
    params: KmParams = KmParams()
    idx: SobolevIndex = SobolevIndex(0.0)

    def __post_init__(self):
        times = _check_times(self.times)
        shape = (times.size, self.grid.n_points)
        u = np.asarray(self.u_samples, dtype=float)
        v = np.asarray(self.v_samples, dtype=float)
        if u.shape != shape or v.shape != shape:
            raise ValueError(f"u/v samples must have shape {shape}")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "u_samples", u)
        object.__setattr__(self, "v_samples", v)
        object.__setattr__(self, "idx", as_index(self.idx))

    @classmethod
    def zeros(cls, grid, times, params=KmParams(), idx=SobolevIndex(0.0)):
        times = np.asarray(times, dtype=float)
        z = np.zeros((times.size, grid.n_points))
        return cls(grid, times, z, z.copy(), params, idx)

    @classmethod
    def from_histories(cls, u, v, params=KmParams(), idx=SobolevIndex(0.0)):
        if u.grid != v.grid or not np.array_equal(u.times, v.times):
            raise GridMismatchError("u and v histories are on different space-time grids")
        return cls(u.grid, u.times, u.samples, v.samples, params, idx)

    @property
    def n_t(self):
        return self.times.size - 1

    @property
    def horizon(self):
        return float(self.times[-1])

    @property
    def dt(self):
        return self.horizon / self.n_t

    @property
    def u(self):
        return FieldHistory(self.grid, self.times, self.u_samples)

    @property
    def v(self):
        return FieldHistory(self.grid, self.times, self.v_samples)

    def state(self, i):
        return KmState(RealField(self.grid, self.u_samples[i]),
                       RealField(self.grid, self.v_samples[i]))

    def with_samples(self, u_samples, v_samples):
        return Trajectory(self.grid, self.times, u_samples, v_samples, self.params, self.idx)

    def __sub__(self, other):
        _check_compatible(self, other)
        return self.with_samples(self.u_samples - other.u_samples,
                                 self.v_samples - other.v_samples)

    def norm(self, idx=None):
        """X^s x X^s norm of the pair."""
        idx = self.idx if idx is None else as_index(idx)
        return pair_norm(xs_norm(self.u, idx), xs_norm(self.v, idx))


def _check_compatible(a, b):
    if a.grid != b.grid:
        raise GridMismatchError("trajectories live on different spatial grids")
    if a.times.shape != b.times.shape or not np.allclose(a.times, b.times, rtol=0, atol=1e-14):
        raise GridMismatchError("trajectories live on different time grids")


# --- nondimensionalization --------------------------------------------------

def scales(params):
    """Coordinate factors ``(x_scale_u, x_scale_v, t_scale)``.

    The nondimensional fields are ``u(x, t) = S(x * x_scale_u, t * t_scale)``
    and ``v(x, t) = I(x * x_scale_v, t * t_scale)``.
    """
    if not params.has_dimensions:
        raise MissingParameterError("beta, d_s and d_i are required for the rescaling")
    return (np.sqrt(params.d_s / params.beta),
            np.sqrt(params.d_i / params.beta),
            1.0 / params.beta)


def _mu_factor(params, relabel):
    if relabel == "product":
        return params.beta
    if relabel == "quotient":
        return 1.0 / params.beta
    raise ValueError(f"relabel must be 'product' or 'quotient', got {relabel!r}")


def nondimensionalize(S0, I0, params, relabel="product"):
    """Map dimensional initial data to ``(phi, psi, mu_eff)``.

    The caller samples ``S0`` and ``I0`` at the rescaled coordinates, so the
    field values carry over unchanged; only the recovery coefficient moves.
    With ``relabel="product"`` it becomes ``mu * beta``.  Substituting
    ``t -> t / beta`` directly into the infected equation gives ``mu / beta``
    instead, available as ``relabel="quotient"``.
    """
    if S0.grid != I0.grid:
        raise GridMismatchError("S0 and I0 must share a grid")
    scales(params)
    mu_eff = params.mu * _mu_factor(params, relabel)
    return RealField(S0.grid, S0.samples), RealField(I0.grid, I0.samples), mu_eff


def dimensionalize(phi, psi, mu_eff, params, relabel="product"):
    """Inverse of :func:`nondimensionalize`: returns ``(S0, I0, mu)``."""
    if phi.grid != psi.grid:
        raise GridMismatchError("phi and psi must share a grid")
    scales(params)
    mu = mu_eff / _mu_factor(params, relabel)
    return RealField(phi.grid, phi.samples), RealField(psi.grid, psi.samples), mu


# --- Duhamel operator -------------------------------------------------------

def duhamel_integral_rows(forcing, grid, times):
    """Trapezoid approximation of ``int_0^t S(t - t') F(t') dt'`` at every slice.

    ``forcing`` is a half-spectrum array of shape ``(n_slices, n/2 + 1)``.
    Since ``S(t_n - t_m) = S(dt)^(n - m)`` the composite trapezoid sum obeys

        I_n = S(dt) (I_{n-1} + dt/2 F_{n-1}) + dt/2 F_n,

    which is evaluated here slice by slice.
    """
    forcing = np.asarray(forcing)
    n_slices = forcing.shape[0]
    dt = (times[-1] - times[0]) / (n_slices - 1)
    damp = heat_symbol(grid.rxi, dt)
    half = 0.5 * dt
    out = np.zeros_like(forcing)
    for m in range(1, n_slices):
        out[m] = damp * (out[m - 1] + half * forcing[m - 1]) + half * forcing[m]
    return out


def free_flow_rows(f, times):
    """Half-spectra of ``S(t_m) f`` for every time in ``times``."""
    coeffs = rfft_rows(f.samples)
    return np.exp(-np.outer(times, f.grid.rxi ** 2)) * coeffs


def free_flow(f, times):
    """History of the free heat flow of ``f``; slice 0 is ``f`` itself."""
    times = np.asarray(times, dtype=float)
    samples = irfft_rows(free_flow_rows(f, times), f.grid.n_points)
    samples[times == 0] = f.samples
    return FieldHistory(f.grid, times, samples)


def duhamel_bilinear(f, g):
    """History of ``int_0^t S(t - t') (f g)(t') dt'`` with a dealiased product."""
    if f.grid != g.grid or not np.array_equal(f.times, g.times):
        raise GridMismatchError("histories are on different space-time grids")
    prod = dealiased_product_rows(f.samples, g.samples, f.grid)
    integral = duhamel_integral_rows(prod, f.grid, f.times)
    return FieldHistory(f.grid, f.times, irfft_rows(integral, f.grid.n_points))


def duhamel_linear(f):
    """History of ``int_0^t S(t - t') f(t') dt'``."""
    integral = duhamel_integral_rows(rfft_rows(f.samples), f.grid, f.times)
    return FieldHistory(f.grid, f.times, irfft_rows(integral, f.grid.n_points))


def duhamel_apply(traj, phi, psi):
    """One application of the mild-solution map ``(u, v) -> (T1, T2)``.

    ``T1 = S(t) phi - int S(t - t') (u v)`` and
    ``T2 = S(t) psi + int S(t - t') (u v + sigma mu v)``; the slice at
    ``t = 0`` is exactly ``(phi, psi)``.
    """
    grid = traj.grid
    if phi.grid != grid or psi.grid != grid:
        raise GridMismatchError("initial data are not on the trajectory's grid")
    times = traj.times
    n = grid.n_points
    prod = dealiased_product_rows(traj.u_samples, traj.v_samples, grid)
    mu = traj.params.mu
    forcing_v = prod
    if mu:
        forcing_v = prod + traj.params.sigma * mu * rfft_rows(traj.v_samples)
    u_hat = free_flow_rows(phi, times) - duhamel_integral_rows(prod, grid, times)
    v_hat = free_flow_rows(psi, times) + duhamel_integral_rows(forcing_v, grid, times)
    u = irfft_rows(u_hat, n)
    v = irfft_rows(v_hat, n)
    u[0] = phi.samples
    v[0] = psi.samples
    return traj.with_samples(u, v)


def total_mass(traj):
    """``int (u + v) dx`` and ``int v dx`` per slice."""
    dx = traj.grid.dx
    v_mass = np.sum(traj.v_samples, axis=1) * dx
    return np.sum(traj.u_samples, axis=1) * dx + v_mass, v_mass


def mass_balance_residual(traj):
    """Central-difference defect of ``d/dt int (u+v) = sigma mu int v`` at interior slices."""
    if traj.n_t < 2:
        raise ValueError("mass balance needs at least three slices")
    mass, v_mass = total_mass(traj)
    rate = (mass[2:] - mass[:-2]) / (2.0 * traj.dt)
    return rate - traj.params.sigma * traj.params.mu * v_mass[1:-1]
