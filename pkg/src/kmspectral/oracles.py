"""Independent reference computations.

These deliberately avoid the Duhamel/trapezoid path: the ODE oracle is a
classical RK4 integrator, the PDE oracle is Strang splitting of exact heat
steps and pointwise RK4 reaction steps, and the quadrature is an adaptive
Gauss-Kronrod scheme whose nodes never touch the interval ends.
"""

import heapq
from dataclasses import dataclass, field

import numpy as np

from .dynamics import KmParams, MuSign, Trajectory
from .exceptions import QuadratureError, ReactionOverflowError
from .spaces import SobolevIndex
from .spectral import heat_symbol, irfft_rows, rfft_rows

OVERFLOW_GUARD = 1e6


@dataclass(frozen=True)
class OdeTrajectory:
    times: np.ndarray
    u: np.ndarray = field(repr=False)
    v: np.ndarray = field(repr=False)

    def __post_init__(self):
        if np.any(np.diff(self.times) <= 0):
            raise ValueError("times must be strictly increasing")

    def at(self, t):
        """Values at a stored time (nearest node)."""
        i = int(np.argmin(np.abs(self.times - t)))
        return self.u[i], self.v[i]


def _reaction(u, v, mu, sigma):
    uv = u * v
    return -uv, uv + sigma * mu * v


def _rk4_step(u, v, h, mu, sigma):
    k1u, k1v = _reaction(u, v, mu, sigma)
    k2u, k2v = _reaction(u + 0.5 * h * k1u, v + 0.5 * h * k1v, mu, sigma)
    k3u, k3v = _reaction(u + 0.5 * h * k2u, v + 0.5 * h * k2v, mu, sigma)
    k4u, k4v = _reaction(u + h * k3u, v + h * k3v, mu, sigma)
    return (u + h / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u),
            v + h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v))


def _n_steps(T, dt):
    if not (T > 0 and dt > 0):
        raise ValueError("T and dt must be positive")
    if dt > T / 10 * (1 + 1e-12):
        raise ValueError(f"dt={dt} exceeds T/10={T / 10}")
    n = int(round(T / dt))
    if abs(n * dt - T) > 1e-9 * T:
        raise ValueError(f"dt={dt} does not divide T={T}")
    return n


def rk4_sir(u0, v0, mu, mu_sign, T, dt):
    """Spatially homogeneous reduction ``u' = -uv, v' = uv + sigma mu v`` by RK4."""
    sigma = MuSign(mu_sign).sigma
    n = _n_steps(T, dt)
    h = T / n
    u = np.empty(n + 1)
    v = np.empty(n + 1)
    u[0], v[0] = u0, v0
    for i in range(n):
        u[i + 1], v[i + 1] = _rk4_step(u[i], v[i], h, mu, sigma)
    return OdeTrajectory(np.linspace(0.0, T, n + 1), u, v)


def splitting_solve(phi, psi, params, T, dt, idx=SobolevIndex(0.0)):
    """Strang splitting: half heat step, RK4 reaction step, half heat step.

    Returns the trajectory at every step ``0, dt, ..., T``.
    """
    grid = phi.grid
    n = _n_steps(T, dt)
    h = T / n
    half_heat = heat_symbol(grid.rxi, 0.5 * h)
    npts = grid.n_points
    sigma = params.sigma
    u_out = np.empty((n + 1, npts))
    v_out = np.empty((n + 1, npts))
    u = np.array(phi.samples, dtype=float)
    v = np.array(psi.samples, dtype=float)
    u_out[0], v_out[0] = u, v
    for i in range(n):
        u = irfft_rows(half_heat * rfft_rows(u), npts)
        v = irfft_rows(half_heat * rfft_rows(v), npts)
        u, v = _rk4_step(u, v, h, params.mu, sigma)
        if max(np.max(np.abs(u)), np.max(np.abs(v))) > OVERFLOW_GUARD:
            raise ReactionOverflowError(f"field magnitude above {OVERFLOW_GUARD:g} at step {i + 1}")
        u = irfft_rows(half_heat * rfft_rows(u), npts)
        v = irfft_rows(half_heat * rfft_rows(v), npts)
        u_out[i + 1], v_out[i + 1] = u, v
    return Trajectory(grid, np.linspace(0.0, T, n + 1), u_out, v_out, params, idx)


# --- adaptive quadrature ----------------------------------------------------

# 15-point Kronrod extension of the 7-point Gauss rule on [-1, 1].
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])
_NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
_KWEIGHTS = np.concatenate([_WGK[:-1], _WGK[::-1]])
_GWEIGHTS = np.zeros(15)
_GWEIGHTS[1:14:2] = np.concatenate([_WG[:-1], _WG[::-1]])


def _gk15(f, weight, lo_a, hi_b, width):
    """Kronrod value and error estimate on one subinterval.

    The subinterval is described by its distance ``lo_a`` from the left end
    of the whole range, the distance ``hi_b`` of its right end from the
    right end of the range, and its ``width``; node distances to both ends
    are formed by additions only, so they stay accurate near the endpoints.
    """
    s = 0.5 * (_NODES + 1.0)
    dist_a = lo_a + width * s
    dist_b = hi_b + width * (1.0 - s)
    vals = f(dist_a, dist_b)
    if weight is not None:
        vals = vals * dist_a ** weight[0] * dist_b ** weight[1]
    half = 0.5 * width
    kron = half * np.dot(_KWEIGHTS, vals)
    gauss = half * np.dot(_GWEIGHTS, vals)
    return kron, abs(kron - gauss)


def adaptive_quadrature(f, a, b, tol, *, weight=None, max_intervals=5000):
    """Integrate ``f`` over ``(a, b)`` to absolute accuracy ``tol``.

    Globally adaptive bisection with a 7/15-point Gauss-Kronrod pair.  The
    nodes are interior, so integrable endpoint singularities are allowed.

    ``f`` receives an array of abscissae.  For a singular factor at either
    end pass ``weight=(p, q)``: the integrand becomes
    ``f(y) * (y - a)**p * (b - y)**q`` with both distances computed without
    cancellation.

    Raises
    ------
    QuadratureError
        If the error estimate is still above ``tol`` after
        ``max_intervals`` subintervals.
    """
    if not a < b:
        raise ValueError("need a < b")
    if tol <= 0:
        raise ValueError("tol must be positive")
    a = float(a)
    b = float(b)

    def g(dist_a, dist_b):
        # Pick whichever end is nearer to rebuild y, which keeps y accurate there.
        y = np.where(dist_a <= dist_b, a + dist_a, b - dist_b)
        return np.asarray(f(y), dtype=float) * np.ones_like(y)

    total_width = b - a
    value, err = _gk15(g, weight, 0.0, 0.0, total_width)
    heap = [(-err, 0.0, 0.0, total_width, value)]
    total_err = err
    total_val = value
    count = 1
    while total_err > tol:
        if count >= max_intervals:
            raise QuadratureError(
                f"error estimate {total_err:.3e} above tol {tol:.3e} "
                f"after {count} subintervals"
            )
        neg_err, lo_a, hi_b, width, val = heapq.heappop(heap)
        half = 0.5 * width
        left = _gk15(g, weight, lo_a, hi_b + half, half)
        right = _gk15(g, weight, lo_a + half, hi_b, half)
        total_val += left[0] + right[0] - val
        total_err += left[1] + right[1] + neg_err
        heapq.heappush(heap, (-left[1], lo_a, hi_b + half, half, left[0]))
        heapq.heappush(heap, (-right[1], lo_a + half, hi_b, half, right[0]))
        count += 1
        if not np.isfinite(total_val):
            raise QuadratureError("non-finite integrand value")
    # Re-sum to shed the drift of the running updates.
    return float(sum(item[4] for item in heap))
