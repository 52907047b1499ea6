"""Picard iteration of the Duhamel map, smallness gating, and contraction probes."""

import math
from dataclasses import dataclass, field

import numpy as np

from .dynamics import Trajectory, duhamel_apply, uniform_times
from .exceptions import ConvergenceError, DivergenceError, KmError
from .ensembles import random_field, random_history, sample_rng
from .spaces import as_index, sobolev_norm

DEFAULT_MAX_ITER = 50
DEFAULT_TOL = 1e-10


@dataclass(frozen=True)
class WellPosednessGate:
    """Ball radius and data threshold derived from the linear and bilinear constants.

    The constants are empirical maxima, i.e. lower bounds on the true
    constants, so an admitted configuration is an *empirical gate* result
    and not a proof of well-posedness.
    """

    c_ell_hat: float
    c_b_hat: float
    mu: float = 0.0

    def __post_init__(self):
        if not (self.c_ell_hat > 0 and self.c_b_hat > 0):
            raise ValueError("gate constants must be positive")
        if self.mu < 0:
            raise ValueError("mu must be nonnegative")

    @property
    def rho(self):
        return 1.0 / (3.0 * self.c_b_hat)

    @property
    def data_threshold(self):
        return 1.0 / (18.0 * self.c_ell_hat * self.c_b_hat)

    @property
    def horizon_bound(self):
        return math.inf if self.mu == 0 else 1.0 / (6.0 * self.mu)

    def contraction_factor(self, T):
        """Theoretical factor ``2 rho C_b + 2 mu T`` of the difference estimate."""
        return 2.0 * self.rho * self.c_b_hat + 2.0 * self.mu * T

    def lipschitz_bound(self, contraction):
        return self.c_ell_hat / (1.0 - contraction)


@dataclass(frozen=True)
class SmallnessDecision:
    data_norm: float
    data_threshold: float
    horizon: float
    horizon_bound: float
    admitted: bool
    label: str = "empirical gate"

    def reason(self):
        if self.admitted:
            return "admitted"
        parts = []
        if not self.data_norm <= self.data_threshold:
            parts.append(f"data norm {self.data_norm:.6g} > threshold {self.data_threshold:.6g}")
        if not self.horizon < self.horizon_bound:
            parts.append(f"T = {self.horizon:.6g} >= 1/(6 mu) = {self.horizon_bound:.6g}")
        return "; ".join(parts)


def smallness_check(phi, psi, idx, gate, horizon):
    idx = as_index(idx)
    data_norm = sobolev_norm(phi, idx) + sobolev_norm(psi, idx)
    admitted = data_norm <= gate.data_threshold and horizon < gate.horizon_bound
    return SmallnessDecision(data_norm, gate.data_threshold, horizon,
                             gate.horizon_bound, bool(admitted))


@dataclass
class PicardDiagnostics:
    iterations: int = 0
    successive_diffs: list = field(default_factory=list)
    converged: bool = False
    tolerance: float = DEFAULT_TOL

    @property
    def ratios(self):
        d = np.asarray(self.successive_diffs, dtype=float)
        if d.size < 2:
            return np.zeros(0)
        prev, nxt = d[:-1], d[1:]
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(prev > 0, nxt / prev, 0.0)

    @property
    def rate_estimate(self):
        """Geometric mean of consecutive difference ratios (0 if undefined)."""
        r = self.ratios
        if r.size == 0 or np.any(r == 0):
            return 0.0
        return float(np.exp(np.mean(np.log(r))))

    def as_dict(self):
        return {
            "iterations": self.iterations,
            "successive_diffs": [float(d) for d in self.successive_diffs],
            "rate_estimate": self.rate_estimate,
            "converged": self.converged,
        }


def picard_solve(phi, psi, params, idx, T, n_t, tol=DEFAULT_TOL,
                 max_iter=DEFAULT_MAX_ITER, gate=None):
    """Iterate the Duhamel map from the zero trajectory to its fixed point.

    Convergence is measured in the X^s x X^s norm of successive iterates.
    With a ``gate`` the tolerance is relative to the ball radius ``rho`` and
    iterates larger than ``10 rho`` abort with :class:`DivergenceError`.

    Returns
    -------
    (Trajectory, PicardDiagnostics)
    """
    idx = as_index(idx)
    if tol <= 0:
        raise ValueError("tol must be positive")
    grid = phi.grid
    times = uniform_times(T, n_t)
    current = Trajectory.zeros(grid, times, params, idx)
    abs_tol = tol * gate.rho if gate is not None else tol
    diag = PicardDiagnostics(tolerance=abs_tol)
    for _ in range(max_iter):
        nxt = duhamel_apply(current, phi, psi)
        diff = (nxt - current).norm(idx)
        diag.iterations += 1
        diag.successive_diffs.append(diff)
        if not np.isfinite(diff):
            raise DivergenceError("non-finite iterate", diag)
        if gate is not None:
            size = nxt.norm(idx)
            if size > 10.0 * gate.rho:
                raise DivergenceError(
                    f"iterate norm {size:.6g} exceeds 10 rho = {10 * gate.rho:.6g}", diag)
        current = nxt
        if diff < abs_tol:
            diag.converged = True
            return current, diag
    raise ConvergenceError(
        f"no convergence after {max_iter} iterations "
        f"(last difference {diag.successive_diffs[-1]:.3e})", diag)


# --- probes -----------------------------------------------------------------

def random_ball_trajectory(rng, grid, times, params, idx, radius):
    """Random trajectory with X^s x X^s norm drawn uniformly in ``(0, radius]``."""
    u = random_history(rng, grid, times, idx)
    v = random_history(rng, grid, times, idx)
    split = rng.uniform(0.2, 0.8)
    target = radius * (1.0 - rng.uniform())
    traj = Trajectory.from_histories(u * split, v * (1.0 - split), params, idx)
    scale = target / traj.norm()
    return traj.with_samples(traj.u_samples * scale, traj.v_samples * scale)


def contraction_ratio(w1, w2, phi, psi):
    """``||T(w1) - T(w2)|| / ||w1 - w2||`` in X^s x X^s."""
    denom = (w1 - w2).norm()
    if denom == 0:
        raise ValueError("degenerate pair (w1 == w2)")
    return (duhamel_apply(w1, phi, psi) - duhamel_apply(w2, phi, psi)).norm() / denom


@dataclass(frozen=True)
class ContractionProbeResult:
    ratios: np.ndarray
    theoretical_factor: float
    decision: SmallnessDecision

    @property
    def max_ratio(self):
        return float(np.max(self.ratios))


def contraction_probe(phi, psi, params, idx, T, n_t, gate, seed, n_pairs):
    """Measure the one-step contraction of the Duhamel map on random pairs in the ball.

    Pair ``i`` is generated from ``default_rng((seed, i))``; degenerate pairs
    are resampled.
    """
    idx = as_index(idx)
    decision = smallness_check(phi, psi, idx, gate, T)
    if not decision.admitted:
        raise KmError(f"configuration rejected by gate: {decision.reason()}")
    times = uniform_times(T, n_t)
    ratios = []
    for i in range(n_pairs):
        rng = np.random.default_rng((seed, i))
        while True:
            w1 = random_ball_trajectory(rng, phi.grid, times, params, idx, gate.rho)
            w2 = random_ball_trajectory(rng, phi.grid, times, params, idx, gate.rho)
            try:
                ratios.append(contraction_ratio(w1, w2, phi, psi))
                break
            except ValueError:
                continue
    return ContractionProbeResult(np.asarray(ratios), gate.contraction_factor(T), decision)


@dataclass(frozen=True)
class LipschitzProbeResult:
    ratios: np.ndarray
    bound: float
    contraction: float
    skipped: int

    @property
    def max_ratio(self):
        return float(np.max(self.ratios)) if self.ratios.size else 0.0

    @property
    def passed(self):
        return bool(np.all(self.ratios <= self.bound))


def lipschitz_probe(data_pairs, params, idx, T, n_t, gate, contraction, tol=DEFAULT_TOL):
    """Solution-to-data difference ratios for pairs of admitted data.

    ``data_pairs`` is a sequence of ``((phi1, psi1), (phi2, psi2))``;
    ``contraction`` is the measured contraction factor used in the bound
    ``C_ell / (1 - contraction)``.
    """
    idx = as_index(idx)
    ratios = []
    skipped = 0
    for (phi1, psi1), (phi2, psi2) in data_pairs:
        for phi, psi in ((phi1, psi1), (phi2, psi2)):
            decision = smallness_check(phi, psi, idx, gate, T)
            if not decision.admitted:
                raise KmError(f"data rejected by gate: {decision.reason()}")
        data_diff = sobolev_norm(phi1 - phi2, idx) + sobolev_norm(psi1 - psi2, idx)
        if data_diff == 0:
            skipped += 1
            continue
        w1, _ = picard_solve(phi1, psi1, params, idx, T, n_t, tol=tol, gate=gate)
        w2, _ = picard_solve(phi2, psi2, params, idx, T, n_t, tol=tol, gate=gate)
        ratios.append((w1 - w2).norm(idx) / data_diff)
    return LipschitzProbeResult(np.asarray(ratios), gate.lipschitz_bound(contraction),
                                contraction, skipped)


def random_admitted_data(rng, grid, idx, gate, fraction):
    """Mean-zero data pair whose H^s x H^s norm is ``fraction`` of the gate threshold."""
    idx = as_index(idx)
    phi = random_field(rng, grid)
    psi = random_field(rng, grid)
    scale = fraction * gate.data_threshold / (sobolev_norm(phi, idx) + sobolev_norm(psi, idx))
    return phi * scale, psi * scale


def lipschitz_data_pairs(seed, n_pairs, grid, idx, gate):
    """Seeded pairs ``(d1, d2)`` of admitted data.

    ``d1`` has norm between 10% and 60% of the threshold and ``d2`` adds a
    perturbation of 5% to 40% of the threshold, so both stay admitted.
    """
    pairs = []
    for i in range(n_pairs):
        rng = sample_rng(seed, i)
        phi1, psi1 = random_admitted_data(rng, grid, idx, gate, rng.uniform(0.1, 0.6))
        dphi, dpsi = random_admitted_data(rng, grid, idx, gate, rng.uniform(0.05, 0.4))
        pairs.append(((phi1, psi1), (phi1 + dphi, psi1 + dpsi)))
    return pairs
