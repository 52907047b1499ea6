"""From measured constants to a contraction.

The local theory needs two constants: C_l for the free flow and C_b for the
Duhamel product.  We measure both on seeded ensembles, build the ball of
radius rho = 1/(3 C_b), admit data below 1/(18 C_l C_b), and then watch the
Duhamel map contract random pairs in the ball.  The constants are empirical
lower bounds, so the result is labelled an empirical gate and not a proof.
"""

import numpy as np

from kmspectral.dynamics import KmParams
from kmspectral.estimates import empirical_gate
from kmspectral.picard import contraction_probe, picard_solve, smallness_check
from kmspectral.spaces import sobolev_norm
from kmspectral.spectral import GridSpec, random_band_limited_field

grid = GridSpec(n_points=512)
mu = 1.0
T, n_t, s = 1 / (12 * mu), 100, 0.0
params = KmParams(mu=mu)

gate = empirical_gate(s, T, n_t, mu, seed=0, n_samples=100, grid=grid)
print(f"C_l ~ {gate.c_ell_hat:.4f}, C_b ~ {gate.c_b_hat:.4f}")
print(f"rho = {gate.rho:.3f}, data threshold = {gate.data_threshold:.4f}, "
      f"T < 1/(6 mu) = {gate.horizon_bound:.4f}")

phi = random_band_limited_field(1, 16, 1.0, grid)
psi = random_band_limited_field(2, 16, 1.0, grid)
scale = 0.9 * gate.data_threshold / (sobolev_norm(phi, s) + sobolev_norm(psi, s))
phi, psi = phi * scale, psi * scale
print(f"\nsmallness check: {smallness_check(phi, psi, s, gate, T).reason()}")

probe = contraction_probe(phi, psi, params, s, T, n_t, gate, seed=0, n_pairs=50)
print(f"contraction ratios over 50 pairs: min {probe.ratios.min():.4f}, "
      f"median {np.median(probe.ratios):.4f}, max {probe.max_ratio:.4f}")
print(f"factor 2 rho C_b + 2 mu T = {probe.theoretical_factor:.4f}")

_, diag = picard_solve(phi, psi, params, s, T, n_t, gate=gate)
print(f"\nPicard: {diag.iterations} iterations, successive ratios {np.round(diag.ratios, 4)}")
print("The fixed point sits deep inside the ball, so its ratios are well below the probe max.")
