"""Mass bookkeeping as a convergence check.

Integrating both equations over the torus removes the diffusion and the
uv exchange, leaving d/dt int (u + v) = sigma mu int v.  The residual of a
central difference against this law is second order in dt.
"""

import numpy as np

from kmspectral.dynamics import KmParams, mass_balance_residual
from kmspectral.picard import picard_solve
from kmspectral.spectral import GridSpec, constant_field, random_band_limited_field

grid = GridSpec()
params = KmParams(mu=1.0)
phi = random_band_limited_field(1, 16, 0.05, grid)
psi = random_band_limited_field(2, 16, 0.05, grid) + constant_field(grid, 0.002)

previous = None
print(" n_t   max residual   ratio")
for n_t in (50, 100, 200, 400):
    traj, _ = picard_solve(phi, psi, params, 0.0, 0.2, n_t)
    res = np.max(np.abs(mass_balance_residual(traj)))
    ratio = "" if previous is None else f"{previous / res:.3f}"
    print(f" {n_t:4d}  {res:.4e}    {ratio}")
    previous = res
