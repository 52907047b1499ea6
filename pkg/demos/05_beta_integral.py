"""The time-singular integral behind the bilinear estimate.

int_0^t (t - y)^{-b} y^{-a} dy = t^{1-a-b} B(1-a, 1-b).  Adaptive Gauss-Kronrod
with the endpoint weights factored out reproduces the Beta function.
"""

import numpy as np
from scipy.special import beta

from kmspectral.estimates import BetaLemmaCase, beta_integral

for a, b in ((0.5, 0.5), (0.6, 0.9), (0.9, 0.9)):
    for t in (0.1, 1.0, 10.0):
        case = BetaLemmaCase(a, b, t)
        scaled = beta_integral(case) / t ** (-case.r)
        print(f"a={a} b={b} t={t:<5} integral/t^-r = {scaled:.12f}  "
              f"B = {beta(1 - a, 1 - b):.12f}")
print(f"\na = b = 1/2 gives pi: {beta_integral(BetaLemmaCase(0.5, 0.5, 1.0)):.12f} vs {np.pi:.12f}")
