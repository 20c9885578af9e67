"""How steep is the energy near a stationary circle?

Near the ell-covered circle Y the gradient dominates the square root of the
energy gap, |DE[X]| >= C (E[X] - ell)^(1/2). We sample perturbations of H^1
size 0.05 and report the smallest ratio seen, together with how it varies as
the sampling ball shrinks.
"""

import numpy as np

from h1flow.analysis import gradient_inequality_probe
from h1flow.equilibria import EquilibriumParams

for ell in (1, 2, 3):
    p = EquilibriumParams(1.0, 0.0, 0.0, 0.0, ell)
    print(f"ell = {ell}")
    for radius in (0.1, 0.05, 0.02, 0.01):
        r = gradient_inequality_probe(p, n_samples=200, ball_radius=radius, n_modes=16, seed=0)
        print(f"  radius {radius:5.2f}: min ratio {r.min_ratio:.4f}, median {np.median(r.ratios):.4f}, "
              f"excluded {r.n_excluded}")
