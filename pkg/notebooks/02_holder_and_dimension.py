"""
Local exponents and the dimension of the graph
==============================================

At Lebesgue-typical points the oscillation of alpha over [x - h, x + h]
scales like h^theta, and the box dimension of the graph is 2 - theta.
"""

import numpy as np

from twistcurve import TwistConfig, box_dimension, holder_exponent_at, linear_map, make_cosine
from twistcurve.regularity import median_holder_exponent

fmap, obs = linear_map(4), make_cosine()

for theta in (0.3, 0.5, 0.7):
    cfg = TwistConfig(theta)
    med, _ = median_holder_exponent(64, 8, 20, fmap, obs, cfg, rng_seed=0)
    dim = box_dimension(2**20, 4, 10, fmap, obs, cfg).dim
    print(f"theta={theta}: median exponent {med:.3f}, box dim {dim:.3f} (2 - theta = {2 - theta})")

# one point in detail: the per-scale log ratios drift toward theta
est = holder_exponent_at(0.1234, 8, 20, 17, fmap, obs, TwistConfig(0.5))
for h, osc in zip(est.scales, est.oscillations):
    print(f"  h=2^{np.log2(h):.0f}  osc={osc:.3e}")
print("slope", round(est.exponent, 4), "+/-", round(est.stderr, 4))
