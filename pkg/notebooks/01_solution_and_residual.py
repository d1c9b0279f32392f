"""
The bounded solution and how well it solves its equation
=========================================================

Sample alpha for the Weierstrass configuration (E_4, cos, theta = 1/2),
compare the series against the graph transform, and look at the residual.
"""

import numpy as np

from twistcurve import TwistConfig, eval_alpha, eval_alpha_iterative, linear_map, make_cosine
from twistcurve.alpha import residual, residual_bound
from twistcurve.maps import map_constants

fmap, obs, cfg = linear_map(4), make_cosine(), TwistConfig(0.5)

# closed forms at the fixed point 0 and at 1/2 (which lands on 0 after one step)
print("alpha(0)   =", eval_alpha(0.0, 1e-12, fmap, obs, cfg).value)
print("alpha(1/2) =", eval_alpha(0.5, 1e-12, fmap, obs, cfg).value)

# two independent evaluators on a 4096 grid
grid = eval_alpha_iterative(4096, 40, fmap, obs, cfg)
series = eval_alpha(grid.xs, 1e-10, fmap, obs, cfg)
gap = np.max(np.abs(grid.values - series.value))
print(f"series vs graph transform: {gap:.2e} (radii {grid.tail_radius + series.tail_radius:.2e})")

xs = np.random.default_rng(0).random(10_000)
res = residual(xs, 1e-10, fmap, obs, cfg)
bound = residual_bound(1e-10, map_constants(fmap), cfg)
print(f"max |residual| = {np.abs(res).max():.2e}  <=  {bound:.2e}")
