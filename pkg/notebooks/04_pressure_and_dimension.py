"""
Pressure of the derivative potential
====================================

The dimension of the graph is 1 + t where P(-(t + theta) log f') = 0.
For a nonlinear expanding map the root is found numerically from cylinder
sums, then compared with box counting.
"""

from twistcurve import (TwistConfig, box_dimension, dimension_via_pressure, make_cosine,
                        pressure, sine_map)

fmap, cfg = sine_map(8, 0.1), TwistConfig(0.5)

for s in (0.6, 0.8, 1.0, 1.2):
    est = pressure(fmap, s, 6)
    print(f"s={s}: P_6={est.value:+.6f} (+/- {est.error:.3f}), extrapolated {est.extrapolated:+.6f}")

via_p = dimension_via_pressure(fmap, cfg, depth=8)
via_box = box_dimension(2**20, 4, 10, fmap, make_cosine(), cfg)
print(f"pressure root s*={via_p.s_root:.8f}, dim {via_p.dim:.6f}; box counting {via_box.dim:.4f}")
