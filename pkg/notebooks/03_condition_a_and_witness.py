"""
Condition (A) and an explicit lower-bound witness
=================================================

For E_2048 with cosine forcing the linear-regime thresholds give a window
[delta1, delta2] of admissible increments. An orbit that passes close to
c = 3/4 produces an h with |alpha(x) - alpha(x + h)| >= C0 h^theta.
"""

from twistcurve import (TwistConfig, condition_a_report, find_witness, hardy_threshold,
                        linear_map, make_cosine)

obs, cfg = make_cosine(), TwistConfig(0.5)

for d in (4, 32, 2048):
    r = condition_a_report(linear_map(d), obs, cfg)
    print(f"E_{d}: passes A={r.passes_A}, simple bound lhs={r.simple1_lhs:.4f}, "
          f"delta1={r.delta1:.4g}, delta2={r.delta2:.4g}")

print("Hardy threshold at theta=1/2:", hardy_threshold(0.5)[0])

fmap = linear_map(2048)
rep = condition_a_report(fmap, obs, cfg)
w = find_witness(fmap, obs, cfg, rep, h_cap=1e-2, rng_seed=0)
print(f"witness x={w.x:.6f}, N={w.N}, h={w.h:.3e}")
print(f"|dalpha|={abs(w.delta_alpha):.3e} >= C0 h^theta={w.lower_bound:.3e}")
print("block sums", w.block_sums, "reconstruction error", w.reconstruction_error)
