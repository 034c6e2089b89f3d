"""
Nonpositive curvature, measured
===============================

The cone behaves like a nonpositively curved space for every Schatten
exponent. The exponential map spreads geodesics apart (the EMI inequality),
distances between geodesics are convex, and for p >= 2 the semi-parallelogram
law holds with constant 1. This script measures each of these gaps on random
inputs and then estimates how curved the space is.
"""
import numpy as np

import pcone
from pcone.sampling import random_commuting_pair, random_hermitian, random_posdef, random_tangent, rng_for

rng = rng_for(2)

# Each gap is nonnegative when the inequality holds. Collect the worst one.
worst = {}
for _ in range(200):
    x = random_posdef(rng, 4, 1.5)
    v, w = random_tangent(rng, x), random_tangent(rng, x)
    y, z = random_posdef(rng, 4, 1.5), random_posdef(rng, 4, 1.5)
    g1, g2 = pcone.Geodesic(x, y), pcone.Geodesic(z, random_posdef(rng, 4, 1.5))
    for p in (2, 3):
        worst.setdefault(("emi", p), np.inf)
        worst[("emi", p)] = min(worst[("emi", p)], pcone.emi_gap(x, v, w, p))
        worst.setdefault(("parallelogram", p), np.inf)
        worst[("parallelogram", p)] = min(worst[("parallelogram", p)], pcone.pparallelogram_gap(x, y, z, p))
        worst.setdefault(("convexity", p), np.inf)
        worst[("convexity", p)] = min(worst[("convexity", p)], pcone.geodesic_convexity_gap(g1, g2, p))
for (name, p), gap in sorted(worst.items()):
    print(f"{name:>14s}  p = {p}:  smallest gap {gap: .3e}")

# %%
# Commuting directions span a flat: there the EMI gap is zero.
a, b = random_commuting_pair(rng, 4)
eye = np.eye(4, dtype=complex)
print("EMI gap on a flat:", pcone.emi_gap(eye, pcone.TangentAt(eye, a), pcone.TangentAt(eye, b), 2))

# %%
# Curvature. The quotient (r||v-w|| - d(e^rv, e^rw)) / (r^3 ||v-w||) tends to a
# nonpositive limit as r -> 0. Its size is controlled by the commutator term
# R(v, w) = [v+w, [w, v]] / 12.
x = random_posdef(rng, 3)
v, w = random_tangent(rng, x), random_tangent(rng, x)
for r in (0.5, 0.1, 0.02):
    print(f"r = {r:<5} quotient (O(r)) = {pcone.curvature_estimate(x, v, w, r, 2): .6f}")
lim = pcone.curvature_limit(x, v, w, 2)
print(f"extrapolated limit {lim.s:.6f}, lower bound {lim.lower_bound:.6f}")
print(f"the limit sits inside the sharper window [{lim.lower_bound / 4:.6f}, 0]")

# %%
# The same commutator term is the cubic correction of the distance itself.
# Once it is included, halving r shrinks the error by about 2^5.
v, w = random_hermitian(rng, 3), random_hermitian(rng, 3)
r1 = pcone.bch_distance_remainder(v, w, 1e-2)
r2 = pcone.bch_distance_remainder(v, w, 5e-3)
print(f"remainder at r = 1e-2: {r1:.3e}, at 5e-3: {r2:.3e}, ratio {r1 / r2:.1f}")
