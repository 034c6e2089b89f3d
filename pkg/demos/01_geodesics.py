"""
Distances and geodesics in the positive cone
============================================

A tour of the basic objects: the distance d(a, b) = ||ln(a^-1/2 b a^-1/2)||_p,
the geodesic t -> a^1/2 (a^-1/2 b a^-1/2)^t a^1/2, and the congruence
maps x -> g x g* that act on the cone as isometries.
"""
import numpy as np

import pcone
from pcone.sampling import random_invertible, random_posdef, rng_for

rng = rng_for(1)
np.set_printoptions(precision=4, suppress=True)

# Two diagonal matrices commute, so their distance is just the Schatten norm
# of the difference of logarithms: here sqrt(2) * ln 4.
a = np.diag([1.0, 4.0])
b = np.diag([4.0, 1.0])
for p in (1, 2, "inf"):
    print(f"d_p(a, b) with p = {p}: {pcone.distance(a, b, p):.6f}")
print("closed form at p = 2:", np.sqrt(2) * np.log(4))

# %%
# The geodesic is the same curve for every p; only its length changes.
# Distances along it grow linearly, which is what makes it a metric geodesic.
a = random_posdef(rng, 3, 1.5)
b = random_posdef(rng, 3, 1.5)
geo = pcone.Geodesic(a, b)
total = pcone.distance(a, b, 3)
for t in np.linspace(0, 1, 5):
    x = geo(t)
    print(f"t = {t:.2f}   d(a, x) / d(a, b) = {pcone.distance(a, x, 3) / total:.6f}")

# %%
# Exponential and logarithm at a base point invert each other.
v = pcone.log_point(a, b)
print("exp_a(log_a b) == b:", np.allclose(pcone.exp_point(a, v), b))

# %%
# Congruences preserve distance, for any invertible g and any p.
g = random_invertible(rng, 3)
for p in (1, 2, 3, "inf"):
    before = pcone.distance(a, b, p)
    after = pcone.distance(pcone.congruence(g, a), pcone.congruence(g, b), p)
    print(f"p = {p}: |d(a,b) - d(gag*, gbg*)| = {abs(before - after):.2e}")

# %%
# Parallel transport along the geodesic carries tangent vectors isometrically:
# the velocity at t = 0 lands on the velocity at t = 1.
u0, u1 = geo.velocity(0.0), geo.velocity(1.0)
moved = pcone.transport(geo, u0)
print("transported velocity matches:", np.allclose(moved.u, u1.u))
print("norms:", u0.norm(2), moved.norm(2))
