"""
Projections, enclosing balls and proximal steps
================================================

Convex optimization on the cone: the nearest diagonal matrix to a given x
(with a first-order optimality certificate), the center of the smallest ball
containing a finite set, and one Moreau-Yoshida proximal step.
"""
import numpy as np

import pcone
from pcone.sampling import random_invertible, random_posdef, rng_for

rng = rng_for(3)
np.set_printoptions(precision=4, suppress=True)

# The positive diagonal matrices form a totally geodesic, convex submanifold.
x = random_posdef(rng, 3, 1.5)
C = pcone.ConvexSubmanifold.diagonal(3)
res = pcone.best_approximation(x, C, p=2)
print("nearest diagonal point:\n", res.point.real)
print(f"distance {res.value:.6f} after {res.iterations} sweeps")

# %%
# At the minimizer the logarithm pointing back to x is Birkhoff-orthogonal to
# the submanifold: moving along any tangent direction of C cannot shorten it.
# first_order_gap is that orthogonality margin; it should be ~0 or positive.
print("first-order gap:", res.first_order_gap)

# %%
# Away from p = 2 the answer moves, but the projection stays unique.
for p in (1.5, 3):
    r = pcone.best_approximation(x, C, p=p)
    print(f"p = {p}: distance {r.value:.6f}, diag {np.diag(r.point).real}")

# %%
# Circumcenter of a finite set. For two points it is the geodesic midpoint.
a, b = random_posdef(rng, 3, 1.5), random_posdef(rng, 3, 1.5)
two = pcone.circumcenter([a, b])
print("two-point center vs midpoint:", pcone.distance(two.center, pcone.midpoint(a, b), 2))

S = [random_posdef(rng, 3, 1.5) for _ in range(5)]
cc = pcone.circumcenter(S)
print(f"radius {cc.radius:.6f}; distances to the points:",
      np.round([pcone.distance(cc.center, s, 2) for s in S], 6))

# Congruences are isometries, so they carry the center along with the set.
g = random_invertible(rng, 3)
moved = pcone.circumcenter([pcone.congruence(g, s) for s in S])
print("center moves with the set:", pcone.distance(moved.center, pcone.congruence(g, cc.center), 2))

# %%
# A proximal step for F(y) = d(y, c)^2. The minimizer of lam F(y) + d(x0, y)^2
# lies on the geodesic from x0 to c, at parameter lam / (1 + lam).
x0, c = random_posdef(rng, 3), random_posdef(rng, 3)
lam = 3.0
prox = pcone.moreau_yoshida_resolvent(lambda y: pcone.distance(y, c, 2) ** 2, x0, lam)
oracle = pcone.Geodesic(x0, c)(lam / (1 + lam))
print("resolvent vs closed form:", pcone.distance(prox.point, oracle, 2))
