"""
Splitting an invertible matrix along a block structure
======================================================

Every invertible g factors as g = g_A exp(v) u, where g_A is block-diagonal
with positive blocks, v is Hermitian with zero diagonal blocks, and u is
unitary. The positive part of the factorization is the projection of gg*
onto the block-diagonal cone, and ||v||_2 is half the distance of that
projection.
"""
import numpy as np

import pcone
from pcone.linalg import hermitian, schatten_norm, sqrtm
from pcone.sampling import random_invertible, rng_for
from pcone.splitting import block_basis, offblock_basis

rng = rng_for(4)
np.set_printoptions(precision=4, suppress=True)

g = random_invertible(rng, 4)
part = pcone.BlockPartition.parse("0,1|2,3")
f = pcone.cpr_factorize(g, part)
print("v (diagonal blocks vanish):\n", np.abs(f.v))
print(f"reconstruction error {f.residual:.2e}, ||E(v)|| {f.expectation_defect:.2e}, "
      f"{f.iterations} iterations")
print("u unitary:", np.allclose(f.u.conj().T @ f.u, np.eye(4)))

# %%
# Where g_A sits: g_A g_A* is the nearest block-diagonal point to gg*, and the
# distance to it is twice ||v||_2.
P = hermitian(g @ g.conj().T)
C = pcone.ConvexSubmanifold.block_diagonal(part)
proj = pcone.best_approximation(P, C, 2)
print("g_A g_A* is the projection of gg*:", pcone.distance(proj.point, f.g_A @ f.g_A.conj().T, 2))
print(f"||v||_2 = {schatten_norm(f.v, 2):.8f}   d(gg*, C) / 2 = {proj.value / 2:.8f}")

# Using sqrt(gg*) instead gives a different (smaller) number: the square root
# does not commute with projecting onto C, only the halving of the
# logarithm does.
root = pcone.best_approximation(sqrtm(P), C, 2).value
print(f"d(sqrt(gg*), C)  = {root:.8f}")

# %%
# The factorization does not depend on where the iteration starts.
s0 = pcone.conditional_expectation(hermitian(rng.standard_normal((4, 4))), part)
other = pcone.cpr_factorize(g, part, s0=s0)
print("same g_A from another start:", np.allclose(other.g_A, f.g_A))

# %%
# Why it works: block-diagonal Hermitian matrices form a Lie triple system,
# and the off-block complement is invariant under ad_s^2.
s, sp = block_basis(part), offblock_basis(part)
print("Lie triple:", pcone.is_lie_triple(s))
print("reductive:", pcone.is_reductive(s, sp))

# %%
# The conditional expectation onto the blocks has norm one for every p.
for p in (1, 2, 4, "inf"):
    ne, nome = pcone.expectation_norm_estimate(part, p, trials=500)
    print(f"p = {p:>3}: ||E|| ~ {ne:.4f}, ||1 - E|| ~ {nome:.4f}")
