"""Signed gap evaluators for the metric inequalities of the cone.

Every ``*_gap`` function returns ``rhs - lhs`` of an inequality, so a value
``>= 0`` (up to round-off) means the inequality holds on that instance.
"""
from __future__ import annotations

import hashlib
import json
import math
from dataclasses import asdict, dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .cone import Geodesic, TangentAt, check_base, distance, exp_point, geodesic_eval, midpoint
from .errors import DegenerateBasis, DegenerateInput, RangeError, UnsupportedNorm
from .linalg import (
    as_schatten,
    bch_curvature_term,
    eigh,
    hermitian,
    powm,
    schatten_norm,
    spectral_norm_p,
)


def inputs_digest(*arrays) -> str:
    h = hashlib.sha256()
    for a in arrays:
        a = np.ascontiguousarray(np.asarray(a, dtype=complex))
        h.update(str(a.shape).encode())
        h.update(a.tobytes())
    return h.hexdigest()[:16]


@dataclass(frozen=True)
class GapReport:
    name: str
    gap: float
    inputs_digest: str
    tolerance_used: float

    @property
    def passed(self) -> bool:
        return self.gap >= -self.tolerance_used

    def to_dict(self) -> dict:
        d = asdict(self)
        d["pass"] = self.passed
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=False)


def emi_gap(x, v: TangentAt, w: TangentAt, p) -> float:
    """``d(exp_x v, exp_x w) - ||v - w||_x``."""
    check_base(x, v)
    check_base(x, w)
    return distance(exp_point(x, v), exp_point(x, w), p) - (v - w).norm(p)


def pparallelogram_gap(x, y, z, p, K: float = 1.0) -> float:
    """Semi-parallelogram law with exponent ``p``:

    ``(d(x,y)^p + d(x,z)^p)/2 - d(x, m)^p - d(y,z)^p / (2K)^p`` where ``m``
    is the midpoint of ``y`` and ``z``.
    """
    sp = as_schatten(p)
    if not sp.is_strictly_convex or sp.p < 2.0:
        raise UnsupportedNorm(f"exponent-p semi-parallelogram needs real p >= 2, got {sp}")
    if K <= 0:
        raise ValueError("K must be positive")
    q = sp.p
    m = midpoint(y, z)
    return (
        0.5 * (distance(x, y, sp) ** q + distance(x, z, sp) ** q)
        - distance(x, m, sp) ** q
        - distance(y, z, sp) ** q / (2.0 * K) ** q
    )


def geodesic_convexity_gap(geo_a: Geodesic, geo_b: Geodesic, p) -> float:
    """Midpoint convexity of ``t -> d(geo_a(t), geo_b(t))``."""
    f0 = distance(geo_a.a, geo_b.a, p)
    f1 = distance(geo_a.b, geo_b.b, p)
    fm = distance(geodesic_eval(geo_a, 0.5), geodesic_eval(geo_b, 0.5), p)
    return 0.5 * (f0 + f1) - fm


def loewner_heinz_gap(a, b, t: float, p) -> float:
    """``t ||ln(a^{-1/2} b a^{-1/2})||_p - ||ln(a^{-t/2} b^t a^{-t/2})||_p``."""
    if not 0.0 <= t <= 1.0:
        raise RangeError(f"t must lie in [0, 1], got {t}")
    if t == 0.0:
        return 0.0
    return t * distance(a, b, p) - distance(powm(a, t), powm(b, t), p)


def _pulled_back(x, v: TangentAt, w: TangentAt) -> tuple[np.ndarray, np.ndarray]:
    check_base(x, v)
    check_base(x, w)
    return v.normalized(), w.normalized()


def _exp_distance(v: np.ndarray, w: np.ndarray, p) -> float:
    """``d(e^v, e^w) = ||ln(e^{-v/2} e^w e^{-v/2})||_p``.

    Works with ``e^{-v/2} - I`` and ``e^w - I`` (via ``expm1``) so that the
    logarithm keeps full relative accuracy when ``v, w`` are small.
    """
    e1 = eigh(v).apply(lambda lam: np.expm1(-0.5 * lam))
    e2 = eigh(w).apply(np.expm1)
    # (I + e1)(I + e2)(I + e1) - I
    n = 2 * e1 + e2 + e1 @ e2 + e2 @ e1 + e1 @ e1 + e1 @ e2 @ e1
    lam = np.linalg.eigvalsh(hermitian(n))
    return spectral_norm_p(np.log1p(lam), p)


def curvature_estimate(x, v: TangentAt, w: TangentAt, r: float, p=2) -> float:
    """Milnor-type quotient

    ``(r ||v-w||_x - d(exp_x(rv), exp_x(rw))) / (r^2 d(exp_x v, exp_x w))``.

    Nonpositive on every input by the exponential metric increasing property.
    """
    if r <= 0:
        raise RangeError("r must be positive")
    vt, wt = _pulled_back(x, v, w)
    diff = schatten_norm(vt - wt, p)
    if diff < 1e-10:
        raise DegenerateInput("v and w coincide")
    num = r * diff - _exp_distance(r * vt, r * wt, p)
    return num / (r * r * _exp_distance(vt, wt, p))


class CurvatureLimit(NamedTuple):
    s: float
    lower_bound: float


def _third_order_quotient(vt, wt, r, p, diff) -> float:
    return (r * diff - _exp_distance(r * vt, r * wt, p)) / (r**3 * diff)


def _richardson(values: Sequence[float], radii: Sequence[float]) -> tuple[float, float]:
    """Extrapolate ``q(r) -> q(0)`` from a halving sequence of radii.

    The convergence order is measured from the three samples before it is
    used; returns ``(limit, order)``.
    """
    q1, q2, q3 = values
    ratio_r = radii[0] / radii[1]
    d12, d23 = q1 - q2, q2 - q3
    scale = max(abs(q1), abs(q2), abs(q3), 1e-300)
    if abs(d23) <= 1e-12 * scale or abs(d12) <= 1e-12 * scale or d12 / d23 <= 1.0:
        return q3, math.nan
    order = math.log(d12 / d23) / math.log(ratio_r)
    k = min(max(round(order), 1), 4)
    return q3 + (q3 - q2) / (ratio_r**k - 1.0), order


def curvature_limit(
    x, v: TangentAt, w: TangentAt, p=2, radii: Sequence[float] = (1e-2, 5e-3, 2.5e-3)
) -> CurvatureLimit:
    """Sectional-curvature surrogate at ``x`` in the plane of ``v, w``.

    Returns the extrapolated limit of
    ``(r ||v-w||_x - d(exp_x(rv), exp_x(rw))) / (r^3 ||v-w||_x)`` together with
    the lower bound ``-||R(v,w)||_p / ||v-w||_p`` (pulled back to the identity).
    In the cone normalization the third-order term of the distance is ``R/4``,
    so the limit actually lies in ``[-||R||/(4||v-w||), 0]``.
    """
    vt, wt = _pulled_back(x, v, w)
    diff = schatten_norm(vt - wt, p)
    if diff < 1e-10:
        raise DegenerateInput("v and w coincide")
    qs = [_third_order_quotient(vt, wt, r, p, diff) for r in radii]
    s, _ = _richardson(qs, radii)
    bound = -schatten_norm(bch_curvature_term(vt, wt), p) / diff
    return CurvatureLimit(s, bound)


def bch_distance_remainder(v, w, r: float, p=2) -> float:
    """``|d(e^{rv}, e^{rw}) - ||r(v - w) + (r^3/4) R(v, w)||_p|``.

    The cubic correction is the curvature term ``R(v, w) = [v+w, [w, v]]/12``
    rescaled to the cone metric, so the remainder is ``O(r^5)``.
    """
    v, w = hermitian(v), hermitian(w)
    if r * max(schatten_norm(v, math.inf), schatten_norm(w, math.inf)) > 0.5:
        raise RangeError("r * ||v||, r * ||w|| must stay below 1/2")
    approx = schatten_norm(r * (v - w) + (r**3 / 4.0) * bch_curvature_term(v, w), p)
    return abs(_exp_distance(r * v, r * w, p) - approx)


def _gram(basis: Sequence[np.ndarray]) -> np.ndarray:
    B = np.array([np.asarray(b, dtype=complex).ravel() for b in basis])
    return (B.conj() @ B.T).real


def check_basis(basis: Sequence[np.ndarray], tol: float = 1e-10) -> np.ndarray:
    """Gram matrix of ``basis`` in the trace inner product, after a rank check."""
    if len(basis) == 0:
        return np.zeros((0, 0))
    G = _gram(basis)
    ev = np.linalg.eigvalsh(G)
    if ev[-1] <= 0 or ev[0] <= tol * ev[-1]:
        raise DegenerateBasis("basis is not linearly independent")
    return G


class BirkhoffResult(NamedTuple):
    gap: float
    witness: np.ndarray


def birkhoff_gap(
    v,
    S: Sequence[np.ndarray],
    p,
    starts: int = 5,
    iterations: int = 200,
    shrink: float = 0.5,
    return_witness: bool = False,
):
    """``min_{s in span S} ||v + s||_p - ||v||_p`` by multi-start coordinate descent.

    A value ``>= -tol`` certifies that ``v`` is Birkhoff-orthogonal to ``S``;
    a clearly negative value comes with the witness ``s``.
    """
    v = hermitian(v)
    basis = [hermitian(s) for s in S]
    if not basis:
        return BirkhoffResult(0.0, np.zeros_like(v)) if return_witness else 0.0
    G = check_basis(basis)
    sp = as_schatten(p)
    stack = np.array(basis)
    base = spectral_norm_p(np.linalg.eigvalsh(v), sp)

    def f(c):
        return spectral_norm_p(np.linalg.eigvalsh(v + np.tensordot(c, stack, 1)), sp)

    k = len(basis)
    rhs = np.array([np.vdot(b, v).real for b in basis])
    ls = -np.linalg.solve(G, rhs)
    rng = np.random.default_rng(0)
    scale = max(float(np.linalg.norm(v)), 1.0)
    inits = [np.zeros(k), ls] + [ls + scale * rng.standard_normal(k) for _ in range(max(starts - 2, 0))]

    best_c, best_f = np.zeros(k), base
    for c in inits[:max(starts, 1)]:
        c = c.copy()
        fc = f(c)
        h = 0.5 * scale
        for _ in range(iterations):
            moved = False
            for i in range(k):
                for sgn in (1.0, -1.0):
                    c[i] += sgn * h
                    ft = f(c)
                    if ft < fc:
                        fc, moved = ft, True
                        break
                    c[i] -= sgn * h
            if not moved:
                h *= shrink
                if h < 1e-13 * scale:
                    break
        if fc < best_f:
            best_c, best_f = c, fc
    gap = best_f - base
    if return_witness:
        return BirkhoffResult(gap, np.tensordot(best_c, stack, 1))
    return gap


def convexity_constant_estimate(p, n: int, trials: int, seed: int = 0) -> float:
    """Smallest ``K >= 1`` consistent with the weak Clarkson inequality

    ``2 (||v||^p / K^p + ||w||^p) <= ||v + w||^p + ||v - w||^p``

    on ``trials`` random Hermitian pairs; ``inf`` if some pair violates it for every ``K``.
    """
    sp = as_schatten(p)
    if not sp.is_strictly_convex:
        raise UnsupportedNorm("uniform convexity needs 1 < p < inf")
    q = sp.p
    rng = np.random.default_rng(seed)
    A = rng.standard_normal((trials, n, n)) + 1j * rng.standard_normal((trials, n, n))
    B = rng.standard_normal((trials, n, n)) + 1j * rng.standard_normal((trials, n, n))
    V = (A + np.conj(np.swapaxes(A, 1, 2))) / 2
    W = (B + np.conj(np.swapaxes(B, 1, 2))) / 2
    W *= (10.0 ** rng.uniform(-2, 2, trials))[:, None, None]

    def pnorm_q(M):
        lam = np.abs(np.linalg.eigvalsh(M))
        return np.sum(lam**q, axis=1)

    nv = pnorm_q(V)
    denom = 0.5 * (pnorm_q(V + W) + pnorm_q(V - W)) - pnorm_q(W)
    if np.any(denom <= 0):
        return math.inf
    ratio = (nv / denom) ** (1.0 / q)
    return max(1.0, float(ratio.max()))
