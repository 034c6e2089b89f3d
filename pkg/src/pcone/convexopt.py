"""Geodesic-convex optimization on the cone.

All solvers reduce to one-dimensional golden-section searches along
geodesics or along coordinate lines of a flat chart; geodesic convexity of
the distance makes each of these one-dimensional problems unimodal.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Sequence

import numpy as np
from scipy.optimize import minimize, minimize_scalar

from .cone import Geodesic, distance, geodesic_eval, log_point
from .errors import EmptySet, NoConvergence, NonFinite, NotInSubmanifold, UnsupportedNorm
from .linalg import as_schatten, eigh, hermitian, posdef, spectral_norm_p
from .metricprops import birkhoff_gap, check_basis
from .splitting import BlockPartition, block_basis, hermitian_basis, is_lie_triple

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0
MEMBERSHIP_TOL = 1e-8


def golden_section(f: Callable[[float], float], lo: float, hi: float, tol: float) -> tuple[float, float]:
    """Minimize a unimodal ``f`` on ``[lo, hi]`` down to interval width ``tol``."""
    a, b = lo, hi
    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if not (math.isfinite(fc) and math.isfinite(fd)):
            raise NonFinite("objective returned a non-finite value")
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + INV_PHI * (b - a)
            fd = f(d)
    t = 0.5 * (a + b)
    ft = f(t)
    for cand, fv in ((c, fc), (d, fd), (lo, None), (hi, None)):
        if fv is None:
            continue
        if fv < ft:
            t, ft = cand, fv
    if not math.isfinite(ft):
        raise NonFinite("objective returned a non-finite value")
    return t, ft


def _bracketed(g: Callable[[float], float], lo: float, hi: float, tol: float) -> tuple[float, float]:
    """Brent's method on a bracket; parabolic steps beat pure golden section on smooth objectives."""
    res = minimize_scalar(g, bounds=(lo, hi), method="bounded", options={"xatol": tol})
    if not math.isfinite(res.fun):
        raise NonFinite("objective returned a non-finite value")
    return float(res.x), float(res.fun)


def line_min(g: Callable[[float], float], g0: float, h: float, tol: float) -> tuple[float, float]:
    """Minimize a convex ``g`` on the real line near ``t = 0`` (``g(0) = g0``).

    Brackets the minimum by doubling ``h``, then refines with Brent's method.
    """
    h = max(h, tol)
    gp = g(h)
    if gp < g0:
        lo, mid, fmid = 0.0, h, gp
        step = h
        while True:
            step *= 2.0
            nxt = mid + step
            fn = g(nxt)
            if fn >= fmid:
                hi = nxt
                break
            lo, mid, fmid = mid, nxt, fn
        return _bracketed(g, lo, hi, tol)
    gm = g(-h)
    if gm < g0:
        hi, mid, fmid = 0.0, -h, gm
        step = h
        while True:
            step *= 2.0
            nxt = mid - step
            fn = g(nxt)
            if fn >= fmid:
                lo = nxt
                break
            hi, mid, fmid = mid, nxt, fn
        return _bracketed(g, lo, hi, tol)
    t, ft = _bracketed(g, -h, h, tol)
    if ft > g0:
        return 0.0, g0
    return t, ft


def minimize_along_geodesic(f: Callable[[np.ndarray], float], a, b, tol: float = 1e-8) -> tuple[float, float]:
    """Golden-section minimization of ``t -> f(geo(a, b)(t))`` over ``[0, 1]``."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    geo = Geodesic(a, b)
    return golden_section(lambda t: float(f(geodesic_eval(geo, t))), 0.0, 1.0, tol)


def _require_strict(p, minimum: float = 1.0):
    sp = as_schatten(p)
    if not sp.is_strictly_convex:
        raise UnsupportedNorm(f"p = {sp} is not strictly convex; minimizers need not be unique")
    if sp.p < minimum:
        raise UnsupportedNorm(f"this solver needs p >= {minimum:g}, got {sp}")
    return sp


@dataclass(frozen=True, eq=False)
class ConvexSubmanifold:
    """``exp`` of a Lie triple system ``s`` of Hermitian matrices.

    Build with :meth:`block_diagonal`, :meth:`diagonal` or :meth:`subspace`.
    """

    basis: tuple[np.ndarray, ...]
    partition: BlockPartition | None = None
    gram: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        basis = tuple(hermitian(b) for b in self.basis)
        object.__setattr__(self, "basis", basis)
        object.__setattr__(self, "gram", check_basis(basis))

    @classmethod
    def block_diagonal(cls, part: BlockPartition) -> "ConvexSubmanifold":
        return cls(tuple(block_basis(part)), part)

    @classmethod
    def diagonal(cls, n: int) -> "ConvexSubmanifold":
        return cls.block_diagonal(BlockPartition.diagonal(n))

    @classmethod
    def subspace(cls, basis: Sequence[np.ndarray]) -> "ConvexSubmanifold":
        chk = is_lie_triple(basis, rtol=1e-10)
        if not chk.passed:
            raise ValueError(f"span is not a Lie triple system (defect {chk.defect:.3e})")
        return cls(tuple(basis))

    @property
    def n(self) -> int:
        return self.basis[0].shape[0]

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def is_diagonal(self) -> bool:
        return self.partition is not None and all(len(b) == 1 for b in self.partition.blocks)

    def generator(self, coeffs) -> np.ndarray:
        return np.tensordot(np.asarray(coeffs, dtype=float), np.array(self.basis), 1)

    def coefficients(self, z) -> np.ndarray:
        rhs = np.array([np.vdot(b, z).real for b in self.basis])
        return np.linalg.solve(self.gram, rhs)

    def point(self, coeffs) -> np.ndarray:
        return eigh(self.generator(coeffs)).apply(np.exp)

    def distance_to(self, x) -> float:
        """Distance from ``x`` to the nearest point of ``exp(log-projection of x)``; zero iff ``x`` is in C."""
        lz = eigh(x).apply(np.log)
        return distance(x, self.point(self.coefficients(lz)), 2)

    def contains(self, x, tol: float = MEMBERSHIP_TOL) -> bool:
        return self.distance_to(x) < tol


def tangent_basis(C: ConvexSubmanifold, at) -> list[np.ndarray]:
    """Basis ``{a^{1/2} s_i a^{1/2}}`` of the tangent space of ``C`` at ``a``."""
    at = posdef(at)
    if not C.contains(at):
        raise NotInSubmanifold("point is not in the submanifold")
    h = eigh(at).apply(np.sqrt)
    out = [hermitian(h @ s @ h) for s in C.basis]
    check_basis(out)
    return out


class MinimizerResult(NamedTuple):
    point: np.ndarray
    value: float
    iterations: int
    first_order_gap: float
    coefficients: np.ndarray


def _phi_factory(x: np.ndarray, C: ConvexSubmanifold, sp):
    """``c -> d(x, exp(sum c_i s_i))`` with a fast path for the diagonal case."""
    if C.is_diagonal:
        def phi(c):
            dvec = np.exp(-0.5 * np.asarray(c))
            lam = np.linalg.eigvalsh(dvec[:, None] * x * dvec[None, :])
            return spectral_norm_p(np.log(lam), sp)
        return phi

    stack = np.array(C.basis)

    def phi(c):
        ih = eigh(np.tensordot(c, stack, 1)).apply(lambda lam: np.exp(-0.5 * lam))
        lam = np.linalg.eigvalsh(hermitian(ih @ x @ ih))
        return spectral_norm_p(np.log(lam), sp)
    return phi


def _coordinate_descent(phi, c0: np.ndarray, tol: float, max_outer: int, trace) -> tuple[np.ndarray, float, int]:
    c = np.array(c0, dtype=float)
    k = c.size
    fc = phi(c)
    widths = np.full(k, 0.5)
    ltol = 0.1 * tol
    for it in range(1, max_outer + 1):
        c_prev, f_prev = c.copy(), fc
        for i in range(k):
            e = np.zeros(k)
            e[i] = 1.0
            base = c.copy()
            t, ft = line_min(lambda s: phi(base + s * e), fc, widths[i], ltol)
            if ft < fc:
                c, fc = base + t * e, ft
            widths[i] = max(2.0 * abs(t), 10 * tol)
        d = c - c_prev
        if np.max(np.abs(d)) > tol:
            base = c.copy()
            t, ft = line_min(lambda s: phi(base + s * d), fc, 0.5, ltol)
            if ft < fc:
                c, fc = base + t * d, ft
        step = float(np.max(np.abs(c - c_prev)))
        if trace is not None:
            trace.append((it, fc, step))
        if step < tol or (f_prev - fc <= 1e-15 * max(fc, 1.0) and step < math.sqrt(tol)):
            return c, fc, it
    raise NoConvergence(f"coordinate descent did not settle in {max_outer} sweeps")


def best_approximation(
    x,
    C: ConvexSubmanifold,
    p=2,
    tol: float = 1e-9,
    init=None,
    max_outer: int = 500,
    trace: list | None = None,
) -> MinimizerResult:
    """Nearest point of ``C`` to ``x``: minimizes ``phi(z) = d(x, exp(z))`` over ``z`` in the generating subspace.

    Cyclic coordinate descent over the subspace coefficients with golden-section
    line searches. The certificate ``first_order_gap`` is the Birkhoff gap of the
    direction back to ``x`` against the tangent space of ``C`` at the result.

    ``init`` may be a coefficient vector or a Hermitian matrix in the subspace;
    by default the log-Euclidean projection of ``x`` is used.
    """
    sp = _require_strict(p)
    x = posdef(x)
    if x.shape[0] != C.n:
        raise ValueError("dimension of x does not match the submanifold")
    if init is None:
        c0 = C.coefficients(eigh(x).apply(np.log))
    else:
        init = np.asarray(init)
        c0 = C.coefficients(init) if init.ndim == 2 else init.astype(float)
    phi = _phi_factory(x, C, sp)
    c, value, iters = _coordinate_descent(phi, c0, tol, max_outer, trace)
    point = C.point(c)
    gap = first_order_gap(x, point, C, sp)
    return MinimizerResult(point, value, iters, gap, c)


def first_order_gap(x, point, C: ConvexSubmanifold, p) -> float:
    """Birkhoff gap of ``log_point(point, x)`` against the tangent space of ``C`` at ``point``,
    measured in the tangent norm at ``point``."""
    u = log_point(point, x)
    ih = eigh(point).apply(lambda lam: lam**-0.5)
    pulled = [hermitian(ih @ t @ ih) for t in tangent_basis(C, point)]
    # convex objective: the zero and least-squares starts suffice
    return birkhoff_gap(u.normalized(), pulled, p, starts=2)


class ResolventResult(NamedTuple):
    point: np.ndarray
    value: float
    iterations: int


def moreau_yoshida_resolvent(
    F: Callable[[np.ndarray], float],
    x0,
    lam: float,
    p=2,
    tol: float = 1e-9,
    max_sweeps: int = 500,
    trace: list | None = None,
) -> ResolventResult:
    """Minimizer of ``y -> lam F(y) + d(x0, y)^p`` over the whole cone.

    Each sweep line-searches along the geodesics through the current point in
    the directions of a trace-orthonormal Hermitian basis and toward ``x0``,
    then along the geodesic extending the sweep's net displacement.
    """
    if lam <= 0:
        raise ValueError("lam must be positive")
    sp = _require_strict(p, minimum=2.0)
    x0 = posdef(x0)
    q = sp.p
    directions = hermitian_basis(x0.shape[0])

    x0ih = eigh(x0).apply(lambda l: l**-0.5)

    def obj(y):
        dist = spectral_norm_p(np.log(np.linalg.eigvalsh(hermitian(x0ih @ y @ x0ih))), sp)
        val = lam * float(F(y)) + dist**q
        if not math.isfinite(val):
            raise NonFinite("objective returned a non-finite value")
        return val

    y = x0.copy()
    fy = obj(y)
    widths = np.full(len(directions) + 1, 0.5)
    ltol = 0.1 * tol
    for it in range(1, max_sweeps + 1):
        y_prev, f_prev = y.copy(), fy
        eig = eigh(y)
        yh = eig.apply(np.sqrt)
        yih = eig.apply(lambda l: l**-0.5)
        toward = eigh(yih @ x0 @ yih).apply(np.log)
        nt = np.linalg.norm(toward)
        dirs = directions + ([toward / nt] if nt > 1e-14 else [])
        for k, E in enumerate(dirs):
            Ek = eigh(E)

            def curve(t, Ek=Ek):
                return hermitian(yh @ Ek.apply(lambda l: np.exp(t * l)) @ yh)

            t, ft = line_min(lambda t: obj(curve(t)), fy, widths[k], ltol)
            if ft < fy:
                y, fy = curve(t), ft
                eig = eigh(y)
                yh = eig.apply(np.sqrt)
            widths[k] = max(2.0 * abs(t), 10 * tol)
        moved = distance(y_prev, y, 2)
        if moved > tol:
            geo = Geodesic(y_prev, y)
            t, ft = line_min(lambda t: obj(geodesic_eval(geo, 1.0 + t)), fy, 0.5, ltol)
            if ft < fy:
                y, fy = geodesic_eval(geo, 1.0 + t), ft
        step = distance(y_prev, y, 2)
        if trace is not None:
            trace.append((it, fy, step))
        if step < tol or (f_prev - fy <= 1e-15 * max(fy, 1.0) and step < math.sqrt(tol)):
            return ResolventResult(y, fy, it)
    raise NoConvergence(f"resolvent search did not settle in {max_sweeps} sweeps")


class CircumcenterResult(NamedTuple):
    center: np.ndarray
    radius: float
    iterations: int


def _radius(x, S, sp) -> tuple[float, int]:
    ds = [distance(x, s, sp) for s in S]
    i = int(np.argmax(ds))
    return ds[i], i


def circumcenter(
    S: Sequence[np.ndarray],
    p=2,
    tol: float = 1e-10,
    max_iter: int = 2000,
    trace: list | None = None,
) -> CircumcenterResult:
    """Center and radius of the smallest closed ball containing ``S``.

    Phase one walks toward the farthest point with steps ``1/(k+2)`` until the
    best radius stalls (decrease below ``tol`` over 20 iterations). Phase two
    polishes that center with SLSQP on the epigraph problem
    ``min r  s.t.  d(y, s_i)^2 <= r`` in the exponential chart at the current center.
    """
    if len(S) == 0:
        raise EmptySet("circumcenter of an empty set")
    sp = _require_strict(p, minimum=2.0)
    S = [posdef(s) for s in S]
    if len(S) == 1:
        return CircumcenterResult(S[0], 0.0, 0)

    x = S[0]
    best_x, (best_r, far) = x, _radius(x, S, sp)
    stall, k = 0, 0
    while k < max_iter and stall < 20:
        x = geodesic_eval(Geodesic(x, S[far]), 1.0 / (k + 2))
        r, far = _radius(x, S, sp)
        if r < best_r - tol:
            stall = 0
        else:
            stall += 1
        if r < best_r:
            best_x, best_r = x, r
        k += 1
        if trace is not None:
            trace.append((k, r, 1.0 / (k + 1)))

    center, radius = best_x, best_r
    for _ in range(3):
        new_center, new_radius = _polish(center, S, sp)
        if new_radius >= radius - 1e-15:
            break
        center, radius = new_center, new_radius
        k += 1
        if trace is not None:
            trace.append((k, radius, 0.0))
    return CircumcenterResult(center, radius, k)


def _polish(x: np.ndarray, S, sp) -> tuple[np.ndarray, float]:
    n = x.shape[0]
    basis = np.array(hermitian_basis(n))
    eig = eigh(x)
    xh = eig.apply(np.sqrt)
    xih = eig.apply(lambda lam: lam**-0.5)
    # in the chart y = x^{1/2} e^H x^{1/2}, d(y, s) = d(e^H, x^{-1/2} s x^{-1/2})
    pulled = np.array([hermitian(xih @ s @ xih) for s in S])

    def point(h):
        return hermitian(xh @ eigh(np.tensordot(h, basis, 1)).apply(np.exp) @ xh)

    def sq_batch(H):
        # H: (k, n, n) chart coordinates; returns (k, len(S)) squared distances
        lam, U = np.linalg.eigh(H)
        ih = (U * np.exp(-0.5 * lam)[:, None, :]) @ U.conj().transpose(0, 2, 1)
        M = ih[:, None] @ pulled[None] @ ih[:, None]
        mu = np.linalg.eigvalsh(0.5 * (M + M.conj().swapaxes(-1, -2)))
        ell = np.abs(np.log(mu))
        if sp.is_inf:
            return ell.max(axis=-1) ** 2
        top = np.maximum(ell.max(axis=-1, keepdims=True), 1e-300)
        return (top[..., 0] * np.sum((ell / top) ** sp.p, axis=-1) ** (1.0 / sp.p)) ** 2

    def sq(h):
        return sq_batch(np.tensordot(h, basis, 1)[None])[0]

    def cons(z):
        return z[-1] - sq(z[:-1])

    eps = 1e-6

    def cons_jac(z):
        H = np.tensordot(z[:-1], basis, 1)
        steps = eps * basis
        vals = sq_batch(np.concatenate([H + steps, H - steps]))
        m = basis.shape[0]
        J = np.empty((len(S), z.size))
        J[:, :-1] = -(vals[:m] - vals[m:]).T / (2 * eps)
        J[:, -1] = 1.0
        return J

    m = basis.shape[0]
    z0 = np.zeros(m + 1)
    z0[-1] = float(sq(z0[:-1]).max())
    res = minimize(
        lambda z: z[-1],
        z0,
        jac=lambda z: np.eye(z.size)[-1],
        constraints=[{"type": "ineq", "fun": cons, "jac": cons_jac}],
        method="SLSQP",
        options={"ftol": 1e-16, "maxiter": 500},
    )
    y = point(res.x[:-1])
    r, _ = _radius(y, S, sp)
    return y, r
