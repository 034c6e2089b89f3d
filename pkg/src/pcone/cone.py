"""The manifold of positive-definite matrices with the Schatten-p Finsler metric.

The tangent norm at ``a`` is ``||a^{-1/2} u a^{-1/2}||_p``; geodesics are
``t -> a^{1/2} (a^{-1/2} b a^{-1/2})^t a^{1/2}`` and are globally minimizing
for every ``p``. Congruences ``x -> g x g^*`` act by isometries.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import BaseMismatch, DimensionMismatch, Singular
from .linalg import (
    EPS_PD,
    EigenDecomposition,
    as_schatten,
    eigh,
    hermitian,
    posdef,
    same_shape,
    spectral_norm_p,
)


def _halves(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """``(a^{1/2}, a^{-1/2})`` from one eigendecomposition."""
    lam, U = np.linalg.eigh(a)
    r = np.sqrt(lam)
    return (U * r) @ U.conj().T, (U / r) @ U.conj().T


def _congruence_eig(ih: np.ndarray, b: np.ndarray) -> EigenDecomposition:
    return eigh(ih @ b @ ih)


@dataclass(frozen=True, eq=False)
class TangentAt:
    """Tangent vector ``u`` (Hermitian) at the base point ``base``."""

    base: np.ndarray
    u: np.ndarray

    def __post_init__(self):
        base = np.asarray(self.base, dtype=complex)
        u = hermitian(self.u)
        if u.shape != base.shape:
            raise DimensionMismatch(f"tangent {u.shape} at base {base.shape}")
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "u", u)

    def normalized(self) -> np.ndarray:
        """``base^{-1/2} u base^{-1/2}``, the vector pulled back to the identity."""
        _, ih = _halves(self.base)
        return hermitian(ih @ self.u @ ih)

    def norm(self, p) -> float:
        return spectral_norm_p(np.linalg.eigvalsh(self.normalized()), p)

    def __add__(self, other: "TangentAt") -> "TangentAt":
        check_base(self.base, other)
        return TangentAt(self.base, self.u + other.u)

    def __sub__(self, other: "TangentAt") -> "TangentAt":
        check_base(self.base, other)
        return TangentAt(self.base, self.u - other.u)

    def __mul__(self, c: float) -> "TangentAt":
        return TangentAt(self.base, float(c) * self.u)

    __rmul__ = __mul__


def check_base(x: np.ndarray, v: TangentAt) -> None:
    if v.base.shape != np.shape(x) or not np.array_equal(v.base, np.asarray(x, dtype=complex)):
        raise BaseMismatch("tangent vector is based at a different point")


@dataclass(frozen=True, eq=False)
class Geodesic:
    """The geodesic from ``a`` (t = 0) to ``b`` (t = 1).

    The eigendecomposition of ``c = a^{-1/2} b a^{-1/2}`` is computed once
    at construction and shared by every evaluation.
    """

    a: np.ndarray
    b: np.ndarray
    a_half: np.ndarray = field(init=False, repr=False)
    a_ihalf: np.ndarray = field(init=False, repr=False)
    c_eig: EigenDecomposition = field(init=False, repr=False)

    def __post_init__(self):
        a, b = posdef(self.a), posdef(self.b)
        same_shape(a, b)
        h, ih = _halves(a)
        for name, val in (("a", a), ("b", b), ("a_half", h), ("a_ihalf", ih)):
            object.__setattr__(self, name, val)
        object.__setattr__(self, "c_eig", _congruence_eig(ih, b))

    @property
    def n(self) -> int:
        return self.a.shape[0]

    def __call__(self, t: float) -> np.ndarray:
        return geodesic_eval(self, t)

    def log_c(self) -> np.ndarray:
        return self.c_eig.apply(np.log)

    def length(self, p) -> float:
        return spectral_norm_p(np.log(self.c_eig.eigenvalues), p)

    def velocity(self, t: float) -> TangentAt:
        """Derivative of the geodesic at ``t``, as a tangent vector there."""
        lam, U = self.c_eig
        inner = (U * (lam**t * np.log(lam))) @ U.conj().T
        # exact endpoints as base points, so the result composes with transport
        base = self.a if t == 0 else self.b if t == 1 else self(t)
        return TangentAt(base, hermitian(self.a_half @ inner @ self.a_half))

    def reversed(self) -> "Geodesic":
        return Geodesic(self.b, self.a)


def geodesic(a, b) -> Geodesic:
    return Geodesic(a, b)


def geodesic_eval(geo: Geodesic, t: float) -> np.ndarray:
    lam, U = geo.c_eig
    ct = (U * lam ** float(t)) @ U.conj().T
    return hermitian(geo.a_half @ ct @ geo.a_half)


def midpoint(a, b) -> np.ndarray:
    return geodesic_eval(Geodesic(a, b), 0.5)


def distance(a, b, p) -> float:
    """``||ln(a^{-1/2} b a^{-1/2})||_p``."""
    a, b = np.asarray(a, dtype=complex), np.asarray(b, dtype=complex)
    same_shape(a, b)
    _, ih = _halves(hermitian(a))
    lam = np.linalg.eigvalsh(hermitian(ih @ b @ ih))
    return spectral_norm_p(np.log(lam), p)


def exp_point(x, v: TangentAt) -> np.ndarray:
    check_base(x, v)
    h, ih = _halves(v.base)
    return hermitian(h @ eigh(ih @ v.u @ ih).apply(np.exp) @ h)


def log_point(x, y) -> TangentAt:
    x = np.asarray(x, dtype=complex)
    y = np.asarray(y, dtype=complex)
    same_shape(x, y)
    h, ih = _halves(x)
    inner = eigh(ih @ y @ ih).apply(np.log)
    return TangentAt(x, h @ inner @ h)


def transport(geo: Geodesic, u: TangentAt) -> TangentAt:
    """Parallel translation from ``geo.a`` to ``geo.b``: ``u -> m u m^*`` with
    ``m = a^{1/2} c^{1/2} a^{-1/2}``.
    """
    check_base(geo.a, u)
    c_half = geo.c_eig.apply(np.sqrt)
    m = geo.a_half @ c_half @ geo.a_ihalf
    return TangentAt(geo.b, m @ u.u @ m.conj().T)


def _invertible(g) -> np.ndarray:
    g = np.asarray(g, dtype=complex)
    if g.ndim != 2 or g.shape[0] != g.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {g.shape}")
    sig = np.linalg.svd(g, compute_uv=False)
    if sig[-1] <= EPS_PD * sig[0]:
        raise Singular("congruence by a singular matrix")
    return g


def congruence(g, x) -> np.ndarray:
    g = _invertible(g)
    x = np.asarray(x, dtype=complex)
    same_shape(g, x)
    return hermitian(g @ x @ g.conj().T)


def congruence_tangent(g, v: TangentAt) -> TangentAt:
    g = _invertible(g)
    same_shape(g, v.base)
    return TangentAt(congruence(g, v.base), g @ v.u @ g.conj().T)


def tangent_norm(v: TangentAt, p) -> float:
    return v.norm(as_schatten(p))
