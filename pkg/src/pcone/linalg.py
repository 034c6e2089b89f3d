"""Dense Hermitian linear algebra.

Matrices are plain complex ``numpy`` arrays of shape ``(n, n)``. Functions
that expect a Hermitian argument symmetrize it on entry, ``(A + A^*)/2``,
so round-off from products never leaks into the spectral routines.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

from .errors import (
    DimensionMismatch,
    DomainError,
    NoConvergence,
    NotPositiveDefinite,
    Singular,
)

EPS_PD = 1e-12

ScalarFn = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class SchattenP:
    """Schatten norm selector.

    ``p`` is ``1.0``, any real number ``> 1``, or ``math.inf``.
    """

    p: float

    def __post_init__(self):
        p = float(self.p)
        if math.isnan(p) or p < 1.0:
            raise ValueError(f"Schatten exponent must be >= 1, got {self.p!r}")
        object.__setattr__(self, "p", p)

    @classmethod
    def parse(cls, value) -> "SchattenP":
        if isinstance(value, SchattenP):
            return value
        if isinstance(value, str):
            v = value.strip().lower()
            if v in ("inf", "infinity", "oo"):
                return cls(math.inf)
            return cls(float(v))
        return cls(float(value))

    @property
    def is_one(self) -> bool:
        return self.p == 1.0

    @property
    def is_inf(self) -> bool:
        return math.isinf(self.p)

    @property
    def is_strictly_convex(self) -> bool:
        return not (self.is_one or self.is_inf)

    @property
    def convexity_exponent(self) -> float | None:
        if not self.is_strictly_convex:
            return None
        return max(self.p, 2.0)

    @property
    def convexity_constant(self) -> float | None:
        # Clarkson-McCarthy; below p = 2 use metricprops.convexity_constant_estimate
        if self.is_strictly_convex and self.p >= 2.0:
            return 1.0
        return None

    def __str__(self) -> str:
        if self.is_inf:
            return "inf"
        return f"{self.p:g}"


def as_schatten(p) -> SchattenP:
    return SchattenP.parse(p)


class EigenDecomposition(NamedTuple):
    eigenvalues: np.ndarray
    U: np.ndarray

    def apply(self, f: ScalarFn) -> np.ndarray:
        """Return ``U diag(f(eigenvalues)) U^*``."""
        vals = np.asarray(f(self.eigenvalues))
        return hermitian((self.U * vals) @ self.U.conj().T)


def _square(A) -> np.ndarray:
    A = np.asarray(A, dtype=complex)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {A.shape}")
    return A


def hermitian(A) -> np.ndarray:
    """Return the Hermitian part ``(A + A^*)/2`` as a complex array."""
    A = _square(A)
    return (A + A.conj().T) / 2


def same_shape(*mats) -> int:
    n = mats[0].shape[0]
    for M in mats[1:]:
        if M.shape != mats[0].shape:
            raise DimensionMismatch(f"shapes {mats[0].shape} and {M.shape} differ")
    return n


def posdef(A) -> np.ndarray:
    """Symmetrize ``A`` and check that it is positive definite.

    Rejects matrices whose smallest eigenvalue is at most
    ``EPS_PD`` times the largest.
    """
    H = hermitian(A)
    lam = np.linalg.eigvalsh(H)
    if not np.all(np.isfinite(lam)):
        raise NotPositiveDefinite("matrix has non-finite entries")
    if lam[-1] <= 0 or lam[0] <= EPS_PD * lam[-1]:
        raise NotPositiveDefinite(
            f"eigenvalue range [{lam[0]:.3e}, {lam[-1]:.3e}] is not positive definite"
        )
    return H


def jacobi_eigh(A, tol: float = 1e-13, max_sweeps: int = 60) -> EigenDecomposition:
    """Cyclic Jacobi eigensolver for Hermitian matrices.

    Each rotation zeroes one off-diagonal pair ``(p, q)`` using the
    phase-adjusted real rotation. Sweeps run row-cyclically until the
    off-diagonal Frobenius norm drops below ``tol * ||A||_F``.
    """
    A = hermitian(A).copy()
    n = A.shape[0]
    V = np.eye(n, dtype=complex)
    scale = np.linalg.norm(A)
    if scale == 0.0:
        return EigenDecomposition(np.zeros(n), V)

    def off(M):
        return float(np.linalg.norm(M - np.diag(np.diag(M))))

    for _ in range(max_sweeps):
        if off(A) <= tol * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                mag = abs(apq)
                if mag <= 1e-300:
                    continue
                phase = apq / mag
                app, aqq = A[p, p].real, A[q, q].real
                theta = (aqq - app) / (2.0 * mag)
                t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                # J = diag(1, conj(phase)) @ [[c, s], [-s, c]]
                J = np.array([[c, s], [-s * phase.conjugate(), c * phase.conjugate()]])
                idx = [p, q]
                A[:, idx] = A[:, idx] @ J
                A[idx, :] = J.conj().T @ A[idx, :]
                A[p, q] = A[q, p] = 0.0
                A[p, p], A[q, q] = A[p, p].real, A[q, q].real
                V[:, idx] = V[:, idx] @ J
    else:
        if off(A) > tol * scale:
            raise NoConvergence(f"Jacobi did not converge in {max_sweeps} sweeps")

    lam = np.diag(A).real
    order = np.argsort(lam, kind="stable")
    return EigenDecomposition(lam[order], V[:, order])


def eigh(A, method: str = "lapack") -> EigenDecomposition:
    """Eigendecomposition of a Hermitian matrix, eigenvalues ascending.

    ``method="lapack"`` calls :func:`numpy.linalg.eigh`;
    ``method="jacobi"`` uses :func:`jacobi_eigh`.
    """
    if method == "jacobi":
        return jacobi_eigh(A)
    if method != "lapack":
        raise ValueError(f"unknown method {method!r}")
    lam, U = np.linalg.eigh(hermitian(A))
    return EigenDecomposition(lam, U)


def _check_positive(lam: np.ndarray):
    if lam[0] <= 0 or lam[0] <= EPS_PD * lam[-1]:
        raise DomainError(f"function needs a positive spectrum, smallest eigenvalue {lam[0]:.3e}")


def matrix_fn(A, f: ScalarFn, positive: bool = False) -> np.ndarray:
    """Apply a real scalar function to a Hermitian matrix through its spectrum.

    Set ``positive=True`` for functions defined only on ``(0, inf)``
    (logarithm, non-integer powers); a non-positive spectrum then raises
    :class:`DomainError`.
    """
    eig = eigh(A)
    if positive:
        _check_positive(eig.eigenvalues)
    return eig.apply(f)


def expm(A) -> np.ndarray:
    return matrix_fn(A, np.exp)


def logm(A) -> np.ndarray:
    return matrix_fn(A, np.log, positive=True)


def powm(A, t: float) -> np.ndarray:
    if float(t).is_integer():
        return matrix_fn(A, lambda lam: lam**t)
    return matrix_fn(A, lambda lam: lam**t, positive=True)


def sqrtm(A) -> np.ndarray:
    return matrix_fn(A, np.sqrt, positive=True)


def invsqrtm(A) -> np.ndarray:
    return matrix_fn(A, lambda lam: lam**-0.5, positive=True)


def spectral_norm_p(values: np.ndarray, p) -> float:
    """Schatten-type norm of a vector of eigen- or singular values."""
    p = as_schatten(p).p
    a = np.abs(np.asarray(values, dtype=float))
    if a.size == 0:
        return 0.0
    m = float(a.max())
    if m == 0.0 or math.isinf(p):
        return m
    if p == 1.0:
        return float(a.sum())
    return m * float(np.sum((a / m) ** p)) ** (1.0 / p)


def schatten_norm(A, p, hermitian_input: bool = True) -> float:
    """Schatten-p norm ``(sum |lambda_i|^p)^(1/p)``; ``p = inf`` is the operator norm.

    With ``hermitian_input=False`` the singular values of a general square
    matrix are used instead of eigenvalues.
    """
    if hermitian_input:
        vals = np.linalg.eigvalsh(hermitian(A))
    else:
        vals = np.linalg.svd(_square(A), compute_uv=False)
    return spectral_norm_p(vals, p)


def polar(g) -> tuple[np.ndarray, np.ndarray]:
    """Polar decomposition ``g = exp(w) u`` with ``w = ln(g g^*)/2`` Hermitian."""
    g = _square(g)
    W, sig, Vh = np.linalg.svd(g)
    if sig[-1] <= EPS_PD * sig[0]:
        raise Singular(f"singular values range [{sig[-1]:.3e}, {sig[0]:.3e}]")
    w = hermitian((W * np.log(sig)) @ W.conj().T)
    return w, W @ Vh


def commutator(v, w) -> np.ndarray:
    v, w = _square(v), _square(w)
    same_shape(v, w)
    return v @ w - w @ v


def double_ad(v, w) -> np.ndarray:
    """``[v, [v, w]]``, Hermitian for Hermitian ``v, w``."""
    return hermitian(commutator(v, commutator(v, w)))


def bch_curvature_term(v, w) -> np.ndarray:
    """Third-order term ``(1/12) [v + w, [w, v]]`` of the distance expansion."""
    v, w = _square(v), _square(w)
    return hermitian(commutator(v + w, commutator(w, v)) / 12.0)


def sinhc(x):
    """``sinh(x)/x`` with the removable singularity at 0 filled in."""
    x = np.asarray(x, dtype=float)
    out = np.ones_like(x)
    big = np.abs(x) > 1e-4
    out[big] = np.sinh(x[big]) / x[big]
    xs = x[~big]
    out[~big] = 1.0 + xs * xs / 6.0 + xs**4 / 120.0
    return out


def ad_fn(v, w, f: ScalarFn) -> np.ndarray:
    """Evaluate ``f(ad v)(w)`` by Daleckii-Krein: multiply ``U^* w U`` entrywise
    by ``f(lambda_i - lambda_j)`` in the eigenbasis of ``v``.
    """
    v, w = hermitian(v), _square(w)
    same_shape(v, w)
    lam, U = eigh(v)
    gaps = lam[:, None] - lam[None, :]
    mult = np.asarray(f(gaps), dtype=float)
    if not np.all(np.isfinite(mult)):
        raise DomainError("f is not finite at every spectral gap of v")
    out = U @ (mult * (U.conj().T @ w @ U)) @ U.conj().T
    if np.allclose(mult, mult.T) and np.allclose(w, w.conj().T):
        return hermitian(out)
    return out


def entry_norm(A) -> float:
    """Largest absolute entry."""
    return float(np.max(np.abs(A))) if np.size(A) else 0.0
