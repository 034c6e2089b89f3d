"""Seeded random instances.

Hermitian samples have i.i.d. standard normal real and imaginary parts and
are rescaled to operator norm 1, so exponentials stay well conditioned.
"""
from __future__ import annotations

import numpy as np

from .cone import TangentAt
from .linalg import expm, hermitian


def rng_for(seed: int, *keys: int) -> np.random.Generator:
    """Independent generator for one ``(seed, keys...)`` stream."""
    return np.random.default_rng(np.random.SeedSequence([int(seed) & (2**64 - 1), *keys]))


def random_complex(rng: np.random.Generator, n: int) -> np.ndarray:
    return rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))


def random_hermitian(rng: np.random.Generator, n: int, scale: float = 1.0) -> np.ndarray:
    H = hermitian(random_complex(rng, n))
    return scale * H / np.max(np.abs(np.linalg.eigvalsh(H)))


def random_posdef(rng: np.random.Generator, n: int, scale: float = 1.0) -> np.ndarray:
    return expm(random_hermitian(rng, n, scale))


def random_unitary(rng: np.random.Generator, n: int) -> np.ndarray:
    Q, R = np.linalg.qr(random_complex(rng, n))
    d = np.diag(R)
    return Q * (d / np.abs(d))


def random_invertible(rng: np.random.Generator, n: int, max_cond: float = 1e3) -> np.ndarray:
    while True:
        g = random_complex(rng, n) / np.sqrt(n)
        if np.linalg.cond(g) <= max_cond:
            return g


def random_tangent(rng: np.random.Generator, x: np.ndarray, scale: float = 1.0) -> TangentAt:
    """Tangent vector at ``x`` whose pull-back to the identity has operator norm ``scale``."""
    n = x.shape[0]
    lam, U = np.linalg.eigh(x)
    h = (U * np.sqrt(lam)) @ U.conj().T
    return TangentAt(x, h @ random_hermitian(rng, n, scale) @ h)


def random_commuting_pair(rng: np.random.Generator, n: int) -> tuple[np.ndarray, np.ndarray]:
    U = random_unitary(rng, n)
    a, b = rng.standard_normal(n), rng.standard_normal(n)
    a, b = a / np.max(np.abs(a)), b / np.max(np.abs(b))
    return hermitian((U * a) @ U.conj().T), hermitian((U * b) @ U.conj().T)
