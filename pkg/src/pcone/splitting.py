"""Block-diagonal conditional expectations and the factorization
``g = g_A exp(v) u``.

``g_A = exp(s)`` with ``s`` block-diagonal Hermitian, ``v`` Hermitian with
vanishing diagonal blocks, and ``u`` unitary.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np

from .errors import DimensionMismatch, NoConvergence, Singular
from .linalg import (
    EPS_PD,
    as_schatten,
    commutator,
    double_ad,
    eigh,
    entry_norm,
    hermitian,
    schatten_norm,
)
from .metricprops import check_basis


@dataclass(frozen=True)
class BlockPartition:
    """Ordered partition of ``{0, ..., n-1}`` into diagonal blocks."""

    blocks: tuple[tuple[int, ...], ...]
    n: int = field(init=False)

    def __post_init__(self):
        blocks = tuple(tuple(int(i) for i in b) for b in self.blocks)
        flat = [i for b in blocks for i in b]
        if any(len(b) == 0 for b in blocks):
            raise ValueError("blocks must be nonempty")
        if sorted(flat) != list(range(len(flat))):
            raise ValueError(f"blocks {blocks} are not a disjoint cover of 0..{len(flat) - 1}")
        object.__setattr__(self, "blocks", blocks)
        object.__setattr__(self, "n", len(flat))

    @classmethod
    def diagonal(cls, n: int) -> "BlockPartition":
        return cls(tuple((i,) for i in range(n)))

    @classmethod
    def parse(cls, text: str) -> "BlockPartition":
        """Parse ``"0,1|2,3"``."""
        try:
            return cls(tuple(tuple(int(i) for i in part.split(",")) for part in text.split("|")))
        except ValueError as exc:
            raise ValueError(f"bad partition {text!r}: {exc}") from None

    def __str__(self) -> str:
        return "|".join(",".join(str(i) for i in b) for b in self.blocks)

    @property
    def mask(self) -> np.ndarray:
        m = np.zeros((self.n, self.n), dtype=bool)
        for b in self.blocks:
            m[np.ix_(b, b)] = True
        return m

    def check(self, X: np.ndarray) -> None:
        if X.shape != (self.n, self.n):
            raise DimensionMismatch(f"partition of {self.n} vs matrix {X.shape}")


def conditional_expectation(X, part: BlockPartition) -> np.ndarray:
    """Compression to the diagonal blocks."""
    X = np.asarray(X, dtype=complex)
    part.check(X)
    return np.where(part.mask, X, 0.0)


def _herm_unit(n, i, j, kind):
    E = np.zeros((n, n), dtype=complex)
    if i == j:
        E[i, i] = 1.0
    elif kind == "re":
        E[i, j] = E[j, i] = 1 / math.sqrt(2)
    else:
        E[i, j], E[j, i] = 1j / math.sqrt(2), -1j / math.sqrt(2)
    return E


def hermitian_basis(n: int, mask: np.ndarray | None = None) -> list[np.ndarray]:
    """Trace-orthonormal basis of the Hermitian matrices supported on ``mask``."""
    if mask is None:
        mask = np.ones((n, n), dtype=bool)
    out = []
    for i in range(n):
        for j in range(i, n):
            if not mask[i, j]:
                continue
            if i == j:
                out.append(_herm_unit(n, i, i, "re"))
            else:
                out.append(_herm_unit(n, i, j, "re"))
                out.append(_herm_unit(n, i, j, "im"))
    return out


def block_basis(part: BlockPartition) -> list[np.ndarray]:
    return hermitian_basis(part.n, part.mask)


def offblock_basis(part: BlockPartition) -> list[np.ndarray]:
    return hermitian_basis(part.n, ~part.mask)


def projection_residual(X: np.ndarray, basis: Sequence[np.ndarray], gram: np.ndarray) -> float:
    """Frobenius distance from ``X`` to the real span of ``basis``."""
    if not basis:
        return float(np.linalg.norm(X))
    b = np.array([np.vdot(B, X).real for B in basis])
    c = np.linalg.solve(gram, b)
    return float(np.linalg.norm(X - np.tensordot(c, np.array(basis), 1)))


class StructureCheck(NamedTuple):
    passed: bool
    defect: float


def _scale(*bases) -> float:
    norms = [np.linalg.norm(b) for basis in bases for b in basis]
    return max([1.0] + norms) ** 3


def is_lie_triple(basis: Sequence[np.ndarray], rtol: float = 1e-9) -> StructureCheck:
    """Closure of ``span(basis)`` under ``[[v, w], s]``."""
    basis = [hermitian(b) for b in basis]
    if not basis:
        return StructureCheck(True, 0.0)
    G = check_basis(basis)
    defect = 0.0
    k = len(basis)
    for i in range(k):
        for j in range(i + 1, k):
            vw = commutator(basis[i], basis[j])
            for s in basis:
                X = hermitian(commutator(vw, s))
                defect = max(defect, projection_residual(X, basis, G))
    return StructureCheck(bool(defect <= rtol * _scale(basis)), float(defect))


def is_reductive(
    s_basis: Sequence[np.ndarray], sprime_basis: Sequence[np.ndarray], rtol: float = 1e-9
) -> StructureCheck:
    """Invariance of ``span(sprime_basis)`` under ``ad_s^2`` for ``s`` in ``span(s_basis)``.

    ``ad_s^2`` is quadratic in ``s``, so the polarized brackets
    ``[s_i, [s_j, t]] + [s_j, [s_i, t]]`` are checked as well.
    """
    s_basis = [hermitian(b) for b in s_basis]
    sprime_basis = [hermitian(b) for b in sprime_basis]
    if not sprime_basis:
        return StructureCheck(True, 0.0)
    check_basis(s_basis + sprime_basis)
    G = check_basis(sprime_basis)
    defect = 0.0
    for t in sprime_basis:
        for i, si in enumerate(s_basis):
            defect = max(defect, projection_residual(double_ad(si, t), sprime_basis, G))
            for sj in s_basis[i + 1:]:
                X = hermitian(commutator(si, commutator(sj, t)) + commutator(sj, commutator(si, t)))
                defect = max(defect, projection_residual(X, sprime_basis, G))
    return StructureCheck(bool(defect <= rtol * _scale(s_basis, sprime_basis)), float(defect))


@dataclass(frozen=True, eq=False)
class CprFactorization:
    g_A: np.ndarray
    v: np.ndarray
    u: np.ndarray
    s: np.ndarray
    residual: float
    expectation_defect: float
    iterations: int

    def to_dict(self) -> dict:
        from .io import matrix_obj

        return {
            "g_A": matrix_obj(self.g_A),
            "v": matrix_obj(self.v),
            "u": matrix_obj(self.u),
            "s": matrix_obj(self.s),
            "residual": self.residual,
        }


def _split_at(g: np.ndarray, s: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Polar factors of ``exp(-s) g = exp(v) u``; returns ``(exp(s), v, u)``."""
    eig = eigh(s)
    h = eig.apply(lambda lam: np.exp(-lam)) @ g
    W, sig, Vh = np.linalg.svd(h)
    v = hermitian((W * np.log(sig)) @ W.conj().T)
    return eig.apply(np.exp), v, W @ Vh


def cpr_factorize(
    g,
    part: BlockPartition,
    p=2,
    s0=None,
    tol: float = 1e-14,
    max_iter: int = 200,
    trace: list | None = None,
) -> CprFactorization:
    """Factor ``g = exp(s) exp(v) u`` with ``E(v) = 0``.

    Solves ``E(ln(e^{-s} g g^* e^{-s})) = 0`` by the damped fixed-point step
    ``s <- s + step * E(v)``; the step is halved whenever the residual
    ``||E(v)||_F`` grows. The factorization itself does not depend on ``p``,
    which only selects the norm reported in ``trace``.
    """
    g = np.asarray(g, dtype=complex)
    part.check(g)
    sig = np.linalg.svd(g, compute_uv=False)
    if sig[-1] <= EPS_PD * sig[0]:
        raise Singular("g is not invertible")
    sp = as_schatten(p)
    s = np.zeros_like(g) if s0 is None else conditional_expectation(hermitian(s0), part)
    gA, v, u = _split_at(g, s)
    ev = conditional_expectation(v, part)
    res = float(np.linalg.norm(ev))
    step = 0.5
    it = 0
    while res > tol * max(1.0, float(np.linalg.norm(v))):
        if it >= max_iter:
            raise NoConvergence(f"splitting residual {res:.3e} after {max_iter} iterations")
        it += 1
        s_new = hermitian(s + step * ev)
        gA_new, v_new, u_new = _split_at(g, s_new)
        ev_new = conditional_expectation(v_new, part)
        res_new = float(np.linalg.norm(ev_new))
        if res_new > res and step > 1e-6:
            step *= 0.5
            continue
        s, gA, v, u, ev, res = s_new, gA_new, v_new, u_new, ev_new, res_new
        if trace is not None:
            trace.append((it, schatten_norm(v, sp), res))
    recon = entry_norm(g - gA @ eigh(v).apply(np.exp) @ u) / entry_norm(g)
    return CprFactorization(gA, v, u, s, recon, entry_norm(conditional_expectation(v, part)), it)


def expectation_norm_estimate(
    part: BlockPartition, p, n: int | None = None, trials: int = 1000, seed: int = 0
) -> tuple[float, float]:
    """Sampled lower bounds for ``||E||_p`` and ``||1 - E||_p`` on complex matrices.

    Random matrices are supplemented by the fixed points of ``E`` and of
    ``1 - E``, which attain ratio 1; at ``p = 2`` a power iteration on the
    (self-adjoint) compressions refines both estimates.
    """
    n = part.n if n is None else n
    if n != part.n:
        raise DimensionMismatch(f"partition of {part.n} vs n = {n}")
    sp = as_schatten(p)
    rng = np.random.default_rng(seed)
    trials = max(int(trials), 1)
    X = rng.standard_normal((trials, n, n)) + 1j * rng.standard_normal((trials, n, n))
    mask = part.mask
    wit = rng.standard_normal((2, n, n)) + 1j * rng.standard_normal((2, n, n))
    wit[0] = np.where(mask, wit[0], 0.0)
    if (~mask).any():
        wit[1] = np.where(mask, 0.0, wit[1])
    X = np.concatenate([X, wit])
    EX = np.where(mask, X, 0.0)

    def norms(M):
        sv = np.linalg.svd(M, compute_uv=False)
        m = sv.max(axis=1)
        if sp.is_inf:
            return m
        safe = np.where(m > 0, m, 1.0)
        return m * np.sum((sv / safe[:, None]) ** sp.p, axis=1) ** (1 / sp.p)

    nx = norms(X)
    norm_e = float(np.max(norms(EX) / nx))
    norm_ome = float(np.max(norms(X - EX) / nx))
    if sp.p == 2.0:
        # E and 1 - E are orthogonal projections here: one power step from a
        # random start lands on a vector attaining the operator norm
        for k, proj in enumerate((lambda M: np.where(mask, M, 0.0), lambda M: np.where(mask, 0.0, M))):
            Y = proj(X[0])
            if np.linalg.norm(Y) > 0:
                r = float(np.linalg.norm(proj(Y)) / np.linalg.norm(Y))
                if k == 0:
                    norm_e = max(norm_e, r)
                else:
                    norm_ome = max(norm_ome, r)
    return norm_e, norm_ome
