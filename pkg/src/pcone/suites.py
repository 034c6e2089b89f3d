"""Randomized verification suites.

Each suite draws a fresh instance per trial from ``rng_for(seed, suite, trial)``
and returns one record per inequality it checks. A record passes when its gap
is at least ``-tolerance``; solver certificates carry a tolerance floor that
reflects the solver's own accuracy, and ``SuiteConfig.tol`` can only loosen it.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterator

import numpy as np

from .cone import Geodesic, TangentAt, congruence, distance, midpoint
from .convexopt import (
    ConvexSubmanifold,
    best_approximation,
    circumcenter,
    moreau_yoshida_resolvent,
)
from .errors import UnknownSuite
from .io import csv_text, dumps_json
from .linalg import SchattenP, as_schatten, hermitian, schatten_norm
from .metricprops import (
    GapReport,
    birkhoff_gap,
    convexity_constant_estimate,
    curvature_estimate,
    curvature_limit,
    emi_gap,
    geodesic_convexity_gap,
    inputs_digest,
    loewner_heinz_gap,
    pparallelogram_gap,
    bch_distance_remainder,
)
from .sampling import (
    random_commuting_pair,
    random_hermitian,
    random_invertible,
    random_posdef,
    random_tangent,
    random_unitary,
    rng_for,
)
from .splitting import (
    BlockPartition,
    block_basis,
    conditional_expectation,
    cpr_factorize,
    expectation_norm_estimate,
    is_lie_triple,
    is_reductive,
    offblock_basis,
)

SUITES = (
    "emi",
    "parallelogram",
    "convexity",
    "loewner-heinz",
    "curvature",
    "bch",
    "birkhoff",
    "bestapprox",
    "circumcenter",
    "moreau-yoshida",
    "cpr",
    "expectation-norms",
    "lie-triple",
)

DEFAULT_P = {
    "emi": ("1", "1.5", "2", "3", "inf"),
    "parallelogram": ("2", "3", "4"),
    "convexity": ("1", "2", "inf"),
    "loewner-heinz": ("1", "2", "3", "inf"),
    "curvature": ("2",),
    "bch": ("2",),
    "birkhoff": ("2",),
    "bestapprox": ("2",),
    "circumcenter": ("2",),
    "moreau-yoshida": ("2",),
    "cpr": ("2", "3"),
    "expectation-norms": ("1", "1.5", "2", "3", "4", "inf"),
    "lie-triple": ("2",),
}


@dataclass(frozen=True)
class SuiteConfig:
    seed: int = 42
    n: int = 4
    trials: int = 100
    p_values: tuple[SchattenP, ...] | None = None
    tol: float = 1e-9
    suites: tuple[str, ...] = SUITES
    trace: bool = False

    def __post_init__(self):
        if not self.tol >= 0:
            raise ValueError(f"tol must be nonnegative, got {self.tol}")
        if self.n < 2:
            raise ValueError("n must be at least 2")
        if self.trials < 0:
            raise ValueError("trials must be nonnegative")
        for s in self.suites:
            if s not in SUITES:
                raise UnknownSuite(s)
        if self.p_values is not None:
            object.__setattr__(self, "p_values", tuple(as_schatten(p) for p in self.p_values))

    def ps(self, suite: str, allowed: Callable[[SchattenP], bool] = lambda p: True) -> list[SchattenP]:
        if self.p_values is None:
            return [as_schatten(p) for p in DEFAULT_P[suite]]
        return [p for p in self.p_values if allowed(p)]


@dataclass
class Trial:
    """Records and solver traces produced by one trial."""

    suite: str
    index: int
    tol: float
    records: list[dict] = field(default_factory=list)
    traces: list[tuple] = field(default_factory=list)

    def add(self, name: str, gap: float, floor: float, *inputs) -> None:
        rep = GapReport(name, float(gap), inputs_digest(*inputs), max(self.tol, floor))
        self.records.append({"suite": self.suite, "trial": self.index, **rep.to_dict()})

    def trace_list(self, solver: str) -> list:
        rows: list = []
        self.traces.append((solver, rows))
        return rows


def _real_p(p: SchattenP, lo: float = 1.0) -> bool:
    return p.is_strictly_convex and p.p >= lo


def _suite_emi(t: Trial, rng, n, cfg):
    x = random_posdef(rng, n, 1.5)
    v, w = random_tangent(rng, x, 1.0), random_tangent(rng, x, 1.0)
    a, b = random_commuting_pair(rng, n)
    for p in cfg.ps("emi"):
        t.add(f"emi[p={p}]", emi_gap(x, v, w, p), 0.0, x, v.u, w.u)
        # equality when the pulled-back directions commute
        eq = emi_gap(np.eye(n, dtype=complex), TangentAt(np.eye(n), a), TangentAt(np.eye(n), b), p)
        t.add(f"emi-commuting[p={p}]", -abs(eq), 1e-8, a, b)


def _suite_parallelogram(t: Trial, rng, n, cfg):
    x, y, z = (random_posdef(rng, n, 1.5) for _ in range(3))
    for p in cfg.ps("parallelogram", lambda p: _real_p(p, 2.0)):
        t.add(f"parallelogram[p={p}]", pparallelogram_gap(x, y, z, p), 0.0, x, y, z)
        K = convexity_constant_estimate(p, n, 100, seed=int(rng.integers(2**31)))
        t.add(f"convexity-constant[p={p}]", 1.0 - K, 1e-6, x)


def _suite_convexity(t: Trial, rng, n, cfg):
    a, b, c, d = (random_posdef(rng, n, 1.5) for _ in range(4))
    g1, g2 = Geodesic(a, b), Geodesic(c, d)
    for p in cfg.ps("convexity"):
        t.add(f"convexity[p={p}]", geodesic_convexity_gap(g1, g2, p), 0.0, a, b, c, d)


def _suite_loewner_heinz(t: Trial, rng, n, cfg):
    a, b = random_posdef(rng, n, 1.5), random_posdef(rng, n, 1.5)
    for p in cfg.ps("loewner-heinz"):
        for s in (0.25, 0.5, 0.75):
            t.add(f"loewner-heinz[p={p},t={s}]", loewner_heinz_gap(a, b, s, p), 0.0, a, b)


def _suite_curvature(t: Trial, rng, n, cfg):
    x = random_posdef(rng, n, 1.0)
    v, w = random_tangent(rng, x, 1.0), random_tangent(rng, x, 1.0)
    ca, cb = random_commuting_pair(rng, n)
    eye = np.eye(n, dtype=complex)
    for p in cfg.ps("curvature", lambda p: _real_p(p)):
        t.add(f"curvature-sign[p={p}]", -curvature_estimate(x, v, w, 0.1, p), 0.0, x, v.u, w.u)
        lim = curvature_limit(x, v, w, p)
        t.add(f"curvature-lower[p={p}]", lim.s - lim.lower_bound, 1e-4, x, v.u, w.u)
        t.add(f"curvature-upper[p={p}]", -lim.s, 1e-6, x, v.u, w.u)
        flat = curvature_limit(eye, TangentAt(eye, ca), TangentAt(eye, cb), p)
        t.add(f"curvature-flat[p={p}]", -abs(flat.s), 1e-6, ca, cb)


def _suite_bch(t: Trial, rng, n, cfg):
    v, w = random_hermitian(rng, n, 1.0), random_hermitian(rng, n, 1.0)
    for p in cfg.ps("bch", lambda p: _real_p(p)):
        r1 = bch_distance_remainder(v, w, 1e-2, p)
        r2 = bch_distance_remainder(v, w, 5e-3, p)
        ratio = r1 / r2 if r2 > 0 else math.inf
        t.add(f"bch-halving[p={p}]", ratio - 0.8 * 8.0, 0.0, v, w)


def _suite_birkhoff(t: Trial, rng, n, cfg):
    v = random_hermitian(rng, n, 1.0)
    k = int(rng.integers(1, n + 1))
    S = [random_hermitian(rng, n, 1.0) for _ in range(k)]
    B = np.array([s.ravel() for s in S])
    # Frobenius-orthogonal residual of v against span S (real coefficients)
    G = (B.conj() @ B.T).real
    c = np.linalg.solve(G, (B.conj() @ v.ravel()).real)
    resid = v - np.tensordot(c, np.array(S), 1)
    exact = float(np.linalg.norm(resid) - np.linalg.norm(v))
    for p in cfg.ps("birkhoff", lambda p: p.p == 2.0):
        gap = birkhoff_gap(v, S, p)
        t.add(f"birkhoff-value[p={p}]", -abs(gap - exact), 1e-8, v, *S)
        t.add(f"birkhoff-orthogonal[p={p}]", birkhoff_gap(resid, S, p), 1e-9, resid, *S)


def _suite_bestapprox(t: Trial, rng, n, cfg):
    C = ConvexSubmanifold.diagonal(n)
    x, y = random_posdef(rng, n, 1.5), random_posdef(rng, n, 1.5)
    for p in cfg.ps("bestapprox", lambda p: _real_p(p)):
        tr = t.trace_list(f"bestapprox[p={p}]") if cfg.trace else None
        rx = best_approximation(x, C, p, trace=tr)
        ry = best_approximation(y, C, p)
        t.add(f"bestapprox-orthogonal[p={p}]", rx.first_order_gap, 1e-6, x)
        probes = rx.coefficients + rng.standard_normal((100, n)) * 10.0 ** rng.uniform(-4, 0, (100, 1))
        best_probe = min(distance(x, C.point(z), p) for z in probes)
        t.add(f"bestapprox-probe[p={p}]", best_probe - rx.value, 1e-9, x)
        again = best_approximation(x, C, p, init=rng.standard_normal(n))
        t.add(f"bestapprox-unique[p={p}]", -distance(again.point, rx.point, 2), 1e-5, x)
        t.add(
            f"bestapprox-contractive[p={p}]",
            distance(x, y, p) - distance(rx.point, ry.point, p),
            1e-6,
            x,
            y,
        )


def _suite_circumcenter(t: Trial, rng, n, cfg):
    a, b = random_posdef(rng, n, 1.5), random_posdef(rng, n, 1.5)
    S = [random_posdef(rng, n, 1.5) for _ in range(3)]
    g = random_invertible(rng, n, 1e2)
    for p in cfg.ps("circumcenter", lambda p: _real_p(p, 2.0)):
        two = circumcenter([a, b], p)
        t.add(f"circumcenter-midpoint[p={p}]", -distance(two.center, midpoint(a, b), p), 1e-6, a, b)
        tr = t.trace_list(f"circumcenter[p={p}]") if cfg.trace else None
        cc = circumcenter(S, p, trace=tr)
        diam = max(distance(s1, s2, p) for s1 in S for s2 in S)
        t.add(f"circumcenter-radius[p={p}]", cc.radius - 0.5 * diam, 1e-6, *S)
        moved = circumcenter([congruence(g, s) for s in reversed(S)], p)
        t.add(
            f"circumcenter-invariant[p={p}]",
            -distance(congruence(g, cc.center), moved.center, p),
            1e-6,
            g,
            *S,
        )


def _suite_moreau_yoshida(t: Trial, rng, n, cfg):
    x0, c = random_posdef(rng, n, 1.0), random_posdef(rng, n, 1.0)
    lam = float(10.0 ** rng.uniform(0, 2))
    for p in cfg.ps("moreau-yoshida", lambda p: _real_p(p, 2.0)):
        q = p.p

        def F(y):
            return distance(y, c, p) ** q

        tr = t.trace_list(f"moreau-yoshida[p={p}]") if cfg.trace else None
        res = moreau_yoshida_resolvent(F, x0, lam, p, trace=tr)
        r = lam ** (1.0 / (q - 1.0))
        oracle = Geodesic(x0, c)(r / (1.0 + r))
        t.add(f"moreau-yoshida-oracle[p={p}]", -distance(res.point, oracle, p), 1e-6, x0, c)
        # the envelope is nondecreasing in lambda for F >= 0: the smaller
        # parameter evaluated at the same candidate cannot exceed the value
        smaller = 0.1 * lam * F(res.point) + distance(x0, res.point, p) ** q
        t.add(f"moreau-yoshida-monotone[p={p}]", res.value - smaller, 0.0, x0, c)


def _random_partition(rng, n: int) -> BlockPartition:
    perm = rng.permutation(n)
    cuts = sorted(rng.choice(np.arange(1, n), size=int(rng.integers(1, n)), replace=False))
    return BlockPartition(tuple(tuple(int(i) for i in b) for b in np.split(perm, cuts)))


def _suite_cpr(t: Trial, rng, n, cfg):
    g = random_invertible(rng, n)
    part = BlockPartition.diagonal(n) if t.index % 2 == 0 else _random_partition(rng, n)
    s0 = conditional_expectation(random_hermitian(rng, n, 1.0), part)
    C = ConvexSubmanifold.block_diagonal(part)
    for p in cfg.ps("cpr"):
        tr = t.trace_list(f"cpr[p={p},partition={part}]") if cfg.trace else None
        f = cpr_factorize(g, part, p, trace=tr)
        tag = f"[p={p}]"
        t.add("cpr-residual" + tag, -f.residual, 1e-8, g)
        t.add("cpr-expectation" + tag, -f.expectation_defect, 1e-8, g)
        t.add("cpr-unitary" + tag, -float(np.linalg.norm(f.u.conj().T @ f.u - np.eye(n), 2)), 1e-10, g)
        other = cpr_factorize(g, part, p, s0=s0)
        t.add("cpr-init" + tag, -distance(f.g_A @ f.g_A.conj().T, other.g_A @ other.g_A.conj().T, 2), 1e-6, g, s0)
        if p.p == 2.0:
            P = hermitian(g @ g.conj().T)
            half = 0.5 * best_approximation(P, C, 2).value
            t.add("cpr-split-distance" + tag, -abs(schatten_norm(f.v, 2) - half), 1e-4, g)


def _suite_expectation_norms(t: Trial, rng, n, cfg):
    part = _random_partition(rng, n)
    seed = int(rng.integers(2**31))
    for p in cfg.ps("expectation-norms"):
        ne, nome = expectation_norm_estimate(part, p, trials=200, seed=seed)
        tag = f"[p={p},partition={part}]"
        t.add("expectation-norm-upper" + tag, 1.0 - ne, 1e-9, np.eye(n))
        t.add("expectation-norm-lower" + tag, ne - 1.0, 1e-3, np.eye(n))
        expo = 1.0 if p.is_one or p.is_inf else abs(1.0 - 2.0 / p.p)
        t.add("complement-norm-upper" + tag, 2.0**expo - nome, 1e-6, np.eye(n))
        if p.p == 2.0:
            t.add("complement-norm-lower" + tag, nome - 1.0, 1e-3, np.eye(n))


def _suite_lie_triple(t: Trial, rng, n, cfg):
    part = _random_partition(rng, n)
    s, sp = block_basis(part), offblock_basis(part)
    lt = is_lie_triple(s, rtol=1e-10)
    t.add(f"lie-triple[partition={part}]", -lt.defect, 1e-10, *s)
    red = is_reductive(s, sp, rtol=1e-10)
    t.add(f"reductive[partition={part}]", -red.defect, 1e-10, *s)
    # rotating the complement breaks ad^2 invariance
    U = random_unitary(rng, n)
    rotated = [hermitian(U @ b @ U.conj().T) for b in sp]
    bad = is_reductive(s, rotated, rtol=1e-10)
    t.add(f"reductive-counterexample[partition={part}]", bad.defect - 1e-3, 0.0, U)


RUNNERS: dict[str, Callable] = {
    "emi": _suite_emi,
    "parallelogram": _suite_parallelogram,
    "convexity": _suite_convexity,
    "loewner-heinz": _suite_loewner_heinz,
    "curvature": _suite_curvature,
    "bch": _suite_bch,
    "birkhoff": _suite_birkhoff,
    "bestapprox": _suite_bestapprox,
    "circumcenter": _suite_circumcenter,
    "moreau-yoshida": _suite_moreau_yoshida,
    "cpr": _suite_cpr,
    "expectation-norms": _suite_expectation_norms,
    "lie-triple": _suite_lie_triple,
}


def run_trial(cfg: SuiteConfig, suite: str, index: int) -> Trial:
    if suite not in RUNNERS:
        raise UnknownSuite(suite)
    t = Trial(suite, index, cfg.tol)
    rng = rng_for(cfg.seed, SUITES.index(suite), index)
    RUNNERS[suite](t, rng, cfg.n, cfg)
    return t


def _threads() -> int:
    env = os.environ.get("PCONE_THREADS")
    if env:
        return max(1, int(env))
    return max(1, os.cpu_count() or 1)


def iter_trials(cfg: SuiteConfig, threads: int | None = None) -> Iterator[Trial]:
    """Trials of every requested suite, in (suite, index) order."""
    threads = _threads() if threads is None else threads
    jobs = [(s, i) for s in cfg.suites for i in range(cfg.trials)]
    if threads == 1:
        for s, i in jobs:
            yield run_trial(cfg, s, i)
        return
    with ThreadPoolExecutor(max_workers=threads) as pool:
        yield from pool.map(lambda job: run_trial(cfg, *job), jobs)


@dataclass
class Report:
    records: list[dict]
    summary: dict
    traces: list[tuple[str, int, str, list]]

    @property
    def passed(self) -> bool:
        return self.summary["pass"]

    def to_jsonl(self) -> str:
        lines = [dumps_json(r) for r in self.records]
        lines.append(dumps_json({"summary": self.summary}))
        return "\n".join(lines) + "\n"

    def to_csv(self) -> str:
        header = ["suite", "trial", "name", "gap", "inputs_digest", "tolerance_used", "pass"]
        rows = [[r[h] for h in header] for r in self.records]
        s = self.summary
        rows.append(["summary", s["trials"], "failed", s["failed"], "", s["checks"], s["pass"]])
        return csv_text(header, rows)

    def traces_csv(self) -> str:
        rows = [
            [suite, trial, solver, *row] for suite, trial, solver, rows_ in self.traces for row in rows_
        ]
        return csv_text(["suite", "trial", "solver", "iteration", "objective", "step"], rows)


def run_suite(cfg: SuiteConfig, threads: int | None = None) -> Report:
    records: list[dict] = []
    traces: list = []
    per_suite = {s: {"checks": 0, "failed": 0} for s in cfg.suites}
    for t in iter_trials(cfg, threads):
        records.extend(t.records)
        for solver, rows in t.traces:
            traces.append((t.suite, t.index, solver, [tuple(float(v) for v in r) for r in rows]))
        per_suite[t.suite]["checks"] += len(t.records)
        per_suite[t.suite]["failed"] += sum(not r["pass"] for r in t.records)
    failed = sum(v["failed"] for v in per_suite.values())
    summary = {
        "seed": cfg.seed,
        "n": cfg.n,
        "trials": cfg.trials,
        "tol": cfg.tol,
        "checks": len(records),
        "passed": len(records) - failed,
        "failed": failed,
        "pass": failed == 0,
        "suites": per_suite,
    }
    return Report(records, summary, traces)
