"""Synthetic scenarios and the Monte Carlo power/size engine.

Random streams are derived from ``SeedSequence(master_seed, spawn_key=...)``:
replicate r at grid point d uses spawn key ``(d, r)`` and oracle draw s uses
``(ORACLE_KEY, s)``. Every replicate is therefore reproducible on its own and
results do not depend on how replicates are spread over worker processes.
"""

from __future__ import annotations

import logging
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np

from .core import KernelSpec, ScalingSpec, sign_transform
from .resampling import (
    PERMUTATION,
    RADEMACHER,
    NullSample,
    make_rng,
    permutation_null,
    rademacher_null,
    randomization_pvalue,
)
from .statistics import GroupLabels, build_gram, one_sample_stat, two_sample_stat

log = logging.getLogger(__name__)

ORACLE_KEY = 2**31 - 1

# delta grids of the reference study, keyed by (design, covariance, mean)
DEFAULT_DELTAS = {
    ("one-sample", "AR", "dense"): [0.00, 0.02, 0.04, 0.06, 0.08, 0.10, 0.12],
    ("one-sample", "AR", "sparse"): [0.00, 0.15, 0.30, 0.45, 0.60, 0.75, 0.90],
    ("one-sample", "SAR", "dense"): [0.00, 0.10, 0.20, 0.30, 0.40, 0.50, 0.60],
    ("one-sample", "SAR", "sparse"): [0.00, 1.05, 2.10, 3.15, 4.20, 5.25, 6.30],
    ("two-sample", "AR", "dense"): [0.00, 0.03, 0.06, 0.09, 0.12, 0.15, 0.18],
    ("two-sample", "AR", "sparse"): [0.00, 3.00, 6.00, 9.00, 12.00, 15.00, 18.00],
    ("two-sample", "SAR", "dense"): [0.00, 0.03, 0.06, 0.09, 0.12, 0.15, 0.18],
    ("two-sample", "SAR", "sparse"): [0.00, 3.00, 6.00, 9.00, 12.00, 14.00, 16.00],
}


@dataclass(frozen=True)
class CovarianceSpec:
    kind: str = "AR"
    rho: float = 0.5
    spike_count: int = 5
    spike_value: Optional[float] = None  # None -> p + 1

    def __post_init__(self):
        kind = self.kind.upper()
        if kind not in ("AR", "SAR"):
            raise ValueError(f"covariance kind must be AR or SAR, got {self.kind!r}")
        object.__setattr__(self, "kind", kind)
        if not 0.0 < self.rho < 1.0:
            raise ValueError(f"rho must lie in (0, 1), got {self.rho}")
        if self.spike_count < 0:
            raise ValueError("spike_count must be >= 0")


@dataclass(frozen=True)
class MeanSpec:
    kind: str = "zero"
    delta: float = 0.0
    dense_fraction: float = 0.9

    def __post_init__(self):
        kind = self.kind.lower()
        if kind not in ("zero", "sparse", "dense"):
            raise ValueError(f"mean kind must be zero, sparse or dense, got {self.kind!r}")
        object.__setattr__(self, "kind", kind)
        if self.delta < 0:
            raise ValueError("delta must be >= 0")
        if not 0.0 < self.dense_fraction <= 1.0:
            raise ValueError("dense_fraction must lie in (0, 1]")

    def vector(self, p: int) -> np.ndarray:
        mu = np.zeros(p)
        pattern = np.array([0.5, 1.0, 1.5]) * self.delta
        if self.kind == "sparse":
            k = min(3, p)
            mu[:k] = pattern[:k]
        elif self.kind == "dense":
            k = int(np.floor(self.dense_fraction * p))
            mu[:k] = np.resize(pattern, k)
        return mu


@dataclass(frozen=True)
class TestConfig:
    scaling: ScalingSpec = ScalingSpec("l2")
    kernel: KernelSpec = KernelSpec("linear")

    __test__ = False

    @property
    def label(self) -> str:
        return f"{self.scaling.kind}/{self.kernel.label}"


@dataclass(frozen=True)
class ScenarioSpec:
    """A generative model plus the tests applied to each simulated dataset.

    One-sample designs draw ``n`` rows with mean ``mean``; two-sample designs
    draw ``n1`` rows with mean 0 and ``n2`` rows with mean ``mean``.
    """

    design: str = "one-sample"
    distribution: str = "mvg"
    covariance: CovarianceSpec = CovarianceSpec()
    mean: MeanSpec = MeanSpec()
    p: int = 300
    n: int = 100
    n1: int = 60
    n2: int = 40
    tests: tuple = (TestConfig(),)
    B: int = 1000
    alpha: float = 0.05
    deltas: tuple = (0.0,)
    replications: int = 1000
    master_seed: int = 0
    t_unit_covariance: bool = False

    def __post_init__(self):
        design = self.design.lower()
        if design not in ("one-sample", "two-sample"):
            raise ValueError(f"design must be one-sample or two-sample, got {self.design!r}")
        object.__setattr__(self, "design", design)
        dist = self.distribution.lower()
        if dist not in ("mvg", "t3"):
            raise ValueError(f"distribution must be mvg or t3, got {self.distribution!r}")
        object.__setattr__(self, "distribution", dist)
        if self.p < 1:
            raise ValueError("p must be >= 1")
        if design == "one-sample" and self.n < 2:
            raise ValueError("one-sample design needs n >= 2")
        if design == "two-sample" and (self.n1 < 2 or self.n2 < 2):
            raise ValueError("two-sample design needs n1 >= 2 and n2 >= 2")
        if self.B < 1 or self.replications < 1:
            raise ValueError("B and replications must be positive")
        if not 0.0 < self.alpha < 1.0:
            raise ValueError("alpha must lie in (0, 1)")
        if not self.tests:
            raise ValueError("at least one test configuration is required")
        object.__setattr__(self, "tests", tuple(self.tests))
        object.__setattr__(self, "deltas", tuple(float(d) for d in self.deltas))

    @property
    def sample_size(self) -> int:
        return self.n if self.design == "one-sample" else self.n1 + self.n2


def build_covariance(spec: CovarianceSpec, p: int):
    """Return (Sigma, L) with L lower triangular and L L^T = Sigma."""
    if p < 1:
        raise ValueError("p must be >= 1")
    idx = np.arange(p)
    sigma = spec.rho ** np.abs(idx[:, None] - idx[None, :])
    if spec.kind == "SAR":
        spike = p + 1.0 if spec.spike_value is None else float(spec.spike_value)
        k = min(spec.spike_count, p)
        sigma[idx[:k], idx[:k]] = spike
    try:
        L = np.linalg.cholesky(sigma)
    except np.linalg.LinAlgError as exc:
        raise ValueError(f"covariance is not positive definite: {exc}") from None
    return sigma, L


def draw_sample(distribution: str, mean, L: np.ndarray, n: int, rng, t_unit_covariance: bool = False) -> np.ndarray:
    """Draw n rows from MVG(mean, L L^T) or a t3 law with the same mean.

    With ``t_unit_covariance`` the t3 scale matrix is L L^T / 3, so the
    covariance of each row is exactly L L^T; otherwise the scale is L L^T.
    """
    rng = make_rng(rng)
    p = L.shape[0]
    Z = rng.standard_normal((n, p)) @ L.T
    if distribution == "t3":
        W = rng.chisquare(3.0, size=n)
        mix = 1.0 / np.sqrt(W) if t_unit_covariance else np.sqrt(3.0 / W)
        Z *= mix[:, None]
    elif distribution != "mvg":
        raise ValueError(f"unknown distribution {distribution!r}")
    return Z + np.asarray(mean, dtype=np.float64)


def _draw_dataset(spec: ScenarioSpec, L: np.ndarray, delta: float, rng) -> np.ndarray:
    mu = replace(spec.mean, delta=delta).vector(spec.p)
    if spec.design == "one-sample":
        return draw_sample(spec.distribution, mu, L, spec.n, rng, spec.t_unit_covariance)
    Y1 = draw_sample(spec.distribution, np.zeros(spec.p), L, spec.n1, rng, spec.t_unit_covariance)
    Y2 = draw_sample(spec.distribution, mu, L, spec.n2, rng, spec.t_unit_covariance)
    return np.vstack([Y1, Y2])


def _statistics(spec: ScenarioSpec, X: np.ndarray, labels):
    """Observed statistic and Gram cache for every configured test (signs shared per scaling)."""
    grams = {}
    out = []
    for test in spec.tests:
        if test.scaling not in grams:
            grams[test.scaling] = build_gram(sign_transform(X, test.scaling))
        gram = grams[test.scaling]
        if labels is None:
            T = one_sample_stat(gram, test.kernel)
        else:
            T = two_sample_stat(gram, labels, test.kernel)
        out.append((T, gram))
    return out


def _labels(spec: ScenarioSpec):
    return None if spec.design == "one-sample" else GroupLabels.from_sizes(spec.n1, spec.n2)


def _replicate(args):
    spec, L, d_index, rep = args
    ss = np.random.SeedSequence(spec.master_seed, spawn_key=(d_index, rep))
    data_ss, null_ss = ss.spawn(2)
    X = _draw_dataset(spec, L, spec.deltas[d_index], make_rng(data_ss))
    labels = _labels(spec)
    seeds = null_ss.generate_state(len(spec.tests), dtype=np.uint64)
    stats, pvals = [], []
    for test, (T, gram), seed in zip(spec.tests, _statistics(spec, X, labels), seeds):
        if labels is None:
            null = rademacher_null(gram, test.kernel, spec.B, int(seed))
        else:
            null = permutation_null(gram, labels, test.kernel, spec.B, int(seed))
        stats.append(T)
        pvals.append(randomization_pvalue(T, null, spec.alpha).p_value)
    return d_index, rep, stats, pvals


def _oracle_draw(args):
    spec, L, s = args
    ss = np.random.SeedSequence(spec.master_seed, spawn_key=(ORACLE_KEY, s))
    X = _draw_dataset(spec, L, 0.0, make_rng(ss))
    return [T for T, _ in _statistics(spec, X, _labels(spec))]


def default_threads() -> int:
    env = os.environ.get("GSIGN_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def _run(fn, jobs, threads: int, progress: Optional[str] = None):
    total = len(jobs)
    step = max(1, total // 20)

    def report(i):
        if progress and (i % step == 0 or i == total):
            print(f"{progress}: {i}/{total}", file=sys.stderr, flush=True)

    if threads <= 1:
        out = []
        for i, job in enumerate(jobs, 1):
            out.append(fn(job))
            report(i)
        return out
    out = []
    with ProcessPoolExecutor(max_workers=threads) as pool:
        chunk = max(1, total // (threads * 8))
        for i, res in enumerate(pool.map(fn, jobs, chunksize=chunk), 1):
            out.append(res)
            report(i)
    return out


def oracle_null(spec: ScenarioSpec, S: int, threads: int = 1, progress: Optional[str] = None) -> list:
    """Statistics of S independent datasets drawn at delta = 0, one NullSample per test."""
    if S < 1:
        raise ValueError("S must be >= 1")
    _, L = build_covariance(spec.covariance, spec.p)
    draws = np.array(_run(_oracle_draw, [(spec, L, s) for s in range(S)], threads, progress))
    method = "oracle"
    return [NullSample(draws[:, k].copy(), spec.master_seed, method) for k in range(len(spec.tests))]


@dataclass
class PowerRow:
    test: str
    delta: float
    rejections: int
    replications: int
    on_rejections: Optional[int] = None

    @property
    def power(self) -> float:
        return self.rejections / self.replications

    @property
    def se(self) -> float:
        q = self.power
        return float(np.sqrt(q * (1 - q) / self.replications))

    @property
    def on_power(self) -> Optional[float]:
        if self.on_rejections is None:
            return None
        return self.on_rejections / self.replications

    @property
    def on_se(self) -> Optional[float]:
        q = self.on_power
        if q is None:
            return None
        return float(np.sqrt(q * (1 - q) / self.replications))


@dataclass
class PowerTable:
    rows: list = field(default_factory=list)

    def select(self, test: Optional[str] = None, delta: Optional[float] = None) -> list:
        return [r for r in self.rows
                if (test is None or r.test == test) and (delta is None or np.isclose(r.delta, delta))]

    def power(self, test: str, delta: float, oracle: bool = False) -> float:
        (row,) = self.select(test, delta)
        return row.on_power if oracle else row.power


def oracle_pvalue(T: float, oracle: NullSample) -> float:
    return (1.0 + np.count_nonzero(oracle.statistics >= T)) / (oracle.B + 1.0)


def power_study(spec: ScenarioSpec, oracle: Optional[Sequence[NullSample]] = None,
                threads: int = 1, progress: Optional[str] = None) -> PowerTable:
    """Rejection proportions of every configured test at every delta.

    With ``oracle`` (one NullSample per test, e.g. from :func:`oracle_null`)
    each replicate is also judged against the oracle null, giving an ON column
    next to the randomization (RN) column.
    """
    _, L = build_covariance(spec.covariance, spec.p)
    if oracle is not None and len(oracle) != len(spec.tests):
        raise ValueError("need exactly one oracle null sample per test")
    jobs = [(spec, L, d, r) for d in range(len(spec.deltas)) for r in range(spec.replications)]
    results = _run(_replicate, jobs, threads, progress)
    m = len(spec.tests)
    rn = np.zeros((len(spec.deltas), m), dtype=np.int64)
    on = np.zeros_like(rn)
    for d, _, stats, pvals in results:
        for k in range(m):
            rn[d, k] += pvals[k] <= spec.alpha
            if oracle is not None:
                on[d, k] += oracle_pvalue(stats[k], oracle[k]) <= spec.alpha
    table = PowerTable()
    for k, test in enumerate(spec.tests):
        for d, delta in enumerate(spec.deltas):
            table.rows.append(PowerRow(test.label, delta, int(rn[d, k]), spec.replications,
                                       int(on[d, k]) if oracle is not None else None))
    return table


def null_method(spec: ScenarioSpec) -> str:
    return RADEMACHER if spec.design == "one-sample" else PERMUTATION
