"""Randomization null distributions and p-values.

One-sample nulls flip the sign of each observation with an independent
Rademacher multiplier; two-sample nulls reassign group labels uniformly at
random. Both reuse the cached inner products, so each resample costs O(n^2)
after the O(n^2 p) Gram computation.

Resample streams come from a Philox (counter-based) generator seeded with the
caller's seed: resample ``b`` always uses row ``b`` of the same draw, which
makes the null sample independent of chunking or worker count.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import KernelSpec, ScalingSpec, centered_kernel, sign_transform
from .statistics import (
    GramCache,
    GroupLabels,
    _pair_means,
    _two_sample_from_centered,
    build_gram,
    centered_gram,
    one_sample_stat,
    two_sample_stat,
)

RADEMACHER = "rademacher_flip"
PERMUTATION = "label_permutation"

# resamples evaluated per vectorized block in rademacher_null
_CHUNK = 256


def make_rng(seed) -> np.random.Generator:
    """Philox generator for an integer seed or a SeedSequence."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.Generator(np.random.Philox(seed))


@dataclass(frozen=True, eq=False)
class NullSample:
    statistics: np.ndarray
    seed: int
    method: str

    @property
    def B(self) -> int:
        return self.statistics.size


@dataclass(frozen=True, eq=False)
class TestResult:
    statistic: float
    p_value: float
    null: NullSample
    alpha: float
    reject: bool
    info: dict = field(default_factory=dict)

    __test__ = False  # keep pytest from collecting this class

    def to_dict(self) -> dict:
        return {
            "statistic": self.statistic,
            "p_value": self.p_value,
            "B": self.null.B,
            "seed": self.null.seed,
            "method": self.null.method,
            "alpha": self.alpha,
            "reject": self.reject,
        }


def rademacher_signs(n: int, B: int, seed) -> np.ndarray:
    """The (B, n) matrix of +/-1 multipliers used by :func:`rademacher_null`."""
    rng = make_rng(seed)
    bits = rng.integers(0, 2, size=(B, n), dtype=np.int8)
    return (2 * bits - 1).astype(np.int8)


def permutation_masks(n: int, n1: int, B: int, seed) -> np.ndarray:
    """(B, n) boolean matrix; row b marks the n1 observations drawn into group 1."""
    rng = make_rng(seed)
    order = rng.permuted(np.tile(np.arange(n), (B, 1)), axis=1)
    masks = np.zeros((B, n), dtype=bool)
    np.put_along_axis(masks, order[:, :n1], True, axis=1)
    return masks


def rademacher_null(gram: GramCache, kernel: KernelSpec, B: int, seed) -> NullSample:
    """Null statistics from sign-flipped samples alpha_i S_i, using only the cached G."""
    if B < 1:
        raise ValueError(f"B must be >= 1, got {B}")
    if not gram.scaling.is_even:
        raise ValueError("sign-flip fast path requires an even scaling function")
    n = gram.n
    iu, ju = np.triu_indices(n, 1)
    g = gram.G[iu, ju]
    # alpha_i alpha_j G_ij is exactly +G_ij or -G_ij, so two kernel tables suffice
    k_plus = centered_kernel(g, kernel)
    k_minus = centered_kernel(-g, kernel)
    alphas = rademacher_signs(n, B, seed)
    out = np.empty(B)
    for start in range(0, B, _CHUNK):
        a = alphas[start:start + _CHUNK]
        same = a[:, iu] == a[:, ju]
        out[start:start + a.shape[0]] = _pair_means(np.where(same, k_plus, k_minus))
    return NullSample(out, _seed_record(seed), RADEMACHER)


def permutation_null(gram: GramCache, labels: GroupLabels, kernel: KernelSpec, B: int, seed) -> NullSample:
    """Null statistics from uniformly redrawn group-1 subsets of size n1."""
    if B < 1:
        raise ValueError(f"B must be >= 1, got {B}")
    if labels.n != gram.n:
        raise ValueError(f"labels have {labels.n} entries but the Gram cache has n={gram.n}")
    Kt = centered_gram(gram, kernel)
    masks = permutation_masks(gram.n, labels.n1, B, seed)
    pairs1, pairs2 = np.triu_indices(labels.n1, 1), np.triu_indices(labels.n2, 1)
    out = np.empty(B)
    for b, m in enumerate(masks):
        out[b] = _two_sample_from_centered(Kt, np.flatnonzero(m), np.flatnonzero(~m), pairs1, pairs2)
    return NullSample(out, _seed_record(seed), PERMUTATION)


def _seed_record(seed):
    if isinstance(seed, (int, np.integer)):
        return int(seed)
    if isinstance(seed, np.random.SeedSequence):
        return seed.entropy
    return None


def randomization_pvalue(T: float, null: NullSample, alpha: float = 0.05) -> TestResult:
    """(1 + #{T*_b >= T}) / (B + 1); ties count as exceedances. Reject when p <= alpha."""
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    stats = np.asarray(null.statistics)
    exceed = int(np.count_nonzero(stats >= T))
    p = (1.0 + exceed) / (stats.size + 1.0)
    return TestResult(float(T), p, null, float(alpha), bool(p <= alpha))


def one_sample_test(X, scaling: ScalingSpec = ScalingSpec(), kernel: KernelSpec = KernelSpec(),
                    B: int = 1000, alpha: float = 0.05, seed=0) -> TestResult:
    """Test H0: mu = 0. Subtract mu0 from the rows beforehand to test mu = mu0."""
    S = sign_transform(X, scaling)
    gram = build_gram(S)
    T = one_sample_stat(gram, kernel)
    res = randomization_pvalue(T, rademacher_null(gram, kernel, B, seed), alpha)
    res.info.update(n=S.n, p=S.p, threshold=S.threshold, active=int(S.active.sum()))
    return res


def two_sample_test(X, labels: GroupLabels, scaling: ScalingSpec = ScalingSpec(),
                    kernel: KernelSpec = KernelSpec(), B: int = 1000, alpha: float = 0.05,
                    seed=0) -> TestResult:
    """Test H0: mu_1 = mu_2 with a single pooled sign transform."""
    if not isinstance(labels, GroupLabels):
        labels = GroupLabels(labels)
    S = sign_transform(X, scaling)
    if labels.n != S.n:
        raise ValueError(f"labels have {labels.n} entries but data has n={S.n}")
    gram = build_gram(S)
    T = two_sample_stat(gram, labels, kernel)
    res = randomization_pvalue(T, permutation_null(gram, labels, kernel, B, seed), alpha)
    res.info.update(n1=labels.n1, n2=labels.n2, p=S.p, threshold=S.threshold,
                    active=int(S.active.sum()))
    return res
