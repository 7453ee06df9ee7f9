"""One- and two-sample U-statistics computed from cached sign inner products."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np

from .core import KernelSpec, ScalingSpec, SignMatrix, centered_kernel


@dataclass(frozen=True, eq=False)
class GramCache:
    """Pairwise inner products G[i, j] = S_i^T S_j of a sign matrix."""

    G: np.ndarray
    scaling: ScalingSpec
    digest: str

    @property
    def n(self) -> int:
        return self.G.shape[0]


@dataclass(frozen=True, eq=False)
class GroupLabels:
    """Two-group assignment; entries of ``assignment`` are 1 or 2."""

    assignment: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.assignment).astype(np.int64).ravel()
        bad = ~np.isin(a, (1, 2))
        if bad.any():
            raise ValueError(f"group labels must be 1 or 2, found {np.unique(a[bad]).tolist()}")
        object.__setattr__(self, "assignment", a)
        if self.n1 < 2 or self.n2 < 2:
            raise ValueError(f"each group needs at least 2 members, got n1={self.n1}, n2={self.n2}")

    @classmethod
    def from_sizes(cls, n1: int, n2: int) -> "GroupLabels":
        return cls(np.r_[np.ones(n1, dtype=np.int64), np.full(n2, 2, dtype=np.int64)])

    @property
    def n(self) -> int:
        return self.assignment.size

    @property
    def n1(self) -> int:
        return int(np.count_nonzero(self.assignment == 1))

    @property
    def n2(self) -> int:
        return int(np.count_nonzero(self.assignment == 2))

    def indices(self):
        return np.flatnonzero(self.assignment == 1), np.flatnonzero(self.assignment == 2)


def _gram(S: np.ndarray) -> np.ndarray:
    # Coordinate-wise accumulation: every entry is summed over k in the same
    # order, so G is exactly symmetric, flips sign exactly when a row is
    # negated, and is permuted exactly when rows are permuted. BLAS gemm gives
    # none of these guarantees.
    n, p = S.shape
    G = np.zeros((n, n))
    for k in range(p):
        c = S[:, k]
        G += c[:, None] * c[None, :]
    return G


def build_gram(S: SignMatrix) -> GramCache:
    """Compute and cache all pairwise inner products of the sign vectors, O(n^2 p)."""
    values = np.ascontiguousarray(S.values, dtype=np.float64)
    h = hashlib.sha256(values.tobytes())
    h.update(f"{S.scaling.kind}:{S.threshold!r}".encode())
    return GramCache(_gram(values), S.scaling, h.hexdigest()[:16])


def _pair_means(values: np.ndarray) -> np.ndarray:
    """Row means of a (B, n_pairs) array; the single reduction used for every U-statistic."""
    values = np.ascontiguousarray(values)
    return values.sum(axis=1) / values.shape[1]


def one_sample_stat(gram: GramCache, kernel: KernelSpec) -> float:
    """Average of K(S_i, S_j) - K(0, 0) over all pairs i < j."""
    n = gram.n
    if n < 2:
        raise ValueError("one-sample statistic needs n >= 2")
    iu, ju = np.triu_indices(n, 1)
    kt = centered_kernel(gram.G[iu, ju], kernel)
    return float(_pair_means(kt[None, :])[0])


def _triu(m: int):
    return np.triu_indices(m, 1)


def _within_sum(Kt: np.ndarray, idx: np.ndarray, pairs) -> float:
    # gather into a fresh 1-D array: the reduction order must not depend on memory layout
    return Kt[idx[pairs[0]], idx[pairs[1]]].sum()


def _two_sample_from_centered(Kt: np.ndarray, idx1: np.ndarray, idx2: np.ndarray,
                              pairs1=None, pairs2=None) -> float:
    n1, n2 = idx1.size, idx2.size
    s11 = _within_sum(Kt, idx1, pairs1 if pairs1 is not None else _triu(n1))
    s22 = _within_sum(Kt, idx2, pairs2 if pairs2 is not None else _triu(n2))
    s12 = Kt[idx1[:, None], idx2[None, :]].ravel().sum()
    return float(2.0 * s11 / (n1 * (n1 - 1)) + 2.0 * s22 / (n2 * (n2 - 1)) - 2.0 * s12 / (n1 * n2))


def centered_gram(gram: GramCache, kernel: KernelSpec) -> np.ndarray:
    """K(S_i, S_j) - K(0, 0) for all pairs i != j, as an n x n matrix with a zero diagonal."""
    G = gram.G.copy()
    np.fill_diagonal(G, 0.0)
    Kt = centered_kernel(G, kernel)
    np.fill_diagonal(Kt, 0.0)
    return Kt


def two_sample_stat(gram: GramCache, labels: GroupLabels, kernel: KernelSpec) -> float:
    """Within-group pair means minus twice the between-group mean of the centered kernel."""
    if labels.n != gram.n:
        raise ValueError(f"labels have {labels.n} entries but the Gram cache has n={gram.n}")
    idx1, idx2 = labels.indices()
    return _two_sample_from_centered(centered_gram(gram, kernel), idx1, idx2)
