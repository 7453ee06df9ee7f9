"""Generalized sign transform, scaling functions and inner-product kernels."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

SCALING_KINDS = ("identity", "l1", "l2", "linf")
KERNEL_KINDS = ("linear", "poly")


class KernelOverflowError(OverflowError):
    """Raised when a kernel value is not representable as a 64-bit float."""


def as_data_matrix(X) -> np.ndarray:
    """Validate an observation matrix (rows are observations) and return it as float64."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise ValueError(f"data must be a 2-D matrix, got shape {X.shape}")
    n, p = X.shape
    if n < 2 or p < 1:
        raise ValueError(f"data needs n >= 2 and p >= 1, got n={n}, p={p}")
    if not np.all(np.isfinite(X)):
        raise ValueError("data contains NaN or infinite entries")
    return X


def default_threshold(n: int, p: int) -> float:
    """Return the vanishing threshold ``n ** (-8 / p)`` below which a row's sign is zeroed."""
    if n < 2 or p < 1:
        raise ValueError(f"need n >= 2 and p >= 1, got n={n}, p={p}")
    return float(n) ** (-8.0 / p)


@dataclass(frozen=True)
class ScalingSpec:
    """Choice of scaling function D and its threshold.

    ``threshold=None`` means "use :func:`default_threshold` for the data at hand".
    The identity kind has D(x) = 1 and never zeroes a row.
    """

    kind: str = "l2"
    threshold: Optional[float] = None

    def __post_init__(self):
        kind = self.kind.lower()
        if kind not in SCALING_KINDS:
            raise ValueError(f"unknown scaling kind {self.kind!r}; expected one of {SCALING_KINDS}")
        object.__setattr__(self, "kind", kind)
        if kind == "identity":
            object.__setattr__(self, "threshold", 0.0)
        elif self.threshold is not None:
            if not np.isfinite(self.threshold) or self.threshold < 0:
                raise ValueError(f"threshold must be a finite value >= 0, got {self.threshold}")
            object.__setattr__(self, "threshold", float(self.threshold))

    @property
    def is_even(self) -> bool:
        # D(-x) == D(x) for every supported kind; sign-flip resampling relies on it.
        return True

    def resolve_threshold(self, n: int, p: int) -> float:
        if self.threshold is None:
            return default_threshold(n, p)
        return self.threshold


@dataclass(frozen=True)
class KernelSpec:
    """Kernel evaluated through the inner product u = x^T y.

    ``linear`` is K(x, y) = u, ``poly`` is K(x, y) = (u + a) ** b.
    """

    kind: str = "linear"
    a: float = 0.0
    b: int = 1

    def __post_init__(self):
        kind = self.kind.lower()
        if kind in ("polynomial",):
            kind = "poly"
        if kind not in KERNEL_KINDS:
            raise ValueError(f"unknown kernel kind {self.kind!r}; expected one of {KERNEL_KINDS}")
        object.__setattr__(self, "kind", kind)
        if kind == "poly":
            if int(self.b) != self.b or self.b < 1:
                raise ValueError(f"polynomial degree b must be a positive integer, got {self.b}")
            if not np.isfinite(self.a) or self.a < 0:
                raise ValueError(f"polynomial offset a must be >= 0, got {self.a}")
            object.__setattr__(self, "a", float(self.a))
            object.__setattr__(self, "b", int(self.b))

    @property
    def label(self) -> str:
        if self.kind == "linear":
            return "linear"
        return f"poly(a={self.a:g},b={self.b})"


@dataclass(frozen=True, eq=False)
class SignMatrix:
    """Generalized sign vectors (one per row) plus the mask of rows with D(X_i) > threshold."""

    values: np.ndarray
    active: np.ndarray
    scaling: ScalingSpec
    threshold: float

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def p(self) -> int:
        return self.values.shape[1]


def _row_scale(X: np.ndarray, kind: str) -> np.ndarray:
    if kind == "identity":
        return np.ones(X.shape[0])
    absx = np.abs(X)
    if kind == "l1":
        return absx.sum(axis=1)
    m = absx.max(axis=1)
    if kind == "linf":
        return m
    # factor out the row maximum so squares neither underflow nor overflow
    safe = np.where(m > 0, m, 1.0)
    r = absx / safe[:, None]
    return m * np.sqrt((r * r).sum(axis=1))


def scale_value(x, spec: ScalingSpec) -> float:
    """D(x) for a single vector."""
    x = np.asarray(x, dtype=np.float64).reshape(1, -1)
    return float(_row_scale(x, spec.kind)[0])


def sign_transform(X, spec: ScalingSpec) -> SignMatrix:
    """Map every row X_i to X_i / D(X_i), or to the zero vector when D(X_i) <= threshold."""
    X = as_data_matrix(X)
    n, p = X.shape
    if spec.kind == "identity":
        return SignMatrix(X.copy(), np.ones(n, dtype=bool), spec, 0.0)
    eps = spec.resolve_threshold(n, p)
    d = _row_scale(X, spec.kind)
    active = d > eps
    S = np.zeros_like(X)
    S[active] = X[active] / d[active, None]
    return SignMatrix(S, active, spec, eps)


def kernel_eval(u, spec: KernelSpec):
    """K as a function of the inner product; accepts scalars or arrays."""
    u = np.asarray(u, dtype=np.float64)
    if spec.kind == "linear":
        out = u.copy()
    else:
        with np.errstate(over="ignore", invalid="ignore"):
            out = np.power(u + spec.a, spec.b)
        if not np.all(np.isfinite(out)):
            raise KernelOverflowError(
                f"(u + {spec.a:g})^{spec.b} is not representable in float64 "
                f"(max |u + a| = {np.max(np.abs(u + spec.a)):.6g})"
            )
    return out if out.ndim else float(out)


def centered_kernel(u, spec: KernelSpec):
    """K(u) - K(0): the kernel with its value at the origin removed."""
    return kernel_eval(u, spec) - kernel_eval(0.0, spec)


def kernel_grad1(x, y, spec: KernelSpec) -> np.ndarray:
    """Analytic gradient of K(x, y) with respect to x."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape:
        raise ValueError(f"x and y must have the same shape, got {x.shape} and {y.shape}")
    if spec.kind == "linear":
        return y.copy()
    u = float(x @ y)
    if spec.b == 1:
        return y.copy()
    with np.errstate(over="ignore"):
        factor = spec.b * np.power(u + spec.a, spec.b - 1)
    if not np.isfinite(factor):
        raise KernelOverflowError(f"gradient factor b (u + a)^(b-1) overflows at u={u:.6g}")
    return factor * y
