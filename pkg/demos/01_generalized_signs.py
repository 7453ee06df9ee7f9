"""
Generalized signs and kernels
=============================

A generalized sign divides each observation by a scale function of itself.
The choice of norm decides which directions dominate after the transform.
"""

import numpy as np

from gsign import KernelSpec, ScalingSpec, centered_kernel, kernel_eval, scale_value, sign_transform

# %% Three norms of the same vector
x = np.array([3.0, -4.0, 0.0, 1.0])
for kind in ("l1", "l2", "linf"):
    print(f"{kind:>4}: D(x) = {scale_value(x, ScalingSpec(kind)):.4f}")

# %% Signs of a small data matrix
# Rows whose scale falls below the threshold become the zero vector. Here the
# threshold is fixed at 0.5 so the tiny second row is dropped.
X = np.array([[3.0, -4.0, 0.0, 1.0],
              [0.01, 0.02, 0.0, 0.0],
              [10.0, 10.0, 10.0, 10.0]])
for kind in ("l1", "l2", "linf"):
    S = sign_transform(X, ScalingSpec(kind, threshold=0.5))
    print(f"\n{kind} signs (active rows {S.active.tolist()}):")
    print(np.round(S.values, 4))

# The default threshold depends on the shape of the data: n^(-8/p).
S = sign_transform(np.random.default_rng(0).normal(size=(100, 300)), ScalingSpec("l2"))
print(f"\ndefault threshold for n=100, p=300: {S.threshold:.6f}")

# %% Kernels act on inner products
u = np.linspace(-1.0, 1.0, 5)
poly = KernelSpec("poly", a=1.0, b=3)
print("\nu          :", u)
print("(u + 1)^3  :", kernel_eval(u, poly))
print("centered   :", centered_kernel(u, poly))
