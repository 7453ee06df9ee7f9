"""Generalized multivariate sign tests for high-dimensional mean vectors."""

__version__ = "0.1.0"

from .core import (
    KernelOverflowError,
    KernelSpec,
    ScalingSpec,
    SignMatrix,
    as_data_matrix,
    centered_kernel,
    default_threshold,
    kernel_eval,
    kernel_grad1,
    scale_value,
    sign_transform,
)
from .resampling import (
    NullSample,
    TestResult,
    one_sample_test,
    permutation_masks,
    permutation_null,
    rademacher_null,
    rademacher_signs,
    randomization_pvalue,
    two_sample_test,
)
from .statistics import GramCache, GroupLabels, build_gram, one_sample_stat, two_sample_stat

__all__ = [
    "GramCache",
    "GroupLabels",
    "KernelOverflowError",
    "KernelSpec",
    "NullSample",
    "ScalingSpec",
    "SignMatrix",
    "TestResult",
    "as_data_matrix",
    "build_gram",
    "centered_kernel",
    "default_threshold",
    "kernel_eval",
    "kernel_grad1",
    "one_sample_stat",
    "one_sample_test",
    "permutation_masks",
    "permutation_null",
    "rademacher_null",
    "rademacher_signs",
    "randomization_pvalue",
    "scale_value",
    "sign_transform",
    "two_sample_stat",
    "two_sample_test",
]
