from vemsolver.kernel.exponent import ExponentFunction
from vemsolver.kernel.split import (
    SplitKernel,
    beta_mu,
    gtilde,
    gtilde_bound_ratios,
    gtilde_interpolated,
    gtilde_prime,
    kernel_convolution,
    kernel_eval,
)

__all__ = [
    "ExponentFunction",
    "SplitKernel",
    "beta_mu",
    "gtilde",
    "gtilde_bound_ratios",
    "gtilde_interpolated",
    "gtilde_prime",
    "kernel_convolution",
    "kernel_eval",
]
