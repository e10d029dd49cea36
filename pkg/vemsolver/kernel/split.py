"""Memory kernel k(t) = t^{-α(t)}/Γ(1-α(t)) and its split k = β_{1-α0} + g̃.

g̃(t) = ∫_0^t ∂_z [t^{-α(z)}/Γ(1-α(z))] dz is evaluated from the chain-rule
integrand α'(z) t^{-α(z)} (ψ(1-α(z)) - ln t) / Γ(1-α(z)) with composite
Gauss-Legendre panels refined geometrically toward z = 0.
"""

import logging
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.interpolate import CubicSpline
from scipy.special import roots_jacobi

from vemsolver.errors import AccuracyError, DomainError
from vemsolver.kernel.exponent import ExponentFunction
from vemsolver.special.functions import digamma, rgamma

logger = logging.getLogger(__name__)

DEFAULT_QUAD_NODES = 32
DEFAULT_QUAD_PANELS = 4
DEFAULT_QUAD_TOLERANCE = 1e-10

TABLE_DECADES = 18
TABLE_POINTS_PER_DECADE = 100

CONVOLUTION_NODES = 32
CONVOLUTION_PANELS = 40


def _panel_rule(nodes: int, panels: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes/weights on [0, 1] over panels [0, 2^{1-P}], ..., [1/2, 1]."""
    x, w = leggauss(nodes)
    edges = np.concatenate(([0.0], 2.0 ** -np.arange(panels - 1, -1, -1, dtype=float)))
    left, right = edges[:-1, None], edges[1:, None]
    points = left + (right - left) * (x[None, :] + 1.0) / 2.0
    weights = (right - left) * w[None, :] / 2.0
    return points.ravel(), weights.ravel()


@dataclass(frozen=True)
class SplitKernel:
    exponent: ExponentFunction
    quad_nodes: int = DEFAULT_QUAD_NODES
    quad_tolerance: float = DEFAULT_QUAD_TOLERANCE
    quad_panels: int = DEFAULT_QUAD_PANELS

    def __post_init__(self):
        if self.quad_nodes < 4 or self.quad_nodes % 2:
            raise DomainError(f"quad_nodes must be an even number >= 4, got {self.quad_nodes}")
        if self.quad_panels < 1:
            raise DomainError(f"quad_panels must be >= 1, got {self.quad_panels}")
        if not self.quad_tolerance > 0.0:
            raise DomainError(f"quad_tolerance must be positive, got {self.quad_tolerance}")

    @classmethod
    def from_spec(cls, spec: str, horizon: float = 1.0, **options) -> "SplitKernel":
        return cls(ExponentFunction.parse(spec, horizon), **options)

    @property
    def horizon(self) -> float:
        return self.exponent.horizon

    @property
    def alpha0(self) -> float:
        return self.exponent.alpha0

    @property
    def has_perturbation(self) -> bool:
        return not self.exponent.is_constant

    @cached_property
    def _rules(self):
        return (
            _panel_rule(self.quad_nodes, self.quad_panels),
            _panel_rule(self.quad_nodes // 2, self.quad_panels),
        )

    @cached_property
    def _table(self) -> CubicSpline:
        """Spline of g̃(t)/t^{1-α0} in ln t."""
        t_max = self.horizon
        log_t = np.linspace(
            math.log(t_max) - TABLE_DECADES * math.log(10.0),
            math.log(t_max),
            TABLE_DECADES * TABLE_POINTS_PER_DECADE + 1,
        )
        t = np.exp(log_t)
        t[-1] = t_max
        scaled = gtilde(self, t) / t ** (1.0 - self.alpha0)
        logger.info("g̃ table for %s built on %d points", self.exponent.describe(), t.size)
        return CubicSpline(log_t, scaled)


def _times(kernel: SplitKernel, t, name: str) -> tuple[np.ndarray, bool]:
    arr = np.asarray(t, dtype=float)
    if np.any(~(arr > 0.0)):
        raise DomainError(f"{name} requires t > 0")
    if np.any(arr > kernel.horizon * (1.0 + 1e-12)):
        raise DomainError(f"{name} requires t <= T = {kernel.horizon}")
    return arr, arr.ndim == 0


def _unwrap(value: np.ndarray, scalar: bool):
    return float(value) if scalar else value


def beta_mu(mu: float, t):
    """Riemann-Liouville kernel β_μ(t) = t^{μ-1}/Γ(μ)."""
    if not mu > 0.0:
        raise DomainError(f"beta_mu requires mu > 0, got {mu}")
    arr = np.asarray(t, dtype=float)
    if np.any(~(arr > 0.0)):
        raise DomainError("beta_mu requires t > 0")
    out = arr ** (mu - 1.0) * rgamma(mu)
    return float(out) if arr.ndim == 0 else out


def kernel_eval(kernel: SplitKernel, t):
    """k(t) = t^{-α(t)}/Γ(1-α(t)) for 0 < t <= T."""
    arr, scalar = _times(kernel, t, "kernel_eval")
    a = kernel.exponent(arr)
    return _unwrap(arr ** (-a) * rgamma(1.0 - a), scalar)


def _gtilde_quadrature(kernel: SplitKernel, t: np.ndarray, rule) -> np.ndarray:
    fractions, weights = rule
    z = t[:, None] * fractions[None, :]
    a = kernel.exponent(z)
    slope = kernel.exponent.derivative(z)
    log_t = np.log(t)[:, None]
    integrand = slope * np.exp(-a * log_t) * (digamma(1.0 - a) - log_t) * rgamma(1.0 - a)
    return t * (integrand @ weights)


def gtilde(kernel: SplitKernel, t):
    """g̃(t) by quadrature in z; identically zero for a constant exponent."""
    arr, scalar = _times(kernel, t, "gtilde")
    if not kernel.has_perturbation:
        return _unwrap(np.zeros_like(arr), scalar)
    flat = arr.reshape(-1)
    fine_rule, coarse_rule = kernel._rules
    fine = _gtilde_quadrature(kernel, flat, fine_rule)
    coarse = _gtilde_quadrature(kernel, flat, coarse_rule)
    estimate = np.abs(fine - coarse)
    limit = kernel.quad_tolerance * np.maximum(1.0, np.abs(fine))
    if np.any(estimate > limit):
        worst = int(np.argmax(estimate / limit))
        raise AccuracyError(f"g̃ quadrature did not converge at t={flat[worst]:.6g}", float(estimate[worst]))
    return _unwrap(fine.reshape(arr.shape), scalar)


def gtilde_prime(kernel: SplitKernel, t):
    """dg̃/dt = k'(t) - β'_{1-α0}(t), both analytic."""
    arr, scalar = _times(kernel, t, "gtilde_prime")
    if not kernel.has_perturbation:
        return _unwrap(np.zeros_like(arr), scalar)
    a = kernel.exponent(arr)
    slope = kernel.exponent.derivative(arr)
    log_t = np.log(arr)
    k = arr ** (-a) * rgamma(1.0 - a)
    k_prime = k * (-slope * log_t - a / arr + slope * digamma(1.0 - a))
    a0 = kernel.alpha0
    beta_prime = -a0 * arr ** (-a0 - 1.0) * rgamma(1.0 - a0)
    return _unwrap(k_prime - beta_prime, scalar)


def gtilde_interpolated(kernel: SplitKernel, t):
    """Fast g̃ for t in [0, T] from the tabulated spline; g̃(0) = 0."""
    arr = np.asarray(t, dtype=float)
    if not kernel.has_perturbation:
        return np.zeros_like(arr)
    if np.any(arr < 0.0) or np.any(arr > kernel.horizon * (1.0 + 1e-12)):
        raise DomainError("gtilde_interpolated requires 0 <= t <= T")
    spline = kernel._table
    log_t0, log_t1 = spline.x[0], spline.x[1]
    out = np.zeros_like(arr)
    positive = arr > 0.0
    log_t = np.log(arr[positive])
    scaled = spline(np.maximum(log_t, log_t0))
    below = log_t < log_t0
    if np.any(below):
        # leading behaviour t^{1-α0}(A + B ln t) continues the table linearly in ln t
        y0, y1 = spline(log_t0), spline(log_t1)
        scaled[below] = y0 + (y1 - y0) / (log_t1 - log_t0) * (log_t[below] - log_t0)
    out[positive] = arr[positive] ** (1.0 - kernel.alpha0) * scaled
    return out


def gtilde_bound_ratios(kernel: SplitKernel, t) -> tuple[np.ndarray, np.ndarray]:
    """|g̃|/(t^{1-α0}(1+|ln t|)) and |g̃'|/(t^{-α0}(1+|ln t|)) on an array of times."""
    arr, _ = _times(kernel, np.atleast_1d(t), "gtilde_bound_ratios")
    weight = 1.0 + np.abs(np.log(arr))
    a0 = kernel.alpha0
    value_ratio = np.abs(gtilde(kernel, arr)) / (arr ** (1.0 - a0) * weight)
    slope_ratio = np.abs(gtilde_prime(kernel, arr)) / (arr ** (-a0) * weight)
    return value_ratio, slope_ratio


def kernel_convolution(kernel: SplitKernel, func, t) -> np.ndarray:
    """(k ∗ func)(t) for an array of t, with the t^{-α0} singularity integrated exactly.

    β-part: Gauss-Jacobi with weight (1-y)^{-α0}; g̃-part: Gauss-Legendre on panels
    refined geometrically toward the diagonal s = t.
    """
    arr = np.atleast_1d(np.asarray(t, dtype=float))
    a0 = kernel.alpha0
    y, w = roots_jacobi(CONVOLUTION_NODES, -a0, 0.0)
    s = arr[:, None] * (1.0 + y[None, :]) / 2.0
    out = (arr / 2.0) ** (1.0 - a0) * (func(s) @ w) * rgamma(1.0 - a0)
    if kernel.has_perturbation:
        fractions, weights = _panel_rule(16, CONVOLUTION_PANELS)
        r = arr[:, None] * fractions[None, :]
        values = gtilde_interpolated(kernel, r) * func(arr[:, None] - r)
        out = out + arr * (values @ weights)
    return out
