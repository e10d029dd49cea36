"""Product-integration weights for convolutions on a TimeGrid.

Every matrix W returned here is lower triangular of size (N+1)² and satisfies

    ∫_0^{t_n} K(t_n - s) v(s) ds ≈ Σ_j W[n, j] v(t_j)

for v interpolated piecewise linearly between the nodes. On the panel
[t_j, t_{j+1}] the substitution r = t_n - s maps to [a, b] with a = t_n - t_{j+1},
b = t_n - t_j, and the hat functions become (r - a)/h and (b - r)/h.
Matrices are cached per (kernel, grid) and returned read-only.
"""

import logging
from functools import lru_cache

import numpy as np
from numpy.polynomial.legendre import leggauss

from vemsolver.errors import DomainError
from vemsolver.kernel.split import SplitKernel, gtilde_interpolated
from vemsolver.modes.grid import TimeGrid
from vemsolver.special.functions import rgamma
from vemsolver.special.mittag_leffler import ml_table

logger = logging.getLogger(__name__)

SMOOTH_NODES = 8
RESOLVENT_NODES = 16
POWER_NODES = 16


def _unit_rule(nodes: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = leggauss(nodes)
    return (x + 1.0) / 2.0, w / 2.0


def _panels(grid: TimeGrid) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Row index n, panel index j < n, and the r-interval [a, b] of every panel."""
    t = grid.nodes
    rows, cols = np.tril_indices(grid.count + 1, -1)
    return rows, cols, t[rows] - t[cols + 1], t[rows] - t[cols]


def _assemble(grid: TimeGrid, rows, cols, left, right) -> np.ndarray:
    size = grid.count + 1
    matrix = np.zeros((size, size))
    # (row, col) pairs are unique within each assignment
    matrix[rows, cols] += left
    matrix[rows, cols + 1] += right
    matrix.setflags(write=False)
    return matrix


def _smooth_weights(grid: TimeGrid, kernel_fn, nodes: int) -> np.ndarray:
    rows, cols, a, b = _panels(grid)
    h = b - a
    x, w = _unit_rule(nodes)
    values = kernel_fn(a[:, None] + h[:, None] * x[None, :])
    left = h * (values @ (w * x))
    right = h * (values @ (w * (1.0 - x)))
    return _assemble(grid, rows, cols, left, right)


@lru_cache(maxsize=32)
def beta_weights(mu: float, grid: TimeGrid) -> np.ndarray:
    """Weights for β_μ(r) = r^{μ-1}/Γ(μ), the singularity at r = 0 integrated exactly."""
    if not mu > 0.0:
        raise DomainError(f"beta weights need mu > 0, got {mu}")
    rows, cols, a, b = _panels(grid)
    h = b - a
    a = np.maximum(a, 0.0)
    left = np.empty_like(a)
    right = np.empty_like(a)

    near = a < h
    an, bn, hn = a[near], b[near], h[near]
    i0 = (bn**mu - an**mu) / mu
    i1 = (bn ** (mu + 1.0) - an ** (mu + 1.0)) / (mu + 1.0)
    left[near] = (i1 - an * i0) / hn
    right[near] = (bn * i0 - i1) / hn

    far = ~near
    x, w = _unit_rule(POWER_NODES)
    af, hf = a[far], h[far]
    values = (af[:, None] + hf[:, None] * x[None, :]) ** (mu - 1.0)
    left[far] = hf * (values @ (w * x))
    right[far] = hf * (values @ (w * (1.0 - x)))

    scale = rgamma(mu)
    return _assemble(grid, rows, cols, scale * left, scale * right)


@lru_cache(maxsize=32)
def gtilde_weights(kernel: SplitKernel, grid: TimeGrid) -> np.ndarray:
    """Weights for the remainder g̃ through its tabulated spline."""
    if not kernel.has_perturbation:
        matrix = np.zeros((grid.count + 1, grid.count + 1))
        matrix.setflags(write=False)
        return matrix
    logger.debug("assembling g̃ weights for %s on %d steps", kernel.exponent.describe(), grid.count)
    return _smooth_weights(grid, lambda r: gtilde_interpolated(kernel, r), SMOOTH_NODES)


def kernel_weights(kernel: SplitKernel, grid: TimeGrid) -> np.ndarray:
    """Weights for the full kernel k = β_{1-α0} + g̃."""
    matrix = beta_weights(1.0 - kernel.alpha0, grid) + gtilde_weights(kernel, grid)
    matrix.setflags(write=False)
    return matrix


@lru_cache(maxsize=32)
def resolvent_weights(alpha0: float, lam: float, grid: TimeGrid) -> np.ndarray:
    """Weights for E(r) = E_{2-α0,1}(-λ r^{2-α0}), the solution kernel of v' + λ β_{1-α0}∗v = h."""
    if not lam >= 0.0:
        raise DomainError(f"eigenvalue must be non-negative, got {lam}")
    order = 2.0 - alpha0
    if lam == 0.0:
        return _smooth_weights(grid, np.ones_like, 2)
    table = ml_table(order, 1.0)
    return _smooth_weights(grid, lambda r: table(lam * r**order), RESOLVENT_NODES)


def relaxation(alpha0: float, lam: float, t: np.ndarray) -> np.ndarray:
    """E_{2-α0,1}(-λ t^{2-α0}) at the given times."""
    t = np.asarray(t, dtype=float)
    if lam == 0.0:
        return np.ones_like(t)
    order = 2.0 - alpha0
    return ml_table(order, 1.0)(lam * t**order)


def relaxation_derivative(alpha0: float, lam: float, t: np.ndarray) -> np.ndarray:
    """d/dt E_{2-α0,1}(-λ t^{2-α0}) = -λ t^{1-α0} E_{2-α0,2-α0}(-λ t^{2-α0})."""
    t = np.asarray(t, dtype=float)
    if lam == 0.0:
        return np.zeros_like(t)
    order = 2.0 - alpha0
    return -lam * t ** (1.0 - alpha0) * ml_table(order, order)(lam * t**order)
