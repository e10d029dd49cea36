"""Discrete norms of grid functions and the mode-level estimate ratios."""

from __future__ import annotations

import math
from typing import TYPE_CHECKING

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.integrate import trapezoid

from vemsolver.errors import DomainError, InputError
from vemsolver.modes.grid import TimeGrid

if TYPE_CHECKING:
    from vemsolver.modes.solver import ModeProblem, ModeSolution

FORCING_NODES = 4


def _grid_values(values, grid: TimeGrid) -> np.ndarray:
    arr = np.asarray(values, dtype=float)
    if arr.shape != (grid.count + 1,):
        raise InputError(f"expected {grid.count + 1} nodal values, got shape {arr.shape}")
    return arr


def safe_ratio(numerator: float, denominator: float) -> float:
    """numerator/denominator; 0 for 0/0 and nan for x/0."""
    if denominator == 0.0:
        return 0.0 if numerator == 0.0 else math.nan
    return numerator / denominator


def weighted_norm(values, grid: TimeGrid, sigma: float) -> float:
    """‖e^{-σt} q'‖_{L²(0,T)} with q' the forward difference quotient on each panel.

    Each squared quotient is weighted by the exact panel integral of e^{-2σt}.
    """
    if not sigma >= 0.0:
        raise DomainError(f"sigma must be non-negative, got {sigma}")
    v = _grid_values(values, grid)
    tau = grid.steps
    quotients = np.diff(v) / tau
    if sigma == 0.0:
        weights = tau
    else:
        weights = np.exp(-2.0 * sigma * grid.nodes[:-1]) * -np.expm1(-2.0 * sigma * tau) / (2.0 * sigma)
    return math.sqrt(float(np.sum(quotients**2 * weights)))


def l2_norm(values, grid: TimeGrid) -> float:
    v = _grid_values(values, grid)
    return math.sqrt(float(trapezoid(v**2, grid.nodes)))


def h1_norm(solution: ModeSolution) -> float:
    grid = solution.grid
    return math.hypot(l2_norm(solution.values, grid), l2_norm(solution.derivative, grid))


def second_derivative(grid: TimeGrid, derivative) -> np.ndarray:
    """u'' at nodes 1..N from three-point non-uniform stencils on u'; entry 0 is nan."""
    d = _grid_values(derivative, grid)
    t = grid.nodes
    out = np.full_like(d, np.nan)
    h1 = t[1:-1] - t[:-2]
    h2 = t[2:] - t[1:-1]
    out[1:-1] = (
        -h2 / (h1 * (h1 + h2)) * d[:-2]
        + (h2 - h1) / (h1 * h2) * d[1:-1]
        + h1 / (h2 * (h1 + h2)) * d[2:]
    )
    # one-sided at t_N
    h1, h2 = t[-2] - t[-3], t[-1] - t[-2]
    out[-1] = (
        h2 / (h1 * (h1 + h2)) * d[-3]
        - (h1 + h2) / (h1 * h2) * d[-2]
        + (h1 + 2.0 * h2) / (h2 * (h1 + h2)) * d[-1]
    )
    return out


def weighted_second_norm(solution: ModeSolution, alpha0: float) -> float:
    """‖t^{α0/2} u''‖_{L²(0,T)}; the first panel is integrated as c² t^{-α0}."""
    grid = solution.grid
    t = grid.nodes
    second = second_derivative(grid, solution.derivative)
    density = t[1:] ** alpha0 * second[1:] ** 2
    first_panel = density[0] * t[1] / (1.0 - alpha0)
    return math.sqrt(first_panel + float(trapezoid(density, t[1:])))


def forcing_h1_norm(problem: ModeProblem, grid: TimeGrid) -> float:
    """‖f‖_{H¹(0,T)} by Gauss-Legendre on every grid panel."""
    x, w = leggauss(FORCING_NODES)
    t = grid.nodes
    mid = (t[1:] + t[:-1]) / 2.0
    half = grid.steps / 2.0
    points = mid[:, None] + half[:, None] * x[None, :]
    weights = half[:, None] * w[None, :]
    f = problem.forcing(points)
    fp = problem.forcing_prime(points)
    total = float(np.sum(weights * (f**2 + fp**2)))
    if not math.isfinite(total):
        raise InputError("forcing or its derivative is not finite on (0, T)")
    return math.sqrt(total)


def stability_ratio(problem: ModeProblem, solution: ModeSolution) -> float:
    """‖u‖_{H¹} / (λ|u0| + ‖f‖_{H¹})."""
    data = problem.lam * abs(problem.u0) + forcing_h1_norm(problem, solution.grid)
    return safe_ratio(h1_norm(solution), data)


def mode_regularity_ratio(problem: ModeProblem, solution: ModeSolution) -> float:
    """‖t^{α0/2} u''‖ / (λ²|u0| + λ‖f‖_{H¹})."""
    lam = problem.lam
    data = lam**2 * abs(problem.u0) + lam * forcing_h1_norm(problem, solution.grid)
    return safe_ratio(weighted_second_norm(solution, problem.kernel.alpha0), data)
