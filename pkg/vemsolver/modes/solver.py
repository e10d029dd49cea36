"""Per-mode Volterra solvers for u' + λ k∗u = f, u(0) = u0.

Two schemes share the product-integration weights of ``weights.py``:

* ``volterra_oracle_solve``: implicit trapezoidal stepping of the integrated
  equation with the full kernel k = β_{1-α0} + g̃.
* ``picard_solve``: fixed-point iteration on the perturbation form
  u = u0·E + v, v = E∗(f - λ g̃∗(u0·E + v)) with E(t) = E_{2-α0,1}(-λ t^{2-α0}).
"""

import logging
import math
from collections.abc import Callable
from dataclasses import dataclass

import numpy as np
from numpy.polynomial.legendre import leggauss

from vemsolver.errors import ConvergenceError, DomainError, InputError
from vemsolver.kernel.split import SplitKernel
from vemsolver.modes.forcing import TimeFunction
from vemsolver.modes.grid import TimeGrid
from vemsolver.modes.norms import weighted_norm
from vemsolver.modes.weights import (
    beta_weights,
    gtilde_weights,
    kernel_weights,
    relaxation,
    relaxation_derivative,
    resolvent_weights,
)

logger = logging.getLogger(__name__)

SCHEMES = ("oracle", "picard")
DEFAULT_TOLERANCE = 1e-10
DEFAULT_MAX_ITER = 50
PANEL_NODES = 4


@dataclass(frozen=True)
class ModeProblem:
    lam: float
    u0: float
    forcing: Callable
    forcing_prime: Callable
    kernel: SplitKernel

    def __post_init__(self):
        if not (math.isfinite(self.lam) and self.lam >= 0.0):
            raise DomainError(f"eigenvalue must be finite and non-negative, got {self.lam}")
        if not math.isfinite(self.u0):
            raise DomainError(f"initial value must be finite, got {self.u0}")

    @classmethod
    def with_forcing(
        cls, lam: float, u0: float, forcing: TimeFunction | None, kernel: SplitKernel
    ) -> "ModeProblem":
        forcing = forcing or TimeFunction.zero()
        return cls(float(lam), float(u0), forcing, forcing.derivative, kernel)

    @property
    def has_memory_coupling(self) -> bool:
        """Whether the Picard map depends on v."""
        return self.lam > 0.0 and self.kernel.has_perturbation


@dataclass(frozen=True)
class ModeSolution:
    grid: TimeGrid
    values: np.ndarray
    derivative: np.ndarray
    iterations: int = 0
    residual: float = 0.0
    sigma: float | None = None
    scheme: str = "oracle"


def _check_grid(p: ModeProblem, g: TimeGrid) -> None:
    if abs(g.horizon - p.kernel.horizon) > 1e-12 * p.kernel.horizon:
        raise DomainError(f"grid horizon {g.horizon} differs from kernel horizon {p.kernel.horizon}")


def _sample_forcing(p: ModeProblem, t) -> np.ndarray:
    values = np.asarray(p.forcing(t), dtype=float) + 0.0 * np.asarray(t, dtype=float)
    if not np.all(np.isfinite(values)):
        raise InputError("forcing has a non-finite sample")
    return values


def _panel_integrals(p: ModeProblem, g: TimeGrid) -> np.ndarray:
    """∫ f over every panel [t_{n-1}, t_n]."""
    x, w = leggauss(PANEL_NODES)
    t = g.nodes
    mid = (t[1:] + t[:-1]) / 2.0
    half = g.steps / 2.0
    values = _sample_forcing(p, mid[:, None] + half[:, None] * x[None, :])
    return half * (values @ w)


def volterra_oracle_solve(p: ModeProblem, g: TimeGrid) -> ModeSolution:
    """Implicit product-integration solve of u' + λ k∗u = f on the grid."""
    _check_grid(p, g)
    weights = kernel_weights(p.kernel, g)
    increments = _panel_integrals(p, g)
    f_nodes = _sample_forcing(p, g.nodes)
    tau = g.steps
    lam = p.lam

    u = np.empty(g.count + 1)
    memory = np.zeros(g.count + 1)
    u[0] = p.u0
    for n in range(1, g.count + 1):
        half = 0.5 * lam * tau[n - 1]
        history = weights[n, :n] @ u[:n]
        u[n] = (u[n - 1] + increments[n - 1] - half * (memory[n - 1] + history)) / (1.0 + half * weights[n, n])
        memory[n] = history + weights[n, n] * u[n]

    derivative = f_nodes - lam * memory
    logger.debug("oracle solve λ=%.6g on %d steps: u(T)=%.6g", lam, g.count, u[-1])
    return ModeSolution(g, u, derivative, iterations=0, residual=0.0, scheme="oracle")


def _homogeneous(p: ModeProblem, g: TimeGrid) -> tuple[np.ndarray, np.ndarray]:
    a0 = p.kernel.alpha0
    if p.u0 == 0.0:
        zeros = np.zeros(g.count + 1)
        return zeros, zeros
    return p.u0 * relaxation(a0, p.lam, g.nodes), p.u0 * relaxation_derivative(a0, p.lam, g.nodes)


def _picard_source(p: ModeProblem, g: TimeGrid, v: np.ndarray, homogeneous: np.ndarray) -> np.ndarray:
    """h = f - λ g̃∗(u0·E + v) at the nodes."""
    source = _sample_forcing(p, g.nodes)
    if p.has_memory_coupling:
        source = source - p.lam * (gtilde_weights(p.kernel, g) @ (homogeneous + v))
    return source


def _check_iterate(v, g: TimeGrid) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    if v.shape != (g.count + 1,):
        raise InputError(f"iterate must have {g.count + 1} nodal values, got shape {v.shape}")
    if v[0] != 0.0:
        raise InputError(f"iterate must vanish at t=0, got v(0)={v[0]}")
    return v


def apply_picard_map(p: ModeProblem, g: TimeGrid, v) -> np.ndarray:
    """w = E∗(f - λ g̃∗(u0·E + v)) at the grid nodes; w(0) = 0."""
    _check_grid(p, g)
    v = _check_iterate(v, g)
    homogeneous, _ = _homogeneous(p, g)
    source = _picard_source(p, g, v, homogeneous)
    return resolvent_weights(p.kernel.alpha0, p.lam, g) @ source


def picard_solve(
    p: ModeProblem,
    g: TimeGrid,
    sigma: float | None = None,
    tol: float = DEFAULT_TOLERANCE,
    max_iter: int = DEFAULT_MAX_ITER,
) -> ModeSolution:
    """Iterate the Picard map from v = 0 until the σ-weighted update is below ``tol``.

    ``sigma=None`` selects the smallest σ in {1, 10, ..., 1e6} whose probed
    contraction factor is below 0.5.
    """
    _check_grid(p, g)
    if not tol > 0.0:
        raise DomainError(f"tolerance must be positive, got {tol}")
    if max_iter < 1:
        raise DomainError(f"max_iter must be >= 1, got {max_iter}")
    if sigma is None:
        from vemsolver.modes.probes import select_sigma

        sigma = select_sigma(p, g)
    elif not sigma >= 0.0:
        raise DomainError(f"sigma must be non-negative, got {sigma}")

    homogeneous, homogeneous_prime = _homogeneous(p, g)
    resolvent = resolvent_weights(p.kernel.alpha0, p.lam, g)
    v = np.zeros(g.count + 1)
    residual = math.inf
    iterations = 0
    while True:
        source = _picard_source(p, g, v, homogeneous)
        update = resolvent @ source
        iterations += 1
        if not p.has_memory_coupling:
            v, residual = update, 0.0
            break
        residual = weighted_norm(update - v, g, sigma)
        v = update
        logger.debug("Picard iteration %d: residual %.3e (σ=%g)", iterations, residual, sigma)
        if not math.isfinite(residual):
            raise ConvergenceError("Picard iteration diverged", residual)
        if residual <= tol:
            break
        if iterations >= max_iter:
            raise ConvergenceError(f"Picard iteration did not reach {tol:.1e} in {max_iter} iterations", residual)

    # v solves v' + λ β_{1-α0}∗v = source with v(0) = 0
    source = _picard_source(p, g, v, homogeneous)
    v_prime = source - p.lam * (beta_weights(1.0 - p.kernel.alpha0, g) @ v)
    values = homogeneous + v
    values[0] = p.u0
    logger.info("Picard solve λ=%.6g converged in %d iterations (residual %.3e, σ=%g)", p.lam, iterations, residual, sigma)
    return ModeSolution(
        g,
        values,
        homogeneous_prime + v_prime,
        iterations=iterations,
        residual=residual,
        sigma=sigma,
        scheme="picard",
    )


def solve_mode(p: ModeProblem, g: TimeGrid, scheme: str = "oracle", **options) -> ModeSolution:
    if scheme == "oracle":
        return volterra_oracle_solve(p, g)
    if scheme == "picard":
        return picard_solve(p, g, **options)
    raise DomainError(f"unknown scheme {scheme!r}, expected one of {SCHEMES}")
