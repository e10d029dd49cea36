"""Seeded random problem families with data regular enough for both estimates."""

import logging
import math

import numpy as np

from vemsolver.field.domain import SpectralDomain, eigenvalues
from vemsolver.field.solve import FieldProblem
from vemsolver.kernel.split import SplitKernel
from vemsolver.modes.forcing import TimeFunction
from vemsolver.modes.solver import ModeProblem

logger = logging.getLogger(__name__)

INITIAL_DECAY = 2.5
FORCING_DECAY = 2.0
MODE_EIGENVALUE_RANGE = (1.0, 100.0)


def _smooth_forcing(rng: np.random.Generator, horizon: float, scale: float) -> TimeFunction:
    """scale · (η0 + η1 t/T + η2 sin(πt/T)) with η uniform in [-1, 1]."""
    eta = rng.uniform(-1.0, 1.0, size=3)
    return TimeFunction((scale * eta[0], scale * eta[1] / horizon), ((scale * eta[2], math.pi / horizon),))


def random_field_family(domain: SpectralDomain, kernel: SplitKernel, count: int, seed: int) -> list[FieldProblem]:
    """u0_i = λ_i^{-2.5} ξ_i and f_i = λ_i^{-2}(η0 + η1 t/T + η2 sin(πt/T))."""
    rng = np.random.default_rng(seed)
    lam = eigenvalues(domain)
    problems = []
    for _ in range(count):
        xi = rng.uniform(-1.0, 1.0, size=lam.size)
        initial = lam**-INITIAL_DECAY * xi
        forcing = [_smooth_forcing(rng, kernel.horizon, float(l) ** -FORCING_DECAY) for l in lam]
        problems.append(FieldProblem.from_coefficients(domain, kernel, initial, forcing))
    logger.info("drew %d field problems with %d modes (seed %d)", count, lam.size, seed)
    return problems


def random_mode_family(kernel: SplitKernel, count: int, seed: int) -> list[ModeProblem]:
    """λ uniform in [1, 100], u0 uniform in [-1, 1], smooth forcing of unit size."""
    rng = np.random.default_rng(seed)
    problems = []
    for _ in range(count):
        lam = float(rng.uniform(*MODE_EIGENVALUE_RANGE))
        u0 = float(rng.uniform(-1.0, 1.0))
        forcing = _smooth_forcing(rng, kernel.horizon, 1.0)
        problems.append(ModeProblem.with_forcing(lam, u0, forcing, kernel))
    return problems
