"""Diagnostics on single-mode problems: contraction of the Picard map, the t^{-α0}
singularity of u'', and convergence under grid refinement."""

import logging
import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass

import numpy as np
from scipy.special import gammainc

from vemsolver.errors import ConvergenceError, DomainError, InputError, ResolutionError
from vemsolver.modes.grid import TimeGrid, default_grading
from vemsolver.modes.norms import second_derivative, weighted_norm
from vemsolver.modes.solver import ModeProblem, solve_mode, volterra_oracle_solve
from vemsolver.modes.weights import gtilde_weights, resolvent_weights
from vemsolver.special.functions import gamma, rgamma
from vemsolver.special.mittag_leffler import MLParams, mittag_leffler

logger = logging.getLogger(__name__)

SIGMA_LADDER = (1.0, 10.0, 100.0, 1e3, 1e4, 1e5, 1e6)
CONTRACTION_TARGET = 0.5
SINGULAR_WINDOW = 0.01
SINGULAR_MIN_NODES = 8


# ─── Contraction ──────────────────────────────────────────────


@dataclass(frozen=True)
class ContractionRow:
    sigma: float
    factor: float
    weight_integral: float


@dataclass(frozen=True)
class ContractionReport:
    rows: tuple[ContractionRow, ...]
    slope: float
    decreasing: bool

    @property
    def factors(self) -> list[float]:
        return [row.factor for row in self.rows]


def weight_integral(alpha0: float, sigma: float, horizon: float) -> float:
    """∫_0^T e^{-σt} t^{α0-1} dt."""
    if not 0.0 < alpha0 < 1.0:
        raise DomainError(f"alpha0 must lie in (0, 1), got {alpha0}")
    if sigma == 0.0:
        return horizon**alpha0 / alpha0
    return gamma(alpha0) * float(gammainc(alpha0, sigma * horizon)) / sigma**alpha0


def _probe_basket(g: TimeGrid) -> dict[str, np.ndarray]:
    s = g.nodes / g.horizon
    return {
        "linear": s,
        "quadratic": s**2,
        "sine": np.sin(math.pi * s / 2.0),
        "damped": s * np.exp(-s),
    }


def _probe_responses(p: ModeProblem, g: TimeGrid) -> dict[str, tuple[np.ndarray, np.ndarray]]:
    """e_v -> e_w = -λ E∗(g̃∗e_v) for every basket direction."""
    basket = _probe_basket(g)
    if not p.has_memory_coupling:
        return {name: (e_v, np.zeros_like(e_v)) for name, e_v in basket.items()}
    resolvent = resolvent_weights(p.kernel.alpha0, p.lam, g)
    memory = gtilde_weights(p.kernel, g)
    return {name: (e_v, -p.lam * (resolvent @ (memory @ e_v))) for name, e_v in basket.items()}


def _factor(responses, g: TimeGrid, sigma: float) -> float:
    ratios = []
    for name, (e_v, e_w) in responses.items():
        denominator = weighted_norm(e_v, g, sigma)
        if denominator == 0.0:
            logger.warning("probe %r has zero weighted norm at σ=%g, skipped", name, sigma)
            continue
        ratios.append(weighted_norm(e_w, g, sigma) / denominator)
    return max(ratios) if ratios else math.nan


def _decade_slope(sigmas: np.ndarray, factors: np.ndarray) -> float:
    usable = (factors > 0.0) & np.isfinite(factors)
    top = usable & (sigmas >= sigmas.max() / 10.0)
    if np.count_nonzero(top) < 2:
        # fall back to the two largest usable σ
        idx = np.flatnonzero(usable)[-2:]
        if idx.size < 2:
            return math.nan
        top = np.zeros_like(usable)
        top[idx] = True
    return float(np.polyfit(np.log(sigmas[top]), np.log(factors[top]), 1)[0])


def contraction_probe(p: ModeProblem, g: TimeGrid, sigma_list: Sequence[float]) -> ContractionReport:
    """Probed contraction factor of the Picard map for each σ, with the log-log decay slope."""
    sigmas = sorted(float(s) for s in sigma_list)
    if len(sigmas) < 2:
        raise InputError("contraction_probe needs at least two sigma values")
    if sigmas[0] < 0.0:
        raise DomainError("sigma values must be non-negative")
    responses = _probe_responses(p, g)
    rows = tuple(
        ContractionRow(s, _factor(responses, g, s), weight_integral(p.kernel.alpha0, s, g.horizon)) for s in sigmas
    )
    factors = np.array([row.factor for row in rows])
    decreasing = bool(all(b < a or a == b == 0.0 for a, b in zip(factors[:-1], factors[1:])))
    slope = _decade_slope(np.array(sigmas), factors)
    logger.info("contraction probe: factors %s, slope %.4g", np.array2string(factors, precision=4), slope)
    return ContractionReport(rows, slope, decreasing)


def select_sigma(
    p: ModeProblem,
    g: TimeGrid,
    candidates: Sequence[float] = SIGMA_LADDER,
    target: float = CONTRACTION_TARGET,
) -> float:
    """Smallest candidate σ whose probed contraction factor is below ``target``."""
    if not p.has_memory_coupling:
        return float(candidates[0])
    responses = _probe_responses(p, g)
    factor = math.nan
    for sigma in candidates:
        factor = _factor(responses, g, float(sigma))
        if factor < target:
            logger.info("selected σ=%g (probed factor %.4g)", sigma, factor)
            return float(sigma)
    raise ConvergenceError(f"no σ up to {candidates[-1]:g} gives a contraction factor below {target}", factor)


# ─── Singularity of u'' ───────────────────────────────────────


@dataclass(frozen=True)
class SingularityReport:
    limit_estimate: float
    predicted: float
    samples: tuple[tuple[float, float], ...]

    @property
    def relative_error(self) -> float:
        if self.predicted == 0.0:
            return abs(self.limit_estimate)
        return abs(self.limit_estimate - self.predicted) / abs(self.predicted)


def _aitken(x0: float, x1: float, x2: float) -> float:
    denominator = (x2 - x1) - (x1 - x0)
    if denominator == 0.0:
        return x2
    estimate = x2 - (x2 - x1) ** 2 / denominator
    # reject extrapolations larger than the last difference
    if not math.isfinite(estimate) or abs(estimate - x2) > abs(x2 - x1):
        return x2
    return estimate


def singularity_probe(p: ModeProblem, g: TimeGrid) -> SingularityReport:
    """Extrapolated lim_{t→0} t^{α0} u''(t) next to the dominant-balance value -λ u0/Γ(1-α0)."""
    t = g.nodes
    window = np.count_nonzero(t[1:] <= SINGULAR_WINDOW * g.horizon)
    if window < SINGULAR_MIN_NODES:
        raise ResolutionError(
            f"only {window} grid nodes lie below T/100, need {SINGULAR_MIN_NODES}; refine or grade the grid"
        )
    solution = volterra_oracle_solve(p, g)
    a0 = p.kernel.alpha0
    scaled = t**a0 * second_derivative(g, solution.derivative)
    top = window - window % 4
    ladder = (top, top // 2, top // 4)
    samples = tuple((float(t[n]), float(scaled[n])) for n in ladder)
    limit = _aitken(*(value for _, value in samples))
    predicted = -p.lam * p.u0 * rgamma(1.0 - a0)
    logger.info("singularity probe: limit %.6g, predicted %.6g", limit, predicted)
    return SingularityReport(limit, predicted, samples)


# ─── Convergence ──────────────────────────────────────────────


@dataclass(frozen=True)
class ConvergenceRow:
    count: int
    error: float
    order: float


def homogeneous_reference(alpha0: float, lam: float, u0: float = 1.0) -> Callable[[np.ndarray], np.ndarray]:
    """t -> u0 E_{2-α0,1}(-λ t^{2-α0}), the exact solution for a constant exponent and f = 0."""
    params = MLParams(2.0 - alpha0, 1.0)

    def reference(t):
        t = np.asarray(t, dtype=float)
        return u0 * np.array([mittag_leffler(params, -lam * ti ** params.alpha) for ti in t.ravel()]).reshape(t.shape)

    return reference


def convergence_study(
    p: ModeProblem,
    counts: Sequence[int],
    grading: float | None = None,
    scheme: str = "oracle",
    reference: Callable | None = None,
) -> list[ConvergenceRow]:
    """Max nodal error per grid size with observed orders.

    With ``reference`` the error is measured against it; otherwise against the
    next finer grid, which must refine the current one by an integer factor.
    """
    counts = sorted(int(c) for c in counts)
    if len(counts) < 2:
        raise InputError("a convergence study needs at least two grid sizes")
    if grading is None:
        grading = default_grading(p.kernel.alpha0)
    solutions = [solve_mode(p, TimeGrid(p.kernel.horizon, n, grading), scheme) for n in counts]

    errors = []
    if reference is not None:
        for sol in solutions:
            errors.append(float(np.max(np.abs(sol.values - reference(sol.grid.nodes)))))
    else:
        for coarse, fine in zip(solutions[:-1], solutions[1:]):
            factor, rest = divmod(fine.grid.count, coarse.grid.count)
            if rest:
                raise InputError(f"grid size {fine.grid.count} does not refine {coarse.grid.count}")
            errors.append(float(np.max(np.abs(coarse.values - fine.values[::factor]))))

    rows = []
    for i, error in enumerate(errors):
        order = math.nan
        if i > 0 and error > 0.0 and errors[i - 1] > 0.0:
            order = math.log(errors[i - 1] / error) / math.log(counts[i] / counts[i - 1])
        rows.append(ConvergenceRow(counts[i], error, order))
        logger.info("N=%d: max error %.3e, order %.3f", counts[i], error, order)
    return rows
