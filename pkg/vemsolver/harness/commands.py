"""One handler per harness command.

Every handler takes a validated RunConfig and returns a CommandResult: the CSV
table (fixed column order per command), scalar results for the summaries and
the pass/fail state of the invariant checks the command verifies.
"""

import logging
import math
from collections.abc import Callable
from dataclasses import dataclass, field

import numpy as np

from vemsolver.errors import DomainError
from vemsolver.field.domain import SpectralDomain, check_orthonormality, eigenvalues
from vemsolver.field.family import random_field_family
from vemsolver.field.solve import FieldProblem, solve_field
from vemsolver.kernel.exponent import ExponentFunction
from vemsolver.kernel.split import (
    SplitKernel,
    beta_mu,
    gtilde,
    gtilde_bound_ratios,
    gtilde_prime,
    kernel_eval,
)
from vemsolver.modes.forcing import TimeFunction
from vemsolver.modes.grid import TimeGrid, default_grading
from vemsolver.modes.norms import h1_norm, mode_regularity_ratio, stability_ratio, weighted_second_norm
from vemsolver.modes.probes import (
    CONTRACTION_TARGET,
    contraction_probe,
    convergence_study,
    homogeneous_reference,
    singularity_probe,
)
from vemsolver.modes.solver import ModeProblem, solve_mode, volterra_oracle_solve
from vemsolver.schemas import RunConfig
from vemsolver.special.mittag_leffler import MLParams, mittag_leffler, regime_for

logger = logging.getLogger(__name__)

SPLIT_POINTS = 200
BOUND_T_MIN = 1e-6
BOUND_SPREAD = 10.0
MIN_ORDER = 0.85
SINGULAR_RELATIVE_TOLERANCE = 0.05
REGULARITY_GROWTH = 0.05
DEFAULT_PROBE_SIGMAS = (1.0, 10.0, 100.0, 1000.0)


@dataclass
class CommandResult:
    columns: list[str]
    rows: list[list]
    results: dict = field(default_factory=dict)
    report: dict | None = None
    checks: dict[str, bool] = field(default_factory=dict)


# ─── Builders ─────────────────────────────────────────────────


def build_kernel(cfg: RunConfig) -> SplitKernel:
    exponent = ExponentFunction.parse(cfg.exponent, cfg.horizon)
    return SplitKernel(exponent, quad_nodes=cfg.quad_nodes, quad_tolerance=cfg.quad_tolerance)


def build_grid(cfg: RunConfig, kernel: SplitKernel, count: int | None = None) -> TimeGrid:
    grading = cfg.grading if cfg.grading is not None else default_grading(kernel.alpha0)
    return TimeGrid(cfg.horizon, count or cfg.time_steps, grading)


def build_mode_problem(cfg: RunConfig, kernel: SplitKernel) -> ModeProblem:
    return ModeProblem.with_forcing(cfg.eigenvalue, cfg.initial, TimeFunction.parse(cfg.forcing), kernel)


def build_domain(cfg: RunConfig) -> SpectralDomain:
    return SpectralDomain(cfg.dimension, tuple(cfg.lengths), cfg.modes)


def parse_profile(spec: str, domain: SpectralDomain) -> Callable | None:
    """``zero``, ``sine:k,amp`` (amp·Π sin(kπx_d/L_d)) or ``parabola:amp`` (amp·Π x_d(L_d - x_d))."""
    kind, _, body = spec.strip().partition(":")
    kind = kind.strip().lower()
    if kind == "zero":
        return None
    try:
        params = [float(item) for item in body.split(",")] if body.strip() else []
    except ValueError as exc:
        raise DomainError(f"profile spec {spec!r} has a non-numeric parameter") from exc
    lengths = domain.lengths
    if kind == "sine" and len(params) == 2:
        k, amplitude = params

        def sine(*coords):
            out = amplitude
            for x, length in zip(coords, lengths):
                out = out * np.sin(k * math.pi * x / length)
            return out

        return sine
    if kind == "parabola" and len(params) == 1:
        (amplitude,) = params

        def parabola(*coords):
            out = amplitude
            for x, length in zip(coords, lengths):
                out = out * x * (length - x)
            return out

        return parabola
    raise DomainError(f"profile spec {spec!r} must be 'zero', 'sine:k,amp' or 'parabola:amp'")


def _spread(values) -> tuple[float, float]:
    values = np.asarray(values, dtype=float)
    values = values[np.isfinite(values)]
    if values.size == 0:
        return math.nan, math.nan
    return float(np.max(values)), float(np.median(values))


def _bounded(values) -> bool:
    peak, median = _spread(values)
    return bool(peak <= BOUND_SPREAD * median) if math.isfinite(peak) else False


# ─── Handlers ─────────────────────────────────────────────────


def ml_eval(cfg: RunConfig) -> CommandResult:
    params = MLParams(cfg.ml_alpha, cfg.ml_beta)
    z = np.linspace(cfg.ml_z_min, cfg.ml_z_max, cfg.ml_points)
    values = np.array([mittag_leffler(params, float(zi)) for zi in z])
    rows = [[float(zi), float(v), regime_for(params, float(zi))] for zi, v in zip(z, values)]
    checks = {"finite": bool(np.all(np.isfinite(values)))}
    if cfg.ml_alpha == 1.0 and cfg.ml_beta == 1.0:
        checks["matches_exp"] = bool(np.max(np.abs(values - np.exp(z))) <= 1e-10)
    if cfg.ml_alpha == 2.0 and cfg.ml_beta == 1.0:
        checks["matches_cos"] = bool(np.max(np.abs(values - np.cos(np.sqrt(-z)))) <= 1e-10)
    results = {"alpha": cfg.ml_alpha, "beta": cfg.ml_beta, "points": int(z.size)}
    return CommandResult(["z", "value", "regime"], rows, results, None, checks)


def kernel_split(cfg: RunConfig) -> CommandResult:
    kernel = build_kernel(cfg)
    t = cfg.horizon * (np.arange(1, SPLIT_POINTS + 1) / SPLIT_POINTS) ** 4
    k = kernel_eval(kernel, t)
    beta = beta_mu(1.0 - kernel.alpha0, t)
    g = gtilde(kernel, t)
    g_prime = gtilde_prime(kernel, t)
    residual = np.abs(beta + g - k)

    bound_t = np.geomspace(BOUND_T_MIN * cfg.horizon, cfg.horizon, SPLIT_POINTS)
    value_ratio, slope_ratio = gtilde_bound_ratios(kernel, bound_t)

    rows = [list(map(float, row)) for row in zip(t, k, beta, g, g_prime, residual)]
    checks = {
        "split_consistent": bool(np.max(residual) <= cfg.quad_tolerance * np.maximum(1.0, np.max(np.abs(k)))),
        "gtilde_bounded": _bounded(value_ratio) or not kernel.has_perturbation,
        "gtilde_prime_bounded": _bounded(slope_ratio) or not kernel.has_perturbation,
    }
    if not kernel.has_perturbation:
        checks["gtilde_vanishes"] = bool(np.all(g == 0.0))
    results = {
        "exponent": kernel.exponent.describe(),
        "alpha0": kernel.alpha0,
        "max_split_residual": float(np.max(residual)),
        "gtilde_ratio_max": _spread(value_ratio)[0],
        "gtilde_ratio_median": _spread(value_ratio)[1],
        "gtilde_prime_ratio_max": _spread(slope_ratio)[0],
        "gtilde_prime_ratio_median": _spread(slope_ratio)[1],
    }
    columns = ["t", "kernel", "beta", "gtilde", "gtilde_prime", "split_residual"]
    return CommandResult(columns, rows, results, None, checks)


def solve_mode_command(cfg: RunConfig) -> CommandResult:
    kernel = build_kernel(cfg)
    problem = build_mode_problem(cfg, kernel)
    grid = build_grid(cfg, kernel)
    options = {}
    if cfg.scheme == "picard":
        options = {"sigma": cfg.sigma[0] if cfg.sigma else None, "tol": cfg.tolerance, "max_iter": cfg.max_iter}
    solution = solve_mode(problem, grid, cfg.scheme, **options)
    rows = [[float(t), float(u), float(du)] for t, u, du in zip(grid.nodes, solution.values, solution.derivative)]
    results = {
        "scheme": cfg.scheme,
        "iterations": solution.iterations,
        "residual": solution.residual,
        "sigma": solution.sigma if solution.sigma is not None else math.nan,
        "u_final": float(solution.values[-1]),
        "h1_norm": h1_norm(solution),
        "weighted_second": weighted_second_norm(solution, kernel.alpha0),
        "stability_ratio": stability_ratio(problem, solution),
        "regularity_ratio": mode_regularity_ratio(problem, solution),
    }
    if cfg.scheme == "picard":
        oracle = volterra_oracle_solve(problem, grid)
        results["oracle_difference"] = float(np.max(np.abs(oracle.values - solution.values)))
    checks = {
        "initial_value": bool(solution.values[0] == problem.u0),
        "finite": bool(np.all(np.isfinite(solution.values)) and np.all(np.isfinite(solution.derivative))),
    }
    return CommandResult(["t", "u", "du"], rows, results, None, checks)


def _field_problem(cfg: RunConfig, domain: SpectralDomain, kernel: SplitKernel) -> FieldProblem:
    initial = parse_profile(cfg.initial_profile, domain)
    forcing = TimeFunction.parse(cfg.forcing)
    terms = []
    if not forcing.is_zero:
        terms.append((parse_profile("sine:1,1", domain), forcing))
    return FieldProblem.from_profiles(domain, kernel, initial, terms)


def solve_pde(cfg: RunConfig) -> CommandResult:
    kernel = build_kernel(cfg)
    domain = build_domain(cfg)
    problem = _field_problem(cfg, domain, kernel)
    grid = build_grid(cfg, kernel)
    options = {}
    if cfg.scheme == "picard":
        options = {"sigma": cfg.sigma[0] if cfg.sigma else None, "tol": cfg.tolerance, "max_iter": cfg.max_iter}
    solution = solve_field(problem, grid, cfg.scheme, workers=cfg.workers, **options)
    lam = eigenvalues(domain)
    rows = []
    for i, mode in enumerate(solution.modes):
        rows.append([
            i + 1,
            float(lam[i]),
            problem.initial[i],
            float(mode.values[-1]),
            h1_norm(mode),
            weighted_second_norm(mode, kernel.alpha0),
            mode.iterations,
            mode.residual,
        ])
    report = solution.report.as_dict()
    deviation = check_orthonormality(domain)
    checks = {
        "norms_nonnegative": all(value >= 0.0 for key, value in report.items() if not key.endswith("ratio")),
        "orthonormal_basis": deviation <= 1e-10,
    }
    checks["ratios_finite"] = bool(
        (math.isfinite(report["stability_ratio"]) or report["data_h2"] + report["f_h1l2"] == 0.0)
        and (math.isfinite(report["regularity_ratio"]) or report["data_h4"] + report["f_h1h2"] == 0.0)
    )
    results = {"modes": domain.truncation, "time_steps": grid.count, "grading": grid.grading, "orthonormality": deviation}
    columns = ["mode", "lambda", "u0", "u_final", "h1_norm", "weighted_second", "iterations", "residual"]
    return CommandResult(columns, rows, results, report, checks)


def contraction_probe_command(cfg: RunConfig) -> CommandResult:
    kernel = build_kernel(cfg)
    problem = build_mode_problem(cfg, kernel)
    grid = build_grid(cfg, kernel)
    sigmas = cfg.sigma or list(DEFAULT_PROBE_SIGMAS)
    report = contraction_probe(problem, grid, sigmas)
    rows = [[row.sigma, row.factor, row.weight_integral] for row in report.rows]
    checks = {"factors_decreasing": report.decreasing}
    if problem.has_memory_coupling:
        checks["contracts_at_largest_sigma"] = bool(report.rows[-1].factor < CONTRACTION_TARGET)
    else:
        checks["factors_vanish"] = all(row.factor == 0.0 for row in report.rows)
    results = {"slope": report.slope, "alpha0": kernel.alpha0, "eigenvalue": problem.lam}
    return CommandResult(["sigma", "factor", "weight_integral"], rows, results, None, checks)


def singularity_probe_command(cfg: RunConfig) -> CommandResult:
    kernel = build_kernel(cfg)
    problem = build_mode_problem(cfg, kernel)
    grid = build_grid(cfg, kernel)
    report = singularity_probe(problem, grid)
    rows = [[t, value] for t, value in report.samples]
    if report.predicted != 0.0:
        checks = {"limit_matches_prediction": report.relative_error <= SINGULAR_RELATIVE_TOLERANCE}
    else:
        scale = max(abs(value) for _, value in report.samples)
        checks = {"limit_vanishes": abs(report.limit_estimate) <= SINGULAR_RELATIVE_TOLERANCE * scale + 1e-12}
    results = {
        "limit_estimate": report.limit_estimate,
        "predicted": report.predicted,
        "relative_error": report.relative_error,
    }
    return CommandResult(["t", "scaled_second_derivative"], rows, results, None, checks)


def convergence(cfg: RunConfig) -> CommandResult:
    kernel = build_kernel(cfg)
    problem = build_mode_problem(cfg, kernel)
    closed_form = not kernel.has_perturbation and TimeFunction.parse(cfg.forcing).is_zero
    reference = homogeneous_reference(kernel.alpha0, problem.lam, problem.u0) if closed_form else None
    grading = cfg.grading if cfg.grading is not None else default_grading(kernel.alpha0)
    rows = convergence_study(problem, cfg.refinements, grading, cfg.scheme, reference)
    orders = [row.order for row in rows if math.isfinite(row.order)]
    checks = {"observed_order": bool(orders) and min(orders) >= MIN_ORDER}
    results = {
        "reference": "closed-form" if closed_form else "self-convergence",
        "grading": grading,
        "finest_error": rows[-1].error,
    }
    return CommandResult(["N", "max_error", "order"], [[r.count, r.error, r.order] for r in rows], results, None, checks)


def regularity_report(cfg: RunConfig) -> CommandResult:
    kernel = build_kernel(cfg)
    domain = build_domain(cfg)
    coarse_grid = build_grid(cfg, kernel, cfg.refinements[0])
    fine_grid = build_grid(cfg, kernel, cfg.refinements[-1])
    family = random_field_family(domain, kernel, cfg.family_size, cfg.seed)
    rows = []
    fine_reports = []
    for index, problem in enumerate(family):
        coarse = solve_field(problem, coarse_grid, cfg.scheme, workers=cfg.workers).report
        fine = solve_field(problem, fine_grid, cfg.scheme, workers=cfg.workers).report
        fine_reports.append(fine.as_dict())
        growth = fine.regularity_ratio / coarse.regularity_ratio - 1.0
        rows.append([
            index,
            fine.stability_ratio,
            coarse.regularity_ratio,
            fine.regularity_ratio,
            growth,
            fine.weighted_second,
        ])
    stability = [row[1] for row in rows]
    regularity = [row[3] for row in rows]
    growths = [row[4] for row in rows]
    checks = {
        "stability_bounded": _bounded(stability),
        "regularity_bounded": _bounded(regularity),
        "regularity_stable_under_refinement": bool(max(growths) <= REGULARITY_GROWTH),
    }
    results = {
        "family_size": cfg.family_size,
        "seed": cfg.seed,
        "coarse_steps": coarse_grid.count,
        "fine_steps": fine_grid.count,
        "stability_max": _spread(stability)[0],
        "stability_median": _spread(stability)[1],
        "regularity_max": _spread(regularity)[0],
        "regularity_median": _spread(regularity)[1],
        "max_regularity_growth": max(growths),
    }
    # family medians of the fine-grid norm reports
    report = {name: float(np.median([r[name] for r in fine_reports])) for name in fine_reports[0]}
    columns = [
        "problem",
        "stability_ratio",
        "regularity_ratio_coarse",
        "regularity_ratio_fine",
        "regularity_growth",
        "weighted_second",
    ]
    return CommandResult(columns, rows, results, report, checks)


HANDLERS: dict[str, Callable[[RunConfig], CommandResult]] = {
    "ml-eval": ml_eval,
    "kernel-split": kernel_split,
    "solve-mode": solve_mode_command,
    "solve-pde": solve_pde,
    "contraction-probe": contraction_probe_command,
    "singularity-probe": singularity_probe_command,
    "convergence": convergence,
    "regularity-report": regularity_report,
}
