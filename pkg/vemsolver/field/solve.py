"""Spectral assembly of u(x, t) = Σ u_i(t) φ_i(x) and its norm report."""

import logging
import math
from collections.abc import Callable, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np

from vemsolver.errors import ConvergenceError, InputError, TruncationError
from vemsolver.field.domain import (
    SpectralDomain,
    boundary_residual,
    eigenpairs,
    eigenvalues,
    l2_norm_pointwise,
    project,
    sobolev_norm,
)
from vemsolver.kernel.split import SplitKernel, kernel_convolution, kernel_eval
from vemsolver.modes.forcing import TimeFunction
from vemsolver.modes.grid import TimeGrid
from vemsolver.modes.norms import forcing_h1_norm, l2_norm, safe_ratio, weighted_second_norm
from vemsolver.modes.solver import ModeProblem, ModeSolution, solve_mode

logger = logging.getLogger(__name__)

BOUNDARY_TOLERANCE = 1e-8
SPAN_TOLERANCE = 1e-8


@dataclass(frozen=True)
class FieldProblem:
    """Per-mode data of ∂_t u - k∗Δu = f with homogeneous Dirichlet conditions.

    ``forcing[i]`` is a pair (f_i, f_i') of callables or None for a zero mode.
    """

    domain: SpectralDomain
    kernel: SplitKernel
    initial: tuple[float, ...]
    forcing: tuple[tuple[Callable, Callable] | None, ...]

    def __post_init__(self):
        n = self.domain.truncation
        if len(self.initial) != n or len(self.forcing) != n:
            raise InputError(f"expected {n} initial coefficients and forcing entries")
        if not all(math.isfinite(c) for c in self.initial):
            raise InputError("initial coefficients must be finite")

    @property
    def horizon(self) -> float:
        return self.kernel.horizon

    @classmethod
    def from_coefficients(
        cls,
        domain: SpectralDomain,
        kernel: SplitKernel,
        initial: Sequence[float] | None = None,
        forcing: Sequence[TimeFunction | None] | None = None,
    ) -> "FieldProblem":
        n = domain.truncation
        initial = tuple(float(c) for c in (initial if initial is not None else [0.0] * n))
        initial = initial + (0.0,) * (n - len(initial))
        if len(initial) > n:
            raise TruncationError(f"{len(initial)} initial coefficients exceed the truncation {n}")
        entries = list(forcing or [])
        if len(entries) > n:
            raise TruncationError(f"{len(entries)} forcing coefficients exceed the truncation {n}")
        entries += [None] * (n - len(entries))
        pairs = tuple(None if f is None or f.is_zero else (f, f.derivative) for f in entries)
        return cls(domain, kernel, initial, pairs)

    @classmethod
    def from_profiles(
        cls,
        domain: SpectralDomain,
        kernel: SplitKernel,
        initial: Callable | None = None,
        forcing_terms: Sequence[tuple[Callable, TimeFunction]] = (),
    ) -> "FieldProblem":
        """Pointwise data: u0(x) and f(x, t) = Σ X_k(x) τ_k(t)."""
        n = domain.truncation
        coefficients = np.zeros(n)
        if initial is not None:
            if boundary_residual(domain, initial) > BOUNDARY_TOLERANCE:
                raise InputError("initial data does not vanish on the boundary")
            coefficients = project(domain, initial)
        per_mode: list[TimeFunction | None] = [None] * n
        for profile, time_part in forcing_terms:
            for i, c in enumerate(project(domain, profile)):
                if c == 0.0:
                    continue
                term = time_part.scaled(float(c))
                per_mode[i] = term if per_mode[i] is None else per_mode[i].plus(term)
        return cls.from_coefficients(domain, kernel, coefficients, per_mode)

    def mode_problem(self, index: int) -> ModeProblem:
        lam = float(eigenvalues(self.domain)[index])
        entry = self.forcing[index]
        if entry is None:
            zero = TimeFunction.zero()
            return ModeProblem(lam, self.initial[index], zero, zero.derivative, self.kernel)
        return ModeProblem(lam, self.initial[index], entry[0], entry[1], self.kernel)

    def is_trivial_mode(self, index: int) -> bool:
        return self.initial[index] == 0.0 and self.forcing[index] is None


@dataclass(frozen=True)
class NormReport:
    h1l2_norm: float
    h1h2_norm: float
    weighted_second: float
    data_h2: float
    data_h4: float
    f_h1l2: float
    f_h1h2: float
    stability_ratio: float
    regularity_ratio: float

    def as_dict(self) -> dict[str, float]:
        return asdict(self)


@dataclass(frozen=True)
class FieldSolution:
    domain: SpectralDomain
    grid: TimeGrid
    modes: tuple[ModeSolution, ...]
    report: NormReport

    def coefficients(self, n: int) -> np.ndarray:
        """u_i(t_n) for every mode."""
        return np.array([mode.values[n] for mode in self.modes])

    def evaluate(self, n: int, *coords) -> np.ndarray:
        """u(x, t_n) = Σ u_i(t_n) φ_i(x) at the given coordinates."""
        out = 0.0
        for c, pair in zip(self.coefficients(n), eigenpairs(self.domain)):
            if c != 0.0:
                out = out + c * pair(*coords)
        return out + 0.0 * np.asarray(coords[0], dtype=float)


def _zero_solution(g: TimeGrid, scheme: str) -> ModeSolution:
    zeros = np.zeros(g.count + 1)
    return ModeSolution(g, zeros, zeros, iterations=0, residual=0.0, scheme=scheme)


def _solve_one(p: FieldProblem, g: TimeGrid, scheme: str, index: int, options: dict) -> ModeSolution:
    if p.is_trivial_mode(index):
        return _zero_solution(g, scheme)
    try:
        return solve_mode(p.mode_problem(index), g, scheme, **options)
    except ConvergenceError as exc:
        raise ConvergenceError(f"mode solve failed: {exc}", exc.residual, mode=index + 1) from exc


def _norm_report(p: FieldProblem, g: TimeGrid, modes: Sequence[ModeSolution]) -> NormReport:
    lam = eigenvalues(p.domain)
    h1_sq = np.zeros(len(modes))
    second_sq = np.zeros(len(modes))
    forcing_sq = np.zeros(len(modes))
    for i, sol in enumerate(modes):
        if p.is_trivial_mode(i):
            continue
        h1_sq[i] = l2_norm(sol.values, g) ** 2 + l2_norm(sol.derivative, g) ** 2
        second_sq[i] = weighted_second_norm(sol, p.kernel.alpha0) ** 2
        if p.forcing[i] is not None:
            forcing_sq[i] = forcing_h1_norm(p.mode_problem(i), g) ** 2

    h1l2 = math.sqrt(float(np.sum(h1_sq)))
    h1h2 = math.sqrt(float(np.sum(lam**2 * h1_sq)))
    weighted_second = math.sqrt(float(np.sum(second_sq)))
    data_h2 = sobolev_norm(p.domain, p.initial, 2.0)
    data_h4 = sobolev_norm(p.domain, p.initial, 4.0)
    f_h1l2 = math.sqrt(float(np.sum(forcing_sq)))
    f_h1h2 = math.sqrt(float(np.sum(lam**2 * forcing_sq)))
    return NormReport(
        h1l2_norm=h1l2,
        h1h2_norm=h1h2,
        weighted_second=weighted_second,
        data_h2=data_h2,
        data_h4=data_h4,
        f_h1l2=f_h1l2,
        f_h1h2=f_h1h2,
        stability_ratio=safe_ratio(h1l2, data_h2 + f_h1l2),
        regularity_ratio=safe_ratio(weighted_second + h1h2, data_h4 + f_h1h2),
    )


def solve_field(
    p: FieldProblem,
    g: TimeGrid,
    scheme: str = "oracle",
    workers: int = 1,
    **options,
) -> FieldSolution:
    """Solve every retained mode and assemble the norm report.

    Modes are independent; with ``workers > 1`` they run on a thread pool and are
    reduced in mode order.
    """
    n = p.domain.truncation
    logger.info("solving %d modes with the %s scheme on %d steps", n, scheme, g.count)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            modes = tuple(pool.map(lambda i: _solve_one(p, g, scheme, i, options), range(n)))
    else:
        modes = tuple(_solve_one(p, g, scheme, i, options) for i in range(n))
    report = _norm_report(p, g, modes)
    logger.info(
        "field solved: stability ratio %.6g, regularity ratio %.6g", report.stability_ratio, report.regularity_ratio
    )
    return FieldSolution(p.domain, g, modes, report)


# ─── Manufactured solutions ───────────────────────────────────


@dataclass(frozen=True)
class SeparableTarget:
    """u(x, t) = X(x) τ(t) with X given pointwise or by its eigen-coefficients."""

    time: TimeFunction
    profile: Callable | None = None
    coefficients: tuple[float, ...] | None = None

    def profile_coefficients(self, domain: SpectralDomain) -> np.ndarray:
        if self.coefficients is not None:
            c = np.asarray(self.coefficients, dtype=float)
            if c.size > domain.truncation:
                if np.any(c[domain.truncation :] != 0.0):
                    raise TruncationError("target profile has components beyond the retained modes")
                c = c[: domain.truncation]
            return np.concatenate((c, np.zeros(domain.truncation - c.size)))
        if self.profile is None:
            raise InputError("a separable target needs a profile or its coefficients")
        c = project(domain, self.profile)
        total = l2_norm_pointwise(domain, self.profile) ** 2
        tail = total - float(np.sum(c**2))
        if tail > SPAN_TOLERANCE * max(total, 1.0):
            raise TruncationError(f"target profile leaves the retained span (L² tail {tail:.3e})")
        return c

    def exact_modes(self, domain: SpectralDomain, grid: TimeGrid) -> np.ndarray:
        """c_i τ(t_n) as an array of shape (modes, nodes)."""
        return np.outer(self.profile_coefficients(domain), self.time(grid.nodes))


@dataclass(frozen=True)
class ManufacturedModeForcing:
    """f_i(t) = c (τ'(t) + λ (k∗τ)(t)) and its derivative c (τ'' + λ (k τ(0) + k∗τ')).

    With τ(0) != 0 the derivative grows like t^{-α0} at 0, so f_i is in H¹ only for α0 < 1/2.
    """

    coefficient: float
    lam: float
    kernel: SplitKernel
    time: TimeFunction

    @property
    def derivative_square_integrable(self) -> bool:
        return self.lam == 0.0 or float(self.time(0.0)) == 0.0 or self.kernel.alpha0 < 0.5

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        flat = t.reshape(-1)
        memory = kernel_convolution(self.kernel, self.time, flat)
        return (self.coefficient * (self.time.derivative(flat) + self.lam * memory)).reshape(t.shape)

    def derivative(self, t):
        t = np.asarray(t, dtype=float)
        flat = t.reshape(-1)
        memory = kernel_convolution(self.kernel, self.time.derivative, flat)
        start = float(self.time(0.0))
        jump = np.full_like(flat, math.inf if start != 0.0 else 0.0)
        positive = flat > 0.0
        jump[positive] = kernel_eval(self.kernel, flat[positive]) * start
        value = self.time.second_derivative(flat) + self.lam * (jump + memory)
        return (self.coefficient * value).reshape(t.shape)


def manufactured_forcing(
    domain: SpectralDomain, kernel: SplitKernel, target: SeparableTarget
) -> list[ManufacturedModeForcing | None]:
    """Per-mode forcing under which X(x)τ(t) solves the equation; None where c_i = 0."""
    coefficients = target.profile_coefficients(domain)
    lam = eigenvalues(domain)
    forcing = [
        None if c == 0.0 else ManufacturedModeForcing(float(c), float(lam[i]), kernel, target.time)
        for i, c in enumerate(coefficients)
    ]
    if any(f is not None and not f.derivative_square_integrable for f in forcing):
        logger.warning(
            "τ(0) != 0 with α0 = %g: the forcing derivative is not square integrable, "
            "so its H¹ norms depend on the grid",
            kernel.alpha0,
        )
    return forcing


def manufactured_problem(domain: SpectralDomain, kernel: SplitKernel, target: SeparableTarget) -> FieldProblem:
    forcing = manufactured_forcing(domain, kernel, target)
    start = float(target.time(0.0))
    initial = tuple(float(c) * start for c in target.profile_coefficients(domain))
    pairs = tuple(None if f is None else (f, f.derivative) for f in forcing)
    return FieldProblem(domain, kernel, initial, pairs)
