import math

import numpy as np
import pytest
from scipy import integrate

from vemsolver.errors import InputError, ResolutionError
from vemsolver.modes import (
    SIGMA_LADDER,
    ModeProblem,
    TimeFunction,
    TimeGrid,
    contraction_probe,
    convergence_study,
    homogeneous_reference,
    picard_solve,
    select_sigma,
    singularity_probe,
    weight_integral,
)

PI_SQUARED = math.pi**2


def problem(kernel, lam=PI_SQUARED, u0=1.0, forcing=None) -> ModeProblem:
    return ModeProblem.with_forcing(lam, u0, TimeFunction.parse(forcing) if forcing else None, kernel)


# ─── Contraction ──────────────────────────────────────────────


def test_contraction_factor_decays_with_sigma(probe_kernel, graded_grid):
    grid = graded_grid(probe_kernel, 256)
    report = contraction_probe(problem(probe_kernel, forcing="poly:1,1"), grid, [1.0, 10.0, 100.0, 1000.0])
    factors = report.factors
    assert report.decreasing
    assert all(b < a for a, b in zip(factors[:-1], factors[1:]))
    assert factors[-1] < 0.5
    assert math.isfinite(report.slope)
    assert report.slope < 0.0


def test_contraction_rows_carry_weight_integrals(probe_kernel, graded_grid):
    grid = graded_grid(probe_kernel, 64)
    report = contraction_probe(problem(probe_kernel), grid, [100.0, 1.0])
    assert [row.sigma for row in report.rows] == [1.0, 100.0]
    for row in report.rows:
        assert row.weight_integral == pytest.approx(weight_integral(0.3, row.sigma, 1.0))


def test_contraction_without_coupling_is_zero(constant_kernel, affine_kernel, graded_grid):
    for p in (problem(constant_kernel), problem(affine_kernel, lam=0.0)):
        report = contraction_probe(p, graded_grid(p.kernel, 64), [1.0, 10.0, 100.0])
        assert report.factors == [0.0, 0.0, 0.0]
        assert report.decreasing
        assert math.isnan(report.slope)


def test_contraction_needs_two_sigmas(probe_kernel):
    with pytest.raises(InputError):
        contraction_probe(problem(probe_kernel), TimeGrid(1.0, 16), [10.0])


def test_selected_sigma_contracts(probe_kernel, graded_grid):
    p = problem(probe_kernel, forcing="poly:1,1")
    grid = graded_grid(probe_kernel, 128)
    sigma = select_sigma(p, grid)
    assert sigma in SIGMA_LADDER
    assert contraction_probe(p, grid, [sigma, 10.0 * sigma]).factors[0] < 0.5


def test_selected_sigma_without_coupling(constant_kernel):
    assert select_sigma(problem(constant_kernel), TimeGrid(1.0, 16)) == 1.0


def test_picard_converges_at_selected_sigma(probe_kernel, graded_grid):
    p = problem(probe_kernel, forcing="poly:1,1")
    solution = picard_solve(p, graded_grid(probe_kernel, 128), tol=1e-10, max_iter=50)
    assert solution.residual <= 1e-10
    assert solution.iterations <= 50


def test_weight_integral_without_damping():
    assert weight_integral(0.3, 0.0, 2.0) == pytest.approx(2.0**0.3 / 0.3, rel=1e-14)


@pytest.mark.parametrize("alpha0, sigma", [(0.3, 1.0), (0.5, 10.0), (0.8, 100.0)])
def test_weight_integral_matches_quadrature(alpha0, sigma):
    reference, _ = integrate.quad(lambda t: math.exp(-sigma * t), 0.0, 1.0, weight="alg", wvar=(alpha0 - 1.0, 0.0))
    assert weight_integral(alpha0, sigma, 1.0) == pytest.approx(reference, rel=1e-10)


# ─── Singularity ──────────────────────────────────────────────


def test_singularity_matches_dominant_balance(constant_kernel):
    report = singularity_probe(problem(constant_kernel), TimeGrid(1.0, 512, 4.0))
    assert report.predicted == pytest.approx(-5.568328, rel=1e-6)
    assert report.relative_error <= 0.05
    assert len(report.samples) == 3


def test_singularity_without_memory(constant_kernel):
    report = singularity_probe(problem(constant_kernel, lam=0.0), TimeGrid(1.0, 512, 4.0))
    assert report.predicted == 0.0
    assert report.limit_estimate == 0.0


def test_singularity_vanishes_for_zero_initial_value(constant_kernel):
    report = singularity_probe(problem(constant_kernel, u0=0.0, forcing="poly:1,1"), TimeGrid(1.0, 512, 4.0))
    assert report.predicted == 0.0
    assert abs(report.limit_estimate) <= 0.05


def test_singularity_needs_resolution_near_origin(constant_kernel):
    with pytest.raises(ResolutionError):
        singularity_probe(problem(constant_kernel), TimeGrid(1.0, 64))


# ─── Convergence ──────────────────────────────────────────────


def test_convergence_against_exact_solution(constant_kernel):
    p = problem(constant_kernel, lam=1.0)
    rows = convergence_study(p, [64, 128, 256, 512], reference=homogeneous_reference(0.5, 1.0))
    assert [row.count for row in rows] == [64, 128, 256, 512]
    assert math.isnan(rows[0].order)
    assert all(row.order >= 0.85 for row in rows[1:])
    assert rows[-1].error <= 1e-3


def test_self_convergence(affine_kernel):
    rows = convergence_study(problem(affine_kernel, forcing="poly:1,1"), [32, 64, 128, 256])
    errors = [row.error for row in rows]
    assert len(rows) == 3
    assert all(b < a for a, b in zip(errors[:-1], errors[1:]))
    assert all(a / b >= 1.8 for a, b in zip(errors[:-1], errors[1:]))


def test_convergence_study_validation(affine_kernel):
    p = problem(affine_kernel)
    with pytest.raises(InputError):
        convergence_study(p, [64])
    with pytest.raises(InputError):
        convergence_study(p, [64, 96])
