import logging
import math

import numpy as np
import pytest
from scipy import special as sp

from vemsolver.errors import InputError, TruncationError
from vemsolver.field import (
    FieldProblem,
    SeparableTarget,
    SpectralDomain,
    check_orthonormality,
    eigenpairs,
    eigenvalues,
    manufactured_forcing,
    manufactured_problem,
    project,
    random_field_family,
    sobolev_norm,
    solve_field,
)
from vemsolver.field.domain import l2_norm_pointwise
from vemsolver.modes import TimeFunction, TimeGrid, volterra_oracle_solve

PI_SQUARED = math.pi**2
SQRT2 = math.sqrt(2.0)


# ─── Eigenpairs ───────────────────────────────────────────────


def test_interval_eigenvalues():
    lam = eigenvalues(SpectralDomain.interval(1.0, 4))
    assert np.allclose(lam, PI_SQUARED * np.array([1.0, 4.0, 9.0, 16.0]), rtol=1e-15)


def test_rectangle_eigenvalues_are_sorted():
    pairs = eigenpairs(SpectralDomain.rectangle(1.0, 1.0, 5))
    assert pairs[0].index == (1, 1)
    assert pairs[0].lam == pytest.approx(2.0 * PI_SQUARED, rel=1e-15)
    assert {pairs[1].index, pairs[2].index} == {(1, 2), (2, 1)}
    assert all(b.lam >= a.lam for a, b in zip(pairs[:-1], pairs[1:]))


def test_third_interval_eigenvalue():
    assert eigenvalues(SpectralDomain.interval(1.0, 3))[2] == pytest.approx(9.0 * PI_SQUARED, rel=1e-15)


@pytest.mark.parametrize(
    "domain",
    [SpectralDomain.interval(1.0, 16), SpectralDomain.interval(2.5, 10), SpectralDomain.rectangle(1.0, 2.0, 12)],
)
def test_orthonormality(domain):
    assert check_orthonormality(domain) <= 1e-12


# ─── Projection and norms ─────────────────────────────────────


def test_project_eigenfunction():
    domain = SpectralDomain.interval(1.0, 8)
    c = project(domain, eigenpairs(domain)[1])
    assert np.allclose(c, np.eye(8)[1], rtol=0.0, atol=1e-13)


def test_project_sine_combination():
    domain = SpectralDomain.interval(1.0, 8)
    c = project(domain, lambda x: np.sin(math.pi * x) + 0.5 * np.sin(3.0 * math.pi * x))
    expected = np.zeros(8)
    expected[0] = 1.0 / SQRT2
    expected[2] = 0.5 / SQRT2
    assert np.allclose(c, expected, rtol=0.0, atol=1e-13)


def test_project_parabola():
    domain = SpectralDomain.interval(1.0, 12)
    c = project(domain, lambda x: x * (1.0 - x))
    i = np.arange(1, 13)
    expected = np.where(i % 2 == 1, 4.0 * SQRT2 / (i * math.pi) ** 3, 0.0)
    assert np.allclose(c, expected, rtol=0.0, atol=1e-13)


def test_parseval_for_profiles_in_the_span():
    domain = SpectralDomain.rectangle(1.0, 1.0, 6)
    pairs = eigenpairs(domain)

    def profile(x, y):
        return 2.0 * pairs[0](x, y) - 0.5 * pairs[4](x, y)

    c = project(domain, profile)
    assert float(np.sum(c**2)) == pytest.approx(l2_norm_pointwise(domain, profile) ** 2, rel=1e-12)
    assert float(np.sum(c**2)) == pytest.approx(4.25, rel=1e-12)


@pytest.mark.parametrize("count", [32, 64])
@pytest.mark.parametrize(
    "profile",
    [
        lambda x: x * (1.0 - x),
        lambda x: np.sin(math.pi * x) ** 3,
        lambda x: x**2 * (1.0 - x),
    ],
    ids=["parabola", "sine-cubed", "cubic"],
)
def test_parseval_for_smooth_profiles(profile, count):
    domain = SpectralDomain.interval(1.0, count)
    c = project(domain, profile)
    assert abs(float(np.sum(c**2)) - l2_norm_pointwise(domain, profile) ** 2) <= 1e-6


def test_sobolev_norm_examples():
    domain = SpectralDomain.interval(1.0, 4)
    assert sobolev_norm(domain, [1.0], 0.0) == pytest.approx(1.0)
    assert sobolev_norm(domain, [1.0], 2.0) == pytest.approx(PI_SQUARED)
    assert sobolev_norm(domain, [1.0, 1.0], 0.0) == pytest.approx(SQRT2)


def test_sobolev_norm_rejects_too_many_coefficients():
    with pytest.raises(TruncationError):
        sobolev_norm(SpectralDomain.interval(1.0, 4), np.ones(5), 2.0)


# ─── Field solve ──────────────────────────────────────────────


def test_zero_problem_has_zero_norms(affine_kernel):
    domain = SpectralDomain.interval(1.0, 6)
    solution = solve_field(FieldProblem.from_coefficients(domain, affine_kernel), TimeGrid(1.0, 32, 2.0))
    assert all(value == 0.0 for value in solution.report.as_dict().values())
    assert np.all(solution.coefficients(32) == 0.0)


def test_modes_decouple(affine_kernel):
    domain = SpectralDomain.interval(1.0, 5)
    forcing = TimeFunction.parse("poly:1,1")
    p = FieldProblem.from_coefficients(domain, affine_kernel, [0.5], [forcing])
    grid = TimeGrid.graded_for(1.0, 64, affine_kernel.alpha0)
    solution = solve_field(p, grid)
    single = volterra_oracle_solve(p.mode_problem(0), grid)
    assert np.array_equal(solution.modes[0].values, single.values)
    for mode in solution.modes[1:]:
        assert np.all(mode.values == 0.0)


def test_evaluate_sums_modes(constant_kernel):
    domain = SpectralDomain.interval(1.0, 3)
    p = FieldProblem.from_coefficients(domain, constant_kernel, [1.0, 0.0, 0.25])
    grid = TimeGrid(1.0, 16, 2.0)
    solution = solve_field(p, grid)
    x = np.linspace(0.0, 1.0, 11)
    pairs = eigenpairs(domain)
    expected = solution.modes[0].values[0] * pairs[0](x) + solution.modes[2].values[0] * pairs[2](x)
    assert np.allclose(solution.evaluate(0, x), expected)
    assert np.allclose(solution.evaluate(16, np.array([0.0, 1.0])), 0.0, atol=1e-15)


def test_workers_do_not_change_the_result(affine_kernel):
    domain = SpectralDomain.interval(1.0, 6)
    (p,) = random_field_family(domain, affine_kernel, 1, seed=3)
    grid = TimeGrid.graded_for(1.0, 32, affine_kernel.alpha0)
    serial = solve_field(p, grid)
    threaded = solve_field(p, grid, workers=3)
    for a, b in zip(serial.modes, threaded.modes):
        assert np.array_equal(a.values, b.values)
    assert serial.report == threaded.report


@pytest.mark.parametrize("count", [8, 16])
def test_norms_converge_with_truncation(affine_kernel, count):
    def initial(x):
        return x**3 * (1.0 - x) ** 3

    grid = TimeGrid.graded_for(1.0, 64, affine_kernel.alpha0)
    coarse_domain = SpectralDomain.interval(1.0, count)
    fine_domain = SpectralDomain.interval(1.0, 2 * count)
    coarse = solve_field(FieldProblem.from_profiles(coarse_domain, affine_kernel, initial), grid).report
    fine = solve_field(FieldProblem.from_profiles(fine_domain, affine_kernel, initial), grid).report
    # tail modes beyond the coarse truncation bound the change
    c = project(fine_domain, initial)[count:]
    lam = eigenvalues(fine_domain)[count:]
    assert abs(fine.h1l2_norm - coarse.h1l2_norm) <= 2.0 * math.sqrt(float(np.sum(lam**2 * c**2)))
    assert abs(fine.h1h2_norm - coarse.h1h2_norm) <= 2.0 * math.sqrt(float(np.sum(lam**4 * c**2)))


def test_from_profiles_requires_boundary_values(affine_kernel):
    with pytest.raises(InputError):
        FieldProblem.from_profiles(SpectralDomain.interval(1.0, 4), affine_kernel, lambda x: 1.0 + 0.0 * x)


def test_from_profiles_projects_forcing(affine_kernel):
    domain = SpectralDomain.interval(1.0, 4)
    p = FieldProblem.from_profiles(
        domain,
        affine_kernel,
        lambda x: np.sin(math.pi * x),
        [(lambda x: np.sin(math.pi * x), TimeFunction.parse("constant:2"))],
    )
    assert p.initial[0] == pytest.approx(1.0 / SQRT2, abs=1e-13)
    forcing, _ = p.forcing[0]
    assert float(forcing(0.3)) == pytest.approx(SQRT2, abs=1e-12)
    assert p.forcing[1] is None or float(p.forcing[1][0](0.3)) == pytest.approx(0.0, abs=1e-12)


# ─── Manufactured solutions ───────────────────────────────────


def test_manufactured_forcing_for_a_constant_time_part(constant_kernel):
    domain = SpectralDomain.interval(1.0, 2)
    target = SeparableTarget(TimeFunction.parse("constant:1"), coefficients=(1.0,))
    forcing, rest = manufactured_forcing(domain, constant_kernel, target)
    assert rest is None
    t = np.array([0.04, 0.25, 1.0])
    assert np.allclose(forcing(t), PI_SQUARED * t**0.5 / sp.gamma(1.5), rtol=1e-12)


def test_manufactured_forcing_for_a_quadratic_time_part(constant_kernel):
    domain = SpectralDomain.interval(1.0, 1)
    target = SeparableTarget(TimeFunction.parse("poly:1,0,1"), coefficients=(1.0,))
    (forcing,) = manufactured_forcing(domain, constant_kernel, target)
    t = np.array([0.1, 0.5, 1.0])
    expected = 2.0 * t + PI_SQUARED * (t**0.5 / sp.gamma(1.5) + 2.0 * t**2.5 / sp.gamma(3.5))
    assert np.allclose(forcing(t), expected, rtol=1e-12)


def test_manufactured_solution_is_recovered(affine_kernel):
    domain = SpectralDomain.interval(1.0, 3)
    target = SeparableTarget(TimeFunction.parse("poly:1,1,-0.5"), profile=lambda x: np.sin(math.pi * x))
    p = manufactured_problem(domain, affine_kernel, target)
    errors = []
    for count in (16, 32, 64):
        grid = TimeGrid.graded_for(1.0, count, affine_kernel.alpha0)
        solution = solve_field(p, grid)
        computed = np.array([mode.values for mode in solution.modes])
        errors.append(float(np.max(np.abs(computed - target.exact_modes(domain, grid)))))
    assert all(b < a for a, b in zip(errors[:-1], errors[1:]))
    assert errors[-1] < errors[0] / 4.0


def test_manufactured_profile_outside_the_span(affine_kernel):
    target = SeparableTarget(TimeFunction.parse("constant:1"), profile=lambda x: x * (1.0 - x))
    with pytest.raises(TruncationError):
        manufactured_forcing(SpectralDomain.interval(1.0, 4), affine_kernel, target)


def test_manufactured_forcing_warns_outside_h1(affine_kernel, caplog):
    target = SeparableTarget(TimeFunction.parse("constant:1"), coefficients=(1.0,))
    with caplog.at_level(logging.WARNING, logger="vemsolver.field.solve"):
        (forcing, *_) = manufactured_forcing(SpectralDomain.interval(1.0, 2), affine_kernel, target)
    assert not forcing.derivative_square_integrable
    assert "not square integrable" in caplog.text


def test_manufactured_forcing_vanishing_at_start_is_quiet(affine_kernel, caplog):
    target = SeparableTarget(TimeFunction.parse("poly:0,1"), coefficients=(1.0,))
    with caplog.at_level(logging.WARNING, logger="vemsolver.field.solve"):
        (forcing, *_) = manufactured_forcing(SpectralDomain.interval(1.0, 2), affine_kernel, target)
    assert forcing.derivative_square_integrable
    assert "not square integrable" not in caplog.text


def test_manufactured_coefficients_beyond_truncation(affine_kernel):
    target = SeparableTarget(TimeFunction.parse("constant:1"), coefficients=(1.0, 0.0, 0.0, 0.0, 0.5))
    with pytest.raises(TruncationError):
        manufactured_problem(SpectralDomain.interval(1.0, 4), affine_kernel, target)


# ─── Random family ────────────────────────────────────────────


@pytest.mark.slow
def test_family_ratios_are_uniformly_bounded(affine_kernel):
    domain = SpectralDomain.interval(1.0, 8)
    grid = TimeGrid.graded_for(1.0, 128, affine_kernel.alpha0)
    reports = [solve_field(p, grid).report for p in random_field_family(domain, affine_kernel, 50, seed=2024)]
    for name in ("stability_ratio", "regularity_ratio"):
        ratios = np.array([getattr(report, name) for report in reports])
        assert np.all(np.isfinite(ratios))
        assert np.max(ratios) <= 10.0 * np.median(ratios)


@pytest.mark.slow
def test_regularity_ratio_survives_refinement(affine_kernel):
    domain = SpectralDomain.interval(1.0, 8)
    for p in random_field_family(domain, affine_kernel, 5, seed=2024):
        coarse = solve_field(p, TimeGrid.graded_for(1.0, 128, affine_kernel.alpha0)).report
        fine = solve_field(p, TimeGrid.graded_for(1.0, 512, affine_kernel.alpha0)).report
        assert fine.regularity_ratio <= 1.05 * coarse.regularity_ratio
