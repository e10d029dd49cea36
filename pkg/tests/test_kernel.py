import math

import numpy as np
import pytest
from scipy import integrate
from scipy import special as sp

from vemsolver.errors import DomainError
from vemsolver.kernel import (
    ExponentFunction,
    SplitKernel,
    beta_mu,
    gtilde,
    gtilde_bound_ratios,
    gtilde_interpolated,
    gtilde_prime,
    kernel_convolution,
    kernel_eval,
)

INV_SQRT_PI = 0.5641895835477563


def graded_points(horizon: float = 1.0, count: int = 200) -> np.ndarray:
    return horizon * (np.arange(1, count + 1) / count) ** 4


# ─── Exponent ─────────────────────────────────────────────────


def test_exponent_parse_forms():
    assert ExponentFunction.parse("constant:0.5").is_constant
    affine = ExponentFunction.parse("affine:0.3,0.1")
    assert affine(1.0) == pytest.approx(0.4)
    assert affine.alpha0 == affine(0.0) == 0.3
    quadratic = ExponentFunction.parse("poly:0.3,0.1,0.2")
    assert quadratic(1.0) == pytest.approx(0.6)
    assert quadratic.second_derivative(0.4) == pytest.approx(0.4)


def test_bump_derivatives_match_finite_differences():
    bump = ExponentFunction.parse("bump:0.4,0.2,0.5,0.3")
    t = np.linspace(0.1, 0.9, 9)
    h = 1e-5
    assert np.allclose(bump.derivative(t), (bump(t + h) - bump(t - h)) / (2 * h), atol=1e-8)
    assert np.allclose(
        bump.second_derivative(t), (bump.derivative(t + h) - bump.derivative(t - h)) / (2 * h), atol=1e-6
    )


@pytest.mark.parametrize(
    "spec",
    ["affine:0.5,0.6", "constant:1.0", "constant:0", "poly:0.5,-0.6", "wave:0.5", "affine", "affine:a,b"],
)
def test_exponent_rejects_bad_specs(spec):
    with pytest.raises(DomainError):
        ExponentFunction.parse(spec)


def test_range_check_uses_the_horizon():
    ExponentFunction.parse("affine:0.3,0.1", horizon=2.0)
    with pytest.raises(DomainError):
        ExponentFunction.parse("affine:0.3,0.1", horizon=8.0)


# ─── Kernel values ────────────────────────────────────────────


def test_kernel_eval_examples():
    constant = SplitKernel.from_spec("constant:0.5", horizon=4.0)
    assert kernel_eval(constant, 1.0) == pytest.approx(INV_SQRT_PI, rel=1e-14)
    assert kernel_eval(constant, 4.0) == pytest.approx(0.2820947917738781, rel=1e-14)
    affine = SplitKernel.from_spec("affine:0.3,0.1")
    assert kernel_eval(affine, 1.0) == pytest.approx(sp.rgamma(0.6), rel=1e-13)


@pytest.mark.parametrize("mu, t, expected", [(1.0, 0.37, 1.0), (0.5, 1.0, INV_SQRT_PI), (2.0, 3.0, 3.0)])
def test_beta_mu_examples(mu, t, expected):
    assert beta_mu(mu, t) == pytest.approx(expected, rel=1e-14)


def test_invalid_arguments(constant_kernel):
    with pytest.raises(DomainError):
        beta_mu(0.0, 1.0)
    with pytest.raises(DomainError):
        beta_mu(0.5, 0.0)
    with pytest.raises(DomainError):
        kernel_eval(constant_kernel, 0.0)
    with pytest.raises(DomainError):
        kernel_eval(constant_kernel, 1.5)
    with pytest.raises(DomainError):
        gtilde(constant_kernel, -1.0)
    with pytest.raises(DomainError):
        SplitKernel(ExponentFunction.constant(0.5), quad_nodes=7)


# ─── Split k = β_{1-α0} + g̃ ───────────────────────────────────


@pytest.mark.parametrize("spec", ["affine:0.5,0.2", "affine:0.3,0.1", "poly:0.3,0.1,0.2", "bump:0.4,0.2,0.5,0.3"])
def test_split_consistency(spec):
    kernel = SplitKernel.from_spec(spec)
    t = graded_points()
    residual = beta_mu(1.0 - kernel.alpha0, t) + gtilde(kernel, t) - kernel_eval(kernel, t)
    assert np.max(np.abs(residual)) <= 1e-8


@pytest.mark.parametrize("alpha", [0.2, 0.5, 0.8])
def test_constant_exponent_degenerates(alpha):
    kernel = SplitKernel(ExponentFunction.constant(alpha))
    t = graded_points()
    assert np.all(gtilde(kernel, t) == 0.0)
    assert np.all(gtilde_prime(kernel, t) == 0.0)
    assert np.allclose(kernel_eval(kernel, t), beta_mu(1.0 - alpha, t), rtol=1e-14, atol=0.0)


def test_gtilde_matches_adaptive_quadrature(affine_kernel):
    t = 0.5
    exponent = affine_kernel.exponent

    def integrand(z):
        a = exponent(z)
        return exponent.derivative(z) * t ** (-a) * (sp.digamma(1.0 - a) - math.log(t)) * sp.rgamma(1.0 - a)

    reference, _ = integrate.quad(integrand, 0.0, t, epsabs=1e-14, epsrel=1e-13)
    value = gtilde(affine_kernel, t)
    assert value == pytest.approx(reference, abs=1e-10)
    assert value == pytest.approx(kernel_eval(affine_kernel, t) - beta_mu(0.5, t), abs=1e-10)


def test_gtilde_vanishes_at_origin(affine_kernel):
    assert abs(gtilde(affine_kernel, 1e-12)) < 1e-4
    assert gtilde_interpolated(affine_kernel, 0.0) == 0.0


def test_interpolated_gtilde_matches_quadrature(affine_kernel):
    t = np.concatenate((np.geomspace(1e-9, 1e-3, 30), np.linspace(1e-3, 1.0, 50)))
    assert np.allclose(gtilde_interpolated(affine_kernel, t), gtilde(affine_kernel, t), rtol=1e-8, atol=1e-8)


@pytest.mark.parametrize("spec, horizon, t", [("affine:0.5,0.2", 1.0, 0.5), ("affine:0.3,0.1", 2.0, 1.0)])
def test_gtilde_prime_matches_extrapolated_differences(spec, horizon, t):
    kernel = SplitKernel.from_spec(spec, horizon=horizon)

    def central(h):
        return (gtilde(kernel, t + h) - gtilde(kernel, t - h)) / (2.0 * h)

    h = 1e-3
    extrapolated = (4.0 * central(h / 2.0) - central(h)) / 3.0
    assert gtilde_prime(kernel, t) == pytest.approx(extrapolated, abs=1e-7)


@pytest.mark.parametrize("spec", ["affine:0.5,0.2", "poly:0.3,0.1,0.2"])
def test_gtilde_growth_bounds(spec):
    kernel = SplitKernel.from_spec(spec)
    value_ratio, slope_ratio = gtilde_bound_ratios(kernel, np.geomspace(1e-6, 1.0, 200))
    for ratio in (value_ratio, slope_ratio):
        assert np.all(np.isfinite(ratio))
        assert np.max(ratio) <= 10.0 * np.median(ratio)


# ─── Convolution ──────────────────────────────────────────────


def test_convolution_with_constant_exponent_is_exact(constant_kernel):
    t = np.linspace(0.01, 1.0, 10)
    ones = kernel_convolution(constant_kernel, np.ones_like, t)
    assert np.allclose(ones, t**0.5 / sp.gamma(1.5), rtol=1e-12)
    quadratic = kernel_convolution(constant_kernel, lambda s: 1.0 + s**2, t)
    expected = t**0.5 / sp.gamma(1.5) + 2.0 * t**2.5 / sp.gamma(3.5)
    assert np.allclose(quadratic, expected, rtol=1e-12)


def test_convolution_with_variable_exponent(affine_kernel):
    for t in (0.05, 0.4, 1.0):
        remainder, _ = integrate.quad(lambda r: gtilde(affine_kernel, r), 0.0, t, epsabs=1e-13, limit=200)
        expected = t**0.5 / sp.gamma(1.5) + remainder
        value = kernel_convolution(affine_kernel, np.ones_like, t)[0]
        assert value == pytest.approx(expected, rel=1e-8)
