"""Gamma, log-gamma, reciprocal gamma and digamma on the positive axis.

All functions accept a float or a numpy array and return the same shape.
"""

import math

import numpy as np

from vemsolver.errors import DomainError

# Lanczos approximation, g = 7, n = 9
LANCZOS_G = 7.0
LANCZOS_COEFFICIENTS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
_SQRT_TWO_PI = math.sqrt(2.0 * math.pi)
_HALF_LOG_TWO_PI = 0.5 * math.log(2.0 * math.pi)

# Bernoulli terms B_2k / (2k) of the digamma asymptotic series
_DIGAMMA_ASYMPTOTIC = (
    1.0 / 12.0,
    -1.0 / 120.0,
    1.0 / 252.0,
    -1.0 / 240.0,
    1.0 / 132.0,
    -691.0 / 32760.0,
    1.0 / 12.0,
)
_DIGAMMA_SHIFT = 6.0


def _as_array(x) -> tuple[np.ndarray, bool]:
    arr = np.asarray(x, dtype=float)
    return arr, arr.ndim == 0


def _unwrap(value: np.ndarray, scalar: bool):
    return float(value) if scalar else value


def _require_positive(x: np.ndarray, name: str) -> None:
    if np.any(~(x > 0.0)):
        bad = x[~(x > 0.0)].ravel()[0]
        raise DomainError(f"{name} requires x > 0, got {bad!r}")


def _lanczos_sum(z: np.ndarray) -> np.ndarray:
    acc = np.full_like(z, LANCZOS_COEFFICIENTS[0])
    for i, c in enumerate(LANCZOS_COEFFICIENTS[1:], start=1):
        acc = acc + c / (z + i)
    return acc


def _gamma_right(x: np.ndarray) -> np.ndarray:
    """Gamma for x >= 0.5; the power is split in two to postpone overflow."""
    z = x - 1.0
    t = z + LANCZOS_G + 0.5
    half_power = t ** (0.5 * (z + 0.5))
    return _SQRT_TWO_PI * half_power * (half_power * np.exp(-t)) * _lanczos_sum(z)


def _log_gamma_right(x: np.ndarray) -> np.ndarray:
    z = x - 1.0
    t = z + LANCZOS_G + 0.5
    return _HALF_LOG_TWO_PI + (z + 0.5) * np.log(t) - t + np.log(_lanczos_sum(z))


def gamma(x):
    """Gamma function for x > 0, relative error below 1e-13."""
    arr, scalar = _as_array(x)
    _require_positive(arr, "gamma")
    out = np.empty_like(arr)
    left = arr < 0.5
    right = ~left
    out[right] = _gamma_right(arr[right])
    if np.any(left):
        xl = arr[left]
        out[left] = math.pi / (np.sin(math.pi * xl) * _gamma_right(1.0 - xl))
    return _unwrap(out, scalar)


def log_gamma(x):
    """log Γ(x) for x > 0."""
    arr, scalar = _as_array(x)
    _require_positive(arr, "log_gamma")
    out = np.empty_like(arr)
    left = arr < 0.5
    right = ~left
    out[right] = _log_gamma_right(arr[right])
    if np.any(left):
        xl = arr[left]
        out[left] = math.log(math.pi) - np.log(np.sin(math.pi * xl)) - _log_gamma_right(1.0 - xl)
    return _unwrap(out, scalar)


def rgamma(x):
    """1/Γ(x) for every real x; exactly zero at the poles 0, -1, -2, ...

    Large positive arguments underflow gracefully to zero.
    """
    arr, scalar = _as_array(x)
    out = np.zeros_like(arr)
    right = arr >= 0.5
    out[right] = np.exp(-_log_gamma_right(arr[right]))
    left = (~right) & (arr != np.floor(arr))
    if np.any(left):
        xl = arr[left]
        # reflection: 1/Γ(x) = sin(πx) Γ(1-x) / π
        out[left] = np.sin(math.pi * xl) * np.exp(_log_gamma_right(1.0 - xl)) / math.pi
    return _unwrap(out, scalar)


def digamma(x):
    """ψ(x) = Γ'(x)/Γ(x) for x > 0, absolute error below 1e-12.

    Recurrence ψ(x) = ψ(x+1) - 1/x lifts the argument above 6, where the
    asymptotic series is summed.
    """
    arr, scalar = _as_array(x)
    _require_positive(arr, "digamma")
    y = arr.copy()
    shift = np.zeros_like(arr)
    low = y < _DIGAMMA_SHIFT
    while np.any(low):
        shift[low] -= 1.0 / y[low]
        y[low] += 1.0
        low = y < _DIGAMMA_SHIFT
    inv2 = 1.0 / (y * y)
    series = np.zeros_like(y)
    for c in reversed(_DIGAMMA_ASYMPTOTIC):
        series = (series + c) * inv2
    out = np.log(y) - 0.5 / y - series + shift
    return _unwrap(out, scalar)
