"""Two-parameter Mittag-Leffler function E_{α,β}(z) on the negative real axis.

Three evaluation regimes share the work:

* ``series``     |z| <= 1, Taylor series with compensated summation;
* ``contour``    1 < |z| < threshold, inverse Laplace transform on an optimal
                 parabolic contour (residues of the poles right of the contour
                 are added back);
* ``asymptotic`` |z| >= threshold, E_{α,β}(-x) ~ Σ_{k=1}^{K} (-1)^{k+1} x^{-k} / Γ(β - αk).

The threshold depends on (α, β, tolerance) and is chosen where the truncated
asymptotic expansion plus the exponentially small pole contribution falls
below the tolerance, so neighbouring regimes agree at the handover.
"""

import logging
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.interpolate import CubicSpline

from vemsolver.errors import AccuracyError, DomainError
from vemsolver.special.functions import rgamma

logger = logging.getLogger(__name__)

DEFAULT_TOLERANCE = 1e-15
SERIES_RADIUS = 1.0
MAX_SERIES_TERMS = 5000
ASYMPTOTIC_TERMS = 12
CONTOUR_MAX_NODES = 200
CONTOUR_MAX_RELAXATIONS = 6
TABLE_NODES_PER_DECADE = 400
TABLE_X_CAP = 1e10

_LOG_EPS = math.log(np.finfo(float).eps)
_REGIMES = ("series", "contour", "asymptotic")


@dataclass(frozen=True)
class MLParams:
    alpha: float
    beta: float
    eval_tolerance: float = DEFAULT_TOLERANCE

    def __post_init__(self):
        if not 0.0 < self.alpha <= 2.0:
            raise DomainError(f"Mittag-Leffler order alpha must lie in (0, 2], got {self.alpha}")
        if not self.beta > 0.0:
            raise DomainError(f"Mittag-Leffler parameter beta must be positive, got {self.beta}")
        if not self.eval_tolerance > 0.0:
            raise DomainError(f"eval_tolerance must be positive, got {self.eval_tolerance}")

    @property
    def working_tolerance(self) -> float:
        return max(self.eval_tolerance, DEFAULT_TOLERANCE)


# ─── Series ───────────────────────────────────────────────────


@lru_cache(maxsize=256)
def _series_coefficients(alpha: float, beta: float, tol: float) -> np.ndarray | None:
    """1/Γ(αk + β) up to the first k where the terms are negligible for |z| <= 1."""
    ks = np.arange(MAX_SERIES_TERMS, dtype=float)
    coefficients = rgamma(alpha * ks + beta)
    scale = min(abs(coefficients[0]) or 1.0, 1.0)
    past_peak = alpha * ks + beta > 2.0
    small = past_peak & (np.abs(coefficients) <= 1e-2 * tol * scale)
    if not np.any(small):
        return None
    stop = int(np.argmax(small)) + 1
    return coefficients[:stop]


def _series(p: MLParams, z: float) -> tuple[float, float] | None:
    coefficients = _series_coefficients(p.alpha, p.beta, p.working_tolerance)
    if coefficients is None:
        return None
    terms = coefficients * z ** np.arange(coefficients.size)
    return math.fsum(terms), abs(terms[-1])


# ─── Asymptotic expansion ─────────────────────────────────────


@lru_cache(maxsize=256)
def _asymptotic_coefficients(alpha: float, beta: float) -> np.ndarray:
    """Coefficients a_k of x^{-k}, k = 0..K (a_0 = 0)."""
    ks = np.arange(1, ASYMPTOTIC_TERMS + 1, dtype=float)
    signs = np.where(ks % 2 == 1, 1.0, -1.0)
    return np.concatenate(([0.0], signs * rgamma(beta - alpha * ks)))


def _asymptotic_error(alpha: float, beta: float, x: float) -> float:
    truncation = abs(rgamma(beta - alpha * (ASYMPTOTIC_TERMS + 1))) * x ** -(ASYMPTOTIC_TERMS + 1)
    if alpha < 1.0:
        return truncation
    radius = x ** (1.0 / alpha)
    real_part = -x if alpha == 1.0 else radius * math.cos(math.pi / alpha)
    if real_part >= 0.0:
        return math.inf
    poles = 2.0 / alpha * radius ** (1.0 - beta) * math.exp(real_part)
    return truncation + poles


@lru_cache(maxsize=256)
def asymptotic_threshold(alpha: float, beta: float, tol: float = DEFAULT_TOLERANCE) -> float:
    """Smallest x = 10^{j/16} >= 10 from which the asymptotic regime meets ``tol``."""
    tol = max(tol, DEFAULT_TOLERANCE)
    coefficients = _asymptotic_coefficients(alpha, beta)
    powers = np.arange(coefficients.size)
    for j in range(16, 16 * 13):
        x = 10.0 ** (j / 16.0)
        lead = float(np.max(np.abs(coefficients) * x ** -powers.astype(float)))
        scale = max(lead, 1.0 / x)
        if _asymptotic_error(alpha, beta, x) <= tol * scale:
            return x
    return math.inf


def _asymptotic(p: MLParams, x: float) -> tuple[float, float]:
    coefficients = _asymptotic_coefficients(p.alpha, p.beta)
    terms = coefficients[1:] * x ** -np.arange(1, coefficients.size, dtype=float)
    return math.fsum(terms), _asymptotic_error(p.alpha, p.beta, x)


# ─── Contour inversion ────────────────────────────────────────


def _optimal_param_rb(phi_j, phi_j1, pj, qj, log_epsilon):
    """Contour parameters for a region bounded on the right by a singularity."""
    fac = 1.01
    f_max = math.exp(log_epsilon - _LOG_EPS)
    sq_phi_j = math.sqrt(phi_j)
    threshold = 2.0 * math.sqrt(log_epsilon - _LOG_EPS)
    sq_phi_j1 = min(math.sqrt(phi_j1), threshold - sq_phi_j)
    f_bar = 1.0
    admissible = False

    if pj < 1.0e-14 and qj < 1.0e-14:
        sq_bar_j, sq_bar_j1 = sq_phi_j, sq_phi_j1
        admissible = True
    elif pj < 1.0e-14:
        sq_bar_j = sq_phi_j
        f_min = fac * (sq_phi_j / (sq_phi_j1 - sq_phi_j)) ** qj if sq_phi_j > 0 else fac
        if f_min < f_max:
            f_bar = f_min + f_min / f_max * (f_max - f_min)
            fq = f_bar ** (-1.0 / qj)
            sq_bar_j1 = (2.0 * sq_phi_j1 - fq * sq_phi_j) / (2.0 + fq)
            admissible = True
    elif qj < 1.0e-14:
        sq_bar_j1 = sq_phi_j1
        f_min = fac * (sq_phi_j1 / (sq_phi_j1 - sq_phi_j)) ** pj
        if f_min < f_max:
            f_bar = f_min + f_min / f_max * (f_max - f_min)
            fp = f_bar ** (-1.0 / pj)
            sq_bar_j = (2.0 * sq_phi_j + fp * sq_phi_j1) / (2.0 - fp)
            admissible = True
    else:
        f_min = fac * (sq_phi_j + sq_phi_j1) / (sq_phi_j1 - sq_phi_j) ** max(pj, qj)
        if f_min < f_max:
            f_min = max(f_min, 1.5)
            f_bar = f_min + f_min / f_max * (f_max - f_min)
            fp = f_bar ** (-1.0 / pj)
            fq = f_bar ** (-1.0 / qj)
            w = -phi_j1 / log_epsilon
            den = 2.0 + w - (1.0 + w) * fp + fq
            sq_bar_j = ((2.0 + w + fq) * sq_phi_j + fp * sq_phi_j1) / den
            sq_bar_j1 = (-(1.0 + w) * fq * sq_phi_j + (2.0 + w - (1.0 + w) * fp) * sq_phi_j1) / den
            admissible = True

    if not admissible:
        return 0.0, 0.0, math.inf

    log_epsilon = log_epsilon - math.log(f_bar)
    w = -sq_bar_j1**2 / log_epsilon
    mu = (((1.0 + w) * sq_bar_j + sq_bar_j1) / (2.0 + w)) ** 2
    h = -2.0 * math.pi / log_epsilon * (sq_bar_j1 - sq_bar_j) / ((1.0 + w) * sq_bar_j + sq_bar_j1)
    n = math.ceil(math.sqrt(1.0 - log_epsilon / mu) / h)
    return mu, h, n


def _optimal_param_ru(phi_j, pj, log_epsilon):
    """Contour parameters for the right-unbounded region."""
    sq_phi_j = math.sqrt(phi_j)
    phi_bar = phi_j * 1.01 if phi_j > 0.0 else 0.01
    sq_bar = math.sqrt(phi_bar)
    f_min, f_max, f_tar = 1.0, 10.0, 5.0

    while True:
        log_eps_phi = log_epsilon / phi_bar
        n = math.ceil(phi_bar / math.pi * (1.0 - 1.5 * log_eps_phi + math.sqrt(1.0 - 2.0 * log_eps_phi)))
        a = math.pi * n / phi_bar
        sq_mu = sq_bar * abs(4.0 - a) / abs(7.0 - math.sqrt(1.0 + 12.0 * a))
        if pj < 1.0e-14:
            break
        f_bar = ((sq_bar - sq_phi_j) / sq_mu) ** (-pj)
        if f_min < f_bar < f_max:
            break
        sq_bar = f_tar ** (-1.0 / pj) * sq_mu + sq_phi_j
        phi_bar = sq_bar**2

    mu = sq_mu**2
    h = (-3.0 * a - 2.0 + 2.0 * math.sqrt(1.0 + 12.0 * a)) / (4.0 - a) / n

    threshold = log_epsilon - _LOG_EPS
    if mu > threshold:
        q = 0.0 if abs(pj) < 1.0e-14 else f_tar ** (-1.0 / pj) * math.sqrt(mu)
        phi_bar = (q + sq_phi_j) ** 2
        if phi_bar < threshold:
            w = math.sqrt(_LOG_EPS / (_LOG_EPS - log_epsilon))
            u = math.sqrt(-phi_bar / _LOG_EPS)
            mu = threshold
            n = math.ceil(w * log_epsilon / 2.0 / math.pi / (u * w - 1.0))
            h = math.sqrt(_LOG_EPS / (_LOG_EPS - log_epsilon)) / n
        else:
            n, h = math.inf, 0.0
    return mu, h, n


def _contour(p: MLParams, z: float) -> tuple[float, float]:
    """Inverse Laplace transform of s^{α-β}/(s^α - z) along a parabolic contour.

    Returns the value and the accuracy actually targeted (which grows when the
    node budget forces a relaxation).
    """
    alpha, beta = p.alpha, p.beta
    log_epsilon = math.log(p.working_tolerance)
    theta = math.pi
    k_min = math.ceil(-alpha / 2.0 - theta / (2.0 * math.pi))
    k_max = math.floor(alpha / 2.0 - theta / (2.0 * math.pi))
    ks = np.arange(k_min, k_max + 1)
    poles = abs(z) ** (1.0 / alpha) * np.exp(1j * (theta + 2.0 * math.pi * ks) / alpha)
    phi = (poles.real + np.abs(poles)) / 2.0
    order = np.argsort(phi, kind="stable")
    phi, poles = phi[order], poles[order]
    keep = phi > 1.0e-15
    poles = np.concatenate(([0j], poles[keep]))
    phi = np.concatenate(([0.0], phi[keep], [math.inf]))

    count = poles.size
    p_strength = np.ones(count)
    p_strength[0] = max(0.0, -2.0 * (alpha - beta + 1.0))
    q_strength = np.ones(count)
    q_strength[-1] = math.inf

    mu_v = np.full(count, math.inf)
    h_v = np.full(count, math.inf)
    n_v = np.full(count, math.inf)
    for _ in range(CONTOUR_MAX_RELAXATIONS + 1):
        regions = np.nonzero((phi[:-1] < log_epsilon - _LOG_EPS) & (phi[:-1] < phi[1:]))[0]
        for j in regions:
            if j < count - 1:
                mu_v[j], h_v[j], n_v[j] = _optimal_param_rb(
                    phi[j], phi[j + 1], p_strength[j], q_strength[j], log_epsilon
                )
            else:
                mu_v[j], h_v[j], n_v[j] = _optimal_param_ru(phi[j], p_strength[j], log_epsilon)
        if n_v.min() <= CONTOUR_MAX_NODES:
            break
        log_epsilon += math.log(10.0)
    else:
        raise AccuracyError(
            f"contour inversion for E_{{{alpha},{beta}}}({z}) found no admissible contour",
            math.exp(log_epsilon),
        )

    best = int(np.argmin(n_v))
    n, mu, h = int(n_v[best]), mu_v[best], h_v[best]
    u = h * np.arange(-n, n + 1)
    s = mu * (1j * u + 1.0) ** 2
    ds = -2.0 * mu * u + 2j * mu
    integrand = np.exp(s) * s ** (alpha - beta) / (s**alpha - z) * ds
    integral = h * np.sum(integrand) / (2j * math.pi)
    right_poles = poles[best + 1 :]
    residues = np.sum(right_poles ** (1.0 - beta) * np.exp(right_poles)) / alpha
    return float((integral + residues).real), math.exp(log_epsilon)


# ─── Public API ───────────────────────────────────────────────


def regime_for(p: MLParams, z: float) -> str:
    """Regime the automatic evaluation uses at z <= 0."""
    x = -z
    if x <= SERIES_RADIUS:
        return "series"
    if x >= asymptotic_threshold(p.alpha, p.beta, p.working_tolerance):
        return "asymptotic"
    return "contour"


def mittag_leffler(p: MLParams, z: float, regime: str | None = None) -> float:
    """E_{α,β}(z) for real z <= 0.

    ``regime`` forces one evaluation path; it exists to cross-check the
    handover points and is normally left to the automatic choice.
    """
    z = float(z)
    if not z <= 0.0:
        raise DomainError(f"mittag_leffler is implemented for z <= 0, got {z}")
    if regime is not None and regime not in _REGIMES:
        raise DomainError(f"unknown Mittag-Leffler regime {regime!r}")
    if z == 0.0:
        return rgamma(p.beta)

    tol = p.working_tolerance
    if regime == "series":
        result = _series(p, z)
        if result is None:
            raise AccuracyError(f"series for E_{{{p.alpha},{p.beta}}} needs more than {MAX_SERIES_TERMS} terms")
        return result[0]
    if regime == "asymptotic":
        return _asymptotic(p, -z)[0]

    if regime is None:
        chosen = regime_for(p, z)
        if chosen == "series":
            result = _series(p, z)
            if result is not None and result[1] <= tol * max(abs(result[0]), tol):
                return result[0]
            logger.debug("series for E_{%s,%s}(%s) did not converge, using contour", p.alpha, p.beta, z)
        elif chosen == "asymptotic":
            value, estimate = _asymptotic(p, -z)
            if estimate <= tol * max(abs(value), 1.0 / -z):
                return value

    value, achieved = _contour(p, z)
    if not math.isfinite(value):
        raise AccuracyError(f"E_{{{p.alpha},{p.beta}}}({z}) is not finite", achieved)
    if achieved > 1e4 * tol:
        raise AccuracyError(f"E_{{{p.alpha},{p.beta}}}({z}) missed tolerance {tol:.1e}", achieved)
    if achieved > tol:
        logger.warning("contour accuracy relaxed to %.1e for E_{%s,%s}(%s)", achieved, p.alpha, p.beta, z)
    return value


def ml_kernel_weighted(p: MLParams, x: float) -> float:
    """x · E_{α,2}(-x), bounded uniformly in x >= 0."""
    if p.beta != 2.0:
        raise DomainError(f"ml_kernel_weighted needs beta = 2, got {p.beta}")
    x = float(x)
    if not x >= 0.0:
        raise DomainError(f"ml_kernel_weighted requires x >= 0, got {x}")
    if x == 0.0:
        return 0.0
    return x * mittag_leffler(p, -x)


# ─── Vectorised table ─────────────────────────────────────────


class MittagLefflerTable:
    """E_{α,β}(-x) for arrays x >= 0.

    Series and asymptotic regimes are evaluated directly; the contour regime is
    served by a cubic spline in ln x through exact contour values.
    """

    def __init__(
        self,
        alpha: float,
        beta: float,
        tolerance: float = DEFAULT_TOLERANCE,
        nodes_per_decade: int = TABLE_NODES_PER_DECADE,
    ):
        self.params = MLParams(alpha, beta, tolerance)
        self.threshold = asymptotic_threshold(alpha, beta, self.params.working_tolerance)
        coefficients = _series_coefficients(alpha, beta, self.params.working_tolerance)
        if coefficients is None:
            raise AccuracyError(f"series for E_{{{alpha},{beta}}} needs more than {MAX_SERIES_TERMS} terms")
        self._series = coefficients
        self._asymptotic = _asymptotic_coefficients(alpha, beta)
        self.upper = min(self.threshold, TABLE_X_CAP)
        count = max(8, math.ceil(math.log10(self.upper) * nodes_per_decade))
        log_nodes = np.linspace(0.0, math.log(self.upper), count + 1)
        values = np.array([_contour(self.params, -math.exp(s))[0] for s in log_nodes])
        self._spline = CubicSpline(log_nodes, values)
        logger.info(
            "Mittag-Leffler table E_{%.6g,%.6g}: %d contour nodes, asymptotic from x=%.3g",
            alpha, beta, count + 1, self.threshold,
        )

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if np.any(~(x >= 0.0)):
            raise DomainError("MittagLefflerTable expects x >= 0")
        out = np.empty_like(x)
        low = x <= SERIES_RADIUS
        high = x >= self.threshold
        mid = ~(low | high) & (x <= self.upper)
        out[low] = np.polynomial.polynomial.polyval(-x[low], self._series)
        out[high] = np.polynomial.polynomial.polyval(1.0 / x[high], self._asymptotic)
        out[mid] = self._spline(np.log(x[mid]))
        rest = ~(low | high | mid)
        if np.any(rest):
            out[rest] = [mittag_leffler(self.params, -xi) for xi in x[rest]]
        return out


@lru_cache(maxsize=64)
def ml_table(alpha: float, beta: float) -> MittagLefflerTable:
    return MittagLefflerTable(alpha, beta)
