"""Dirichlet Laplacian eigenpairs on intervals and rectangles, projection and Ȟˢ norms."""

import logging
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.polynomial.legendre import leggauss

from vemsolver.errors import AccuracyError, DomainError, InputError, TruncationError

logger = logging.getLogger(__name__)

CELL_NODES = 16
CELLS_PER_MODE = 4
PROJECTION_TOLERANCE = 1e-10
BOUNDARY_SAMPLES = 33
ORTHONORMALITY_SAMPLE = 8


@dataclass(frozen=True)
class SpectralDomain:
    dimension: int
    lengths: tuple[float, ...]
    truncation: int

    def __post_init__(self):
        if self.dimension not in (1, 2):
            raise DomainError(f"only 1D intervals and 2D rectangles are supported, got dimension {self.dimension}")
        if len(self.lengths) != self.dimension:
            raise DomainError(f"expected {self.dimension} side lengths, got {len(self.lengths)}")
        if not all(length > 0.0 for length in self.lengths):
            raise DomainError(f"side lengths must be positive, got {self.lengths}")
        if self.truncation < 1:
            raise DomainError(f"truncation must be >= 1, got {self.truncation}")

    @classmethod
    def interval(cls, length: float = 1.0, truncation: int = 16) -> "SpectralDomain":
        return cls(1, (float(length),), truncation)

    @classmethod
    def rectangle(cls, width: float = 1.0, height: float = 1.0, truncation: int = 16) -> "SpectralDomain":
        return cls(2, (float(width), float(height)), truncation)

    def with_truncation(self, truncation: int) -> "SpectralDomain":
        return SpectralDomain(self.dimension, self.lengths, truncation)


@dataclass(frozen=True)
class Eigenpair:
    """λ and φ(x) = Π_d sqrt(2/L_d) sin(k_d π x_d / L_d)."""

    index: tuple[int, ...]
    lam: float
    lengths: tuple[float, ...]

    def factor(self, axis: int, x) -> np.ndarray:
        length = self.lengths[axis]
        return math.sqrt(2.0 / length) * np.sin(self.index[axis] * math.pi * np.asarray(x, dtype=float) / length)

    def __call__(self, *coords) -> np.ndarray:
        if len(coords) != len(self.index):
            raise DomainError(f"eigenfunction on a {len(self.index)}D domain takes {len(self.index)} coordinates")
        out = self.factor(0, coords[0])
        for axis in range(1, len(coords)):
            out = out * self.factor(axis, coords[axis])
        return out


@lru_cache(maxsize=64)
def _eigenpairs(domain: SpectralDomain) -> tuple[Eigenpair, ...]:
    n = domain.truncation
    if domain.dimension == 1:
        (length,) = domain.lengths
        return tuple(Eigenpair((i,), (i * math.pi / length) ** 2, domain.lengths) for i in range(1, n + 1))
    width, height = domain.lengths
    candidates = [
        ((i * math.pi / width) ** 2 + (j * math.pi / height) ** 2, i, j)
        for i in range(1, n + 1)
        for j in range(1, n + 1)
    ]
    candidates.sort()
    return tuple(Eigenpair((i, j), lam, domain.lengths) for lam, i, j in candidates[:n])


def eigenpairs(domain: SpectralDomain) -> list[Eigenpair]:
    """First ``truncation`` Dirichlet eigenpairs of -Δ, sorted by (λ, index)."""
    return list(_eigenpairs(domain))


def eigenvalues(domain: SpectralDomain) -> np.ndarray:
    return np.array([pair.lam for pair in _eigenpairs(domain)])


# ─── Quadrature ───────────────────────────────────────────────


def _axis_rule(length: float, cells: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = leggauss(CELL_NODES)
    edges = np.linspace(0.0, length, cells + 1)
    half = (edges[1:] - edges[:-1])[:, None] / 2.0
    mid = (edges[1:] + edges[:-1])[:, None] / 2.0
    return (mid + half * x[None, :]).ravel(), (half * w[None, :]).ravel()


def _sample(func, domain: SpectralDomain, rules) -> np.ndarray:
    if domain.dimension == 1:
        values = func(rules[0][0])
    else:
        xs, ys = np.meshgrid(rules[0][0], rules[1][0], indexing="ij")
        values = func(xs, ys)
    values = np.asarray(values, dtype=float)
    if not np.all(np.isfinite(values)):
        raise InputError("function has non-finite samples on the domain")
    return values


def _coefficients(domain: SpectralDomain, func, cells: int) -> np.ndarray:
    rules = [_axis_rule(length, cells) for length in domain.lengths]
    values = _sample(func, domain, rules)
    pairs = _eigenpairs(domain)
    if domain.dimension == 1:
        (x, w), = rules
        return np.array([np.sum(w * values * pair.factor(0, x)) for pair in pairs])
    (x, wx), (y, wy) = rules
    weighted = wx[:, None] * values * wy[None, :]
    return np.array([pair.factor(0, x) @ weighted @ pair.factor(1, y) for pair in pairs])


def project(domain: SpectralDomain, func) -> np.ndarray:
    """(v, φ_i) for i = 1..truncation by composite Gauss-Legendre quadrature."""
    cells = CELLS_PER_MODE * domain.truncation
    fine = _coefficients(domain, func, cells)
    coarse = _coefficients(domain, func, cells // 2)
    estimate = float(np.max(np.abs(fine - coarse)))
    if estimate > PROJECTION_TOLERANCE * max(1.0, float(np.max(np.abs(fine)))):
        raise AccuracyError("projection quadrature did not converge", estimate)
    return fine


def l2_norm_pointwise(domain: SpectralDomain, func) -> float:
    cells = CELLS_PER_MODE * domain.truncation
    rules = [_axis_rule(length, cells) for length in domain.lengths]
    values = _sample(func, domain, rules)
    if domain.dimension == 1:
        return math.sqrt(float(np.sum(rules[0][1] * values**2)))
    return math.sqrt(float(rules[0][1] @ values**2 @ rules[1][1]))


def sobolev_norm(domain: SpectralDomain, coeffs, s: float) -> float:
    """‖q‖_{Ȟˢ} = sqrt(Σ λ_i^s c_i²)."""
    c = np.asarray(coeffs, dtype=float)
    if c.ndim != 1 or c.size > domain.truncation:
        raise TruncationError(f"{c.size} coefficients exceed the truncation {domain.truncation}")
    if not s >= 0.0:
        raise DomainError(f"Sobolev order must be non-negative, got {s}")
    lam = eigenvalues(domain)[: c.size]
    return math.sqrt(float(np.sum(lam**s * c**2)))


def check_orthonormality(domain: SpectralDomain, sample: int = ORTHONORMALITY_SAMPLE) -> float:
    """max |(φ_i, φ_j) - δ_ij| over the first ``sample`` pairs and the last one."""
    pairs = _eigenpairs(domain)
    chosen = list(pairs[:sample])
    if len(pairs) > sample:
        chosen.append(pairs[-1])
    cells = CELLS_PER_MODE * domain.truncation
    rules = [_axis_rule(length, cells) for length in domain.lengths]
    if domain.dimension == 1:
        basis = np.array([pair.factor(0, rules[0][0]) for pair in chosen])
        gram = (basis * rules[0][1]) @ basis.T
    else:
        fx = np.array([pair.factor(0, rules[0][0]) * rules[0][1] for pair in chosen])
        gx = np.array([pair.factor(0, rules[0][0]) for pair in chosen])
        fy = np.array([pair.factor(1, rules[1][0]) * rules[1][1] for pair in chosen])
        gy = np.array([pair.factor(1, rules[1][0]) for pair in chosen])
        gram = (fx @ gx.T) * (fy @ gy.T)
    deviation = float(np.max(np.abs(gram - np.eye(len(chosen)))))
    logger.debug("orthonormality deviation %.3e over %d eigenfunctions", deviation, len(chosen))
    return deviation


def boundary_residual(domain: SpectralDomain, func) -> float:
    """max |v| over sample points of ∂Ω."""
    s = np.linspace(0.0, 1.0, BOUNDARY_SAMPLES)
    if domain.dimension == 1:
        values = func(np.array([0.0, domain.lengths[0]]))
    else:
        width, height = domain.lengths
        xs = np.concatenate((s * width, s * width, np.zeros_like(s), np.full_like(s, width)))
        ys = np.concatenate((np.zeros_like(s), np.full_like(s, height), s * height, s * height))
        values = func(xs, ys)
    return float(np.max(np.abs(np.asarray(values, dtype=float))))
