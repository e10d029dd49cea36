"""Variable exponent α(t) of the memory kernel."""

from dataclasses import dataclass
from functools import cached_property

import numpy as np
from numpy.polynomial import Polynomial

from vemsolver.errors import DomainError

EXPONENT_KINDS = ("constant", "affine", "poly", "bump")
RANGE_SAMPLES = 2001

_PARAM_COUNTS = {"constant": (1, 1), "affine": (2, 2), "poly": (1, 64), "bump": (4, 4)}


@dataclass(frozen=True)
class ExponentFunction:
    """α(t) on [0, horizon], restricted to forms with a bounded second derivative.

    ``constant:a``                    α(t) = a
    ``affine:a,b``                    α(t) = a + b t
    ``poly:c0,c1,...``                α(t) = Σ c_k t^k
    ``bump:base,amp,center,width``    α(t) = base + amp · exp(-((t - center)/width)²)
    """

    kind: str
    params: tuple[float, ...]
    horizon: float = 1.0

    def __post_init__(self):
        if self.kind not in EXPONENT_KINDS:
            raise DomainError(f"unknown exponent kind {self.kind!r}, expected one of {EXPONENT_KINDS}")
        low, high = _PARAM_COUNTS[self.kind]
        if not low <= len(self.params) <= high:
            raise DomainError(f"exponent kind {self.kind!r} takes {low}..{high} parameters, got {len(self.params)}")
        if not self.horizon > 0.0:
            raise DomainError(f"horizon must be positive, got {self.horizon}")
        if self.kind == "bump" and not self.params[3] > 0.0:
            raise DomainError("bump width must be positive")
        samples = self(np.linspace(0.0, self.horizon, RANGE_SAMPLES))
        if not np.all((samples > 0.0) & (samples < 1.0)):
            raise DomainError(
                f"exponent {self.describe()} leaves (0, 1) on [0, {self.horizon}]: "
                f"range [{samples.min():.6g}, {samples.max():.6g}]"
            )

    @classmethod
    def parse(cls, spec: str, horizon: float = 1.0) -> "ExponentFunction":
        kind, sep, body = spec.strip().partition(":")
        if not sep or not body.strip():
            raise DomainError(f"exponent spec {spec!r} must look like 'kind:p1,p2,...'")
        try:
            params = tuple(float(item) for item in body.split(","))
        except ValueError as exc:
            raise DomainError(f"exponent spec {spec!r} has a non-numeric parameter") from exc
        return cls(kind.strip().lower(), params, horizon)

    @classmethod
    def constant(cls, value: float, horizon: float = 1.0) -> "ExponentFunction":
        return cls("constant", (float(value),), horizon)

    def describe(self) -> str:
        return f"{self.kind}:" + ",".join(f"{p:g}" for p in self.params)

    @cached_property
    def _polynomial(self) -> Polynomial | None:
        if self.kind == "bump":
            return None
        return Polynomial(self.params)

    @property
    def alpha0(self) -> float:
        return float(self(0.0))

    @property
    def is_constant(self) -> bool:
        if self.kind == "bump":
            return self.params[1] == 0.0
        return all(c == 0.0 for c in self.params[1:])

    def __call__(self, t):
        if self._polynomial is not None:
            return self._polynomial(t)
        base, amp, center, width = self.params
        return base + amp * np.exp(-(((t - center) / width) ** 2))

    def derivative(self, t):
        if self._polynomial is not None:
            return self._polynomial.deriv(1)(t) + 0.0 * np.asarray(t, dtype=float)
        _, amp, center, width = self.params
        s = (t - center) / width
        return amp * np.exp(-(s**2)) * (-2.0 * s / width)

    def second_derivative(self, t):
        if self._polynomial is not None:
            return self._polynomial.deriv(2)(t) + 0.0 * np.asarray(t, dtype=float)
        _, amp, center, width = self.params
        s = (t - center) / width
        return amp * np.exp(-(s**2)) * (4.0 * s**2 - 2.0) / width**2
