"""Closed-form time functions used as per-mode forcing data."""

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from numpy.polynomial import Polynomial

from vemsolver.errors import DomainError

FORCING_KINDS = ("constant", "poly", "sine")


@dataclass(frozen=True)
class TimeFunction:
    """f(t) = Σ c_k t^k + Σ a_j sin(ω_j t).

    Parsed from ``constant:c``, ``poly:c0,c1,...`` or ``sine:a,omega``.
    """

    coefficients: tuple[float, ...] = (0.0,)
    sines: tuple[tuple[float, float], ...] = field(default=())

    @classmethod
    def parse(cls, spec: str) -> "TimeFunction":
        kind, sep, body = spec.strip().partition(":")
        kind = kind.strip().lower()
        if not sep or kind not in FORCING_KINDS:
            raise DomainError(f"forcing spec {spec!r} must start with one of {FORCING_KINDS}")
        try:
            params = tuple(float(item) for item in body.split(","))
        except ValueError as exc:
            raise DomainError(f"forcing spec {spec!r} has a non-numeric parameter") from exc
        if not all(math.isfinite(p) for p in params):
            raise DomainError(f"forcing spec {spec!r} has a non-finite parameter")
        if kind == "constant":
            if len(params) != 1:
                raise DomainError("constant forcing takes one parameter")
            return cls((params[0],))
        if kind == "sine":
            if len(params) != 2:
                raise DomainError("sine forcing takes amplitude and frequency")
            return cls((0.0,), ((params[0], params[1]),))
        return cls(params)

    @classmethod
    def zero(cls) -> "TimeFunction":
        return cls()

    @cached_property
    def _polynomial(self) -> Polynomial:
        return Polynomial(self.coefficients)

    @property
    def is_zero(self) -> bool:
        return all(c == 0.0 for c in self.coefficients) and all(a == 0.0 for a, _ in self.sines)

    def scaled(self, factor: float) -> "TimeFunction":
        return TimeFunction(
            tuple(factor * c for c in self.coefficients),
            tuple((factor * a, omega) for a, omega in self.sines),
        )

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        out = self._polynomial(t) + 0.0 * t
        for amplitude, omega in self.sines:
            out = out + amplitude * np.sin(omega * t)
        return out

    def derivative(self, t):
        t = np.asarray(t, dtype=float)
        out = self._polynomial.deriv(1)(t) + 0.0 * t
        for amplitude, omega in self.sines:
            out = out + amplitude * omega * np.cos(omega * t)
        return out

    def describe(self) -> str:
        parts = [f"poly:{','.join(f'{c:g}' for c in self.coefficients)}"]
        parts += [f"sine:{a:g},{omega:g}" for a, omega in self.sines]
        return " + ".join(parts)

    def second_derivative(self, t):
        t = np.asarray(t, dtype=float)
        out = self._polynomial.deriv(2)(t) + 0.0 * t
        for amplitude, omega in self.sines:
            out = out - amplitude * omega**2 * np.sin(omega * t)
        return out

    def plus(self, other: "TimeFunction") -> "TimeFunction":
        size = max(len(self.coefficients), len(other.coefficients))
        mine = self.coefficients + (0.0,) * (size - len(self.coefficients))
        theirs = other.coefficients + (0.0,) * (size - len(other.coefficients))
        return TimeFunction(tuple(a + b for a, b in zip(mine, theirs)), self.sines + other.sines)
