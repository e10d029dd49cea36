"""Graded time grids t_n = T (n/N)^γ."""

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from vemsolver.errors import DomainError

MAX_DEFAULT_GRADING = 4.0


def default_grading(alpha0: float) -> float:
    """γ = 2/(1-α0), capped at 4."""
    if not 0.0 < alpha0 < 1.0:
        raise DomainError(f"alpha0 must lie in (0, 1), got {alpha0}")
    return min(2.0 / (1.0 - alpha0), MAX_DEFAULT_GRADING)


@dataclass(frozen=True)
class TimeGrid:
    horizon: float
    count: int
    grading: float = 1.0

    def __post_init__(self):
        if not self.horizon > 0.0:
            raise DomainError(f"horizon must be positive, got {self.horizon}")
        if self.count < 2:
            raise DomainError(f"time grid needs at least 2 steps, got {self.count}")
        if not self.grading >= 1.0:
            raise DomainError(f"grading must be >= 1, got {self.grading}")

    @classmethod
    def graded_for(cls, horizon: float, count: int, alpha0: float) -> "TimeGrid":
        return cls(horizon, count, default_grading(alpha0))

    @cached_property
    def nodes(self) -> np.ndarray:
        nodes = self.horizon * (np.arange(self.count + 1) / self.count) ** self.grading
        nodes[-1] = self.horizon
        nodes.setflags(write=False)
        return nodes

    @cached_property
    def steps(self) -> np.ndarray:
        steps = np.diff(self.nodes)
        steps.setflags(write=False)
        return steps

    def refined(self, factor: int = 2) -> "TimeGrid":
        """Grid with ``factor`` times the steps; its every factor-th node is a node of this grid."""
        return TimeGrid(self.horizon, self.count * factor, self.grading)
