"""Pydantic schema for run configuration files."""

import math
from typing import Literal, get_args

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from vemsolver.errors import DomainError
from vemsolver.kernel.exponent import ExponentFunction
from vemsolver.modes.forcing import TimeFunction

Command = Literal[
    "ml-eval",
    "kernel-split",
    "solve-mode",
    "solve-pde",
    "contraction-probe",
    "singularity-probe",
    "convergence",
    "regularity-report",
]

COMMANDS = get_args(Command)

# dense product-integration matrices grow like N² per cached operator
MAX_TIME_STEPS = 2048


def _split_list(value):
    if isinstance(value, str):
        return [item.strip() for item in value.split(",") if item.strip()]
    return value


class RunConfig(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    command: Command

    # kernel
    exponent: str = "constant:0.5"
    horizon: float = Field(1.0, gt=0.0)
    quad_nodes: int = Field(32, ge=4, le=256, multiple_of=2)
    quad_tolerance: float = Field(1e-10, gt=0.0, lt=1e-2)

    # time grid
    time_steps: int = Field(128, ge=2, le=MAX_TIME_STEPS)
    grading: float | None = Field(None, ge=1.0, le=8.0)
    refinements: list[int] = [64, 128, 256, 512]

    # single mode
    eigenvalue: float = Field(1.0, ge=0.0)
    initial: float = 1.0
    forcing: str = "constant:0"

    # spectral field
    modes: int = Field(16, ge=1, le=1024)
    dimension: int = Field(1, ge=1, le=2)
    lengths: list[float] = [1.0]
    initial_profile: str = "sine:1,1"

    # solvers and probes
    scheme: Literal["oracle", "picard"] = "oracle"
    sigma: list[float] = []
    tolerance: float = Field(1e-10, gt=0.0)
    max_iter: int = Field(50, ge=1, le=10000)
    family_size: int = Field(50, ge=1, le=100000)
    workers: int = Field(1, ge=1, le=256)

    # Mittag-Leffler evaluation
    ml_alpha: float = Field(0.5, gt=0.0, le=2.0)
    ml_beta: float = Field(1.0, gt=0.0)
    ml_z_min: float = Field(-30.0, le=0.0)
    ml_z_max: float = Field(0.0, le=0.0)
    ml_points: int = Field(200, ge=1, le=1_000_000)

    seed: int = Field(0, ge=0)
    output: str | None = None

    @field_validator("refinements", "lengths", "sigma", mode="before")
    @classmethod
    def split_lists(cls, value):
        return _split_list(value)

    @field_validator("refinements")
    @classmethod
    def check_refinements(cls, value: list[int]) -> list[int]:
        if len(value) < 2 or any(n < 2 for n in value):
            raise ValueError("refinements needs at least two grid sizes >= 2")
        if max(value) > MAX_TIME_STEPS:
            raise ValueError(f"grid sizes above {MAX_TIME_STEPS} are not supported")
        if sorted(set(value)) != value:
            raise ValueError("refinements must be strictly increasing")
        return value

    @field_validator("lengths")
    @classmethod
    def check_lengths(cls, value: list[float]) -> list[float]:
        if not value or any(not (length > 0.0 and math.isfinite(length)) for length in value):
            raise ValueError("lengths must be positive")
        return value

    @field_validator("sigma")
    @classmethod
    def check_sigma(cls, value: list[float]) -> list[float]:
        if any(not (s >= 0.0 and math.isfinite(s)) for s in value):
            raise ValueError("sigma values must be finite and non-negative")
        return value

    @field_validator("forcing")
    @classmethod
    def check_forcing(cls, value: str) -> str:
        TimeFunction.parse(value)
        return value

    @model_validator(mode="after")
    def check_consistency(self) -> "RunConfig":
        if len(self.lengths) != self.dimension:
            raise ValueError(f"lengths needs {self.dimension} entries for dimension {self.dimension}")
        if self.ml_z_min > self.ml_z_max:
            raise ValueError("ml_z_min must not exceed ml_z_max")
        try:
            ExponentFunction.parse(self.exponent, self.horizon)
        except DomainError as exc:
            raise ValueError(str(exc)) from exc
        return self
