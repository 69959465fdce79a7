"""Types for the explicit finite-difference scheme."""

from dataclasses import dataclass, field
from enum import StrEnum
from typing import Annotated, ClassVar, Self, TypeAlias

import numpy as np
from essentials.exceptions import ObjectNotFound
from pydantic import BaseModel, ConfigDict, Field, field_validator

from besov_rates.core.exceptions import ConfigurationError
from besov_rates.domain.types.grid import GridFunction, GridSpec
from besov_rates.domain.types.spectral import TruncatedSeries

DEFAULT_MU = 6

MonitorExponent: TypeAlias = Annotated[
    int,
    Field(
        ...,
        gt=0,
        multiple_of=2,
        description="The even Lebesgue exponent mu > nu of the a-priori remainder bound",
    ),
]


class Polynomial(BaseModel):
    """F(v) = sum_i coefficients[i] v^i, of odd degree >= 3 with a negative leading coefficient.

    The empty coefficient tuple is the zero polynomial, which marks the linear case.
    """

    model_config: ClassVar[ConfigDict] = ConfigDict(frozen=True)

    coefficients: tuple[float, ...] = ()

    @field_validator("coefficients")
    @classmethod
    def _odd_dissipative(cls, value: tuple[float, ...]) -> tuple[float, ...]:
        if not any(value):
            return ()
        degree = len(value) - 1
        if degree < 3 or degree % 2 == 0:
            raise ValueError(f"degree must be odd and at least 3, got {degree}")
        if not value[-1] < 0:
            raise ValueError(f"leading coefficient must be negative, got {value[-1]}")
        return value

    @classmethod
    def zero(cls) -> "Polynomial":
        return cls()

    @classmethod
    def allen_cahn(cls) -> "Polynomial":
        """F(v) = v - v^3."""
        return cls(coefficients=(0.0, 1.0, 0.0, -1.0))

    @property
    def is_zero(self) -> bool:
        return not self.coefficients

    @property
    def degree(self) -> int:
        """Degree ν; the zero polynomial reports the smallest admissible degree, 3."""
        return len(self.coefficients) - 1 if self.coefficients else 3

    def __call__(self, v: np.ndarray) -> np.ndarray:
        if self.is_zero:
            return np.zeros_like(v)
        return np.polynomial.polynomial.polyval(v, self.coefficients)


class InitialCondition(StrEnum):
    """Named initial data, sampled exactly on each spatial grid."""

    SIN = "sin"
    COS = "cos"
    ZERO = "zero"
    CONSTANT = "constant"
    ROUGH = "rough"

    def sample(self, grid: GridSpec) -> GridFunction:
        x = grid.points
        match self:
            case InitialCondition.SIN:
                values = np.sin(2 * np.pi * x)
            case InitialCondition.COS:
                values = np.cos(2 * np.pi * x)
            case InitialCondition.ZERO:
                values = np.zeros_like(x)
            case InitialCondition.CONSTANT:
                values = np.ones_like(x)
            case InitialCondition.ROUGH:
                # Hölder-1/2 at the origin, periodic
                values = np.sqrt(np.abs(np.sin(np.pi * x)))
        return GridFunction(grid, values)

    def series(self) -> TruncatedSeries | None:
        """Exact Fourier series where the condition is a trigonometric polynomial."""
        match self:
            case InitialCondition.SIN:
                return TruncatedSeries.from_terms({-1: 0.5j, 1: -0.5j})
            case InitialCondition.COS:
                return TruncatedSeries.from_terms({-1: 0.5, 1: 0.5})
            case InitialCondition.ZERO:
                return TruncatedSeries.from_terms({0: 0.0})
            case InitialCondition.CONSTANT:
                return TruncatedSeries.from_terms({0: 1.0})
            case _:
                return None


class OmegaPolicy(StrEnum):
    """What an experiment does with a path on which the a-priori event Ω_n fails."""

    RECORD = "record"
    EXCLUDE = "exclude"
    ABORT = "abort"


@dataclass(slots=True)
class AprioriMonitor:
    """Running a-priori quantities of one path: R_n from the linear part, A_n from the remainder."""

    n: int
    nu: int
    mu: int = DEFAULT_MU
    R_n: float = 1.0
    A_n: float = 0.0

    def __post_init__(self) -> None:
        self.validate()

    def validate(self) -> Self:
        if self.mu % 2 or self.mu <= self.nu:
            raise ConfigurationError(f"mu must be an even integer larger than nu={self.nu}, got {self.mu}")
        return self

    @property
    def omega_n_holds(self) -> bool:
        """(R_n)^(ν(ν+μ)) <= n^(2 - 2(ν-1)/μ), compared in log space."""
        lhs = self.nu * (self.nu + self.mu) * np.log(self.R_n)
        rhs = (2.0 - 2.0 * (self.nu - 1) / self.mu) * np.log(self.n)
        return bool(lhs <= rhs)

    @property
    def ratio(self) -> float:
        return self.A_n / self.R_n ** ((self.nu + self.mu - 1) / self.mu)


@dataclass(frozen=True, slots=True)
class SchemeState:
    u: GridFunction
    step_index: int = 0

    @property
    def grid(self) -> GridSpec:
        return self.u.grid

    @property
    def t(self) -> float:
        return self.grid.time_of(self.step_index)


@dataclass(frozen=True, slots=True)
class BlowUp:
    t: float
    x: float
    value: float


@dataclass(slots=True)
class PathRecord:
    """Snapshots of one path of one level, keyed by step index on the level's own time grid."""

    grid: GridSpec
    seed: int | None
    checkpoints: dict[int, GridFunction] = field(default_factory=dict)
    monitor: AprioriMonitor | None = None
    stopping_step: int | None = None
    blow_up: BlowUp | None = None

    @property
    def times(self) -> list[float]:
        return [self.grid.time_of(step) for step in sorted(self.checkpoints)]

    def snapshot(self, t: float) -> GridFunction:
        step = self.grid.step_of(t)
        if step not in self.checkpoints:
            raise ObjectNotFound(f"No snapshot at t={t!r} for n={self.grid.n}")
        return self.checkpoints[step]

    @property
    def stopping_time(self) -> float | None:
        return None if self.stopping_step is None else self.grid.time_of(self.stopping_step)


class AprioriReport(BaseModel):
    n: int
    seed: int | None = None
    R_n: float
    A_n: float
    omega_n_holds: bool
    ratio: float
