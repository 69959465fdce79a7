"""Types for grids and grid functions."""

from dataclasses import dataclass
from typing import Annotated, ClassVar, Self, TypeAlias

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from besov_rates.core.exceptions import ConfigurationError, CouplingError, OffGridTimeError, ShapeError
from besov_rates.core.utils import dyadic_exponent

# step counts are rounded back from t / h; anything further off than this is not on the grid
TIME_GRID_TOLERANCE = 1e-9

GridSize: TypeAlias = Annotated[
    int,
    Field(
        ...,
        gt=0,
        description="Half the number of spatial points: the grid has 2n points",
    ),
]

SchemeConstant: TypeAlias = Annotated[
    float,
    Field(
        ...,
        gt=0.0,
        le=0.125,
        description="The parabolic ratio c in h = c (2n)^-2",
    ),
]


class GridSpec(BaseModel):
    """A resolution level: the spatial grid of 2n points on the torus and its time grid of step h."""

    model_config: ClassVar[ConfigDict] = ConfigDict(frozen=True)

    n: GridSize
    c: SchemeConstant = 0.125

    @model_validator(mode="after")
    def _whole_steps_per_unit(self) -> Self:
        inverse = 1.0 / self.h
        if abs(inverse - round(inverse)) > TIME_GRID_TOLERANCE * inverse:
            raise ValueError(f"1/h = {inverse!r} is not an integer for n={self.n}, c={self.c}")
        return self

    @classmethod
    def of(cls, n: int, c: float = 0.125) -> "GridSpec":
        try:
            return cls(n=n, c=c)
        except ValidationError as exc:
            raise ConfigurationError(f"Invalid grid (n={n}, c={c}): {exc.errors()[0]['msg']}") from exc

    @property
    def size(self) -> int:
        return 2 * self.n

    @property
    def h(self) -> float:
        return self.c / (2 * self.n) ** 2

    @property
    def steps_per_unit(self) -> int:
        return round(1.0 / self.h)

    @property
    def points(self) -> np.ndarray:
        return np.arange(self.size) / self.size

    def step_of(self, t: float) -> int:
        """Return k with t = k h, failing for times off the time grid."""
        steps = t * self.steps_per_unit
        k = round(steps)
        if k < 0 or abs(steps - k) > TIME_GRID_TOLERANCE * max(1.0, abs(steps)):
            raise OffGridTimeError(f"t={t!r} is not a non-negative multiple of h={self.h!r} (n={self.n})")
        return k

    def time_of(self, step: int) -> float:
        return step / self.steps_per_unit

    def refinement_exponent(self, finer: "GridSpec") -> int:
        """Return m with finer.n == 2**m * n; both levels must share c."""
        if finer.c != self.c:
            raise CouplingError(f"Levels use different constants c ({self.c} and {finer.c})")
        m = dyadic_exponent(finer.n // self.n) if finer.n % self.n == 0 else None
        if m is None:
            raise CouplingError(f"n={finer.n} is not a power-of-two multiple of n={self.n}")
        return m


@dataclass(frozen=True, slots=True)
class GridFunction:
    """Values indexed by the points x = i/(2n) of a spatial grid, read-only once built."""

    grid: GridSpec
    values: np.ndarray

    def __post_init__(self) -> None:
        values = np.array(self.values, copy=True)
        if values.shape != (self.grid.size,):
            raise ShapeError(f"Expected {self.grid.size} values for n={self.grid.n}, got shape {values.shape}")
        if not np.iscomplexobj(values):
            values = values.astype(np.float64, copy=False)
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @classmethod
    def zeros(cls, grid: GridSpec) -> "GridFunction":
        return cls(grid, np.zeros(grid.size))

    @property
    def is_real(self) -> bool:
        return not np.iscomplexobj(self.values)

    def _check_grid(self, other: "GridFunction") -> None:
        if other.grid != self.grid:
            raise ShapeError(f"Grid mismatch: n={self.grid.n} and n={other.grid.n}")

    def __add__(self, other: "GridFunction | float") -> "GridFunction":
        if isinstance(other, GridFunction):
            self._check_grid(other)
            return GridFunction(self.grid, self.values + other.values)
        return GridFunction(self.grid, self.values + other)

    def __sub__(self, other: "GridFunction | float") -> "GridFunction":
        if isinstance(other, GridFunction):
            self._check_grid(other)
            return GridFunction(self.grid, self.values - other.values)
        return GridFunction(self.grid, self.values - other)

    def __mul__(self, other: "GridFunction | complex") -> "GridFunction":
        if isinstance(other, GridFunction):
            self._check_grid(other)
            return GridFunction(self.grid, self.values * other.values)
        return GridFunction(self.grid, self.values * other)

    __rmul__ = __mul__

    @property
    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.values)))
