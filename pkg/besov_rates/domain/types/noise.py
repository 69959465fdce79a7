"""Types for white-noise cell integrals."""

from dataclasses import dataclass, field
from typing import Protocol

import numpy as np

from besov_rates.domain.types.grid import GridSpec


@dataclass(frozen=True, slots=True)
class NoiseSlab:
    """Cell integrals of one realization of white noise over a common time window.

    ``level_increments[n]`` has shape (steps, 2n): the cells of level n for each of its time steps
    inside the window, which starts at ``fine_time_index`` on the finest time grid.
    """

    finest: GridSpec
    fine_time_index: int
    level_increments: dict[int, np.ndarray] = field(default_factory=dict)


class NoiseSource(Protocol):
    """Anything that can hand out cell integrals for consecutive time steps of a level."""

    @property
    def finest(self) -> GridSpec: ...

    def increments(self, level: GridSpec, first_step: int, count: int) -> np.ndarray:
        """Return an array of shape (..., count, 2n) for steps first_step .. first_step + count - 1."""
        ...
