"""Types for Littlewood-Paley filter banks and Besov norms."""

from dataclasses import dataclass
from enum import StrEnum
from typing import Annotated, ClassVar, NamedTuple, TypeAlias

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from besov_rates.domain.types.grid import GridFunction


class Infinity(StrEnum):
    """Marker for an infinite integrability exponent."""

    INF = "inf"


INF = Infinity.INF

Integrability: TypeAlias = Annotated[
    Infinity | Annotated[float, Field(ge=1.0, allow_inf_nan=False)],
    Field(
        ...,
        union_mode="left_to_right",
        description="A Lebesgue exponent in [1, inf]; infinity is the 'inf' marker",
    ),
]

BumpWidth: TypeAlias = Annotated[
    float,
    Field(
        ...,
        gt=0.0,
        lt=0.1,
        description="Width eps0 of the transition region of the Littlewood-Paley bump",
    ),
]


class BesovParams(BaseModel):
    model_config: ClassVar[ConfigDict] = ConfigDict(frozen=True)

    alpha: float
    p: Integrability = INF
    q: Integrability = INF


@dataclass(frozen=True, slots=True)
class FilterBank:
    """Sampled multipliers φ^j_{ρ_n}(k) for j = 0..J_n+1 (rows) and k = -n..n-1 (columns)."""

    n: int
    eps0: float
    rho0: float
    rho_n: float
    J_n: int
    weights: np.ndarray

    @property
    def block_count(self) -> int:
        return self.J_n + 2


class Paraproducts(NamedTuple):
    """f g split as lo_hi = Σ_k f^[k] g^[<=k-2], resonant over |k - l| <= 1, and hi_lo = lo_hi with f and g swapped."""

    lo_hi: GridFunction
    resonant: GridFunction
    hi_lo: GridFunction
