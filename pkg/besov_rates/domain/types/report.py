"""Result types of the error lab and the verification suite."""

from typing import Any, ClassVar, Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

from besov_rates.domain.types.scheme import AprioriReport

LINF = "linf"


def theta_label(theta: float | None) -> str:
    """Column label of a norm: ``linf`` for the sup norm, the exponent otherwise."""
    return LINF if theta is None else f"{theta:g}"


class ModeVariance(BaseModel):
    """E|<δO_t - O^n_t, δe_ℓ>_n|^2 and the parts it is assembled from."""

    model_config: ClassVar[ConfigDict] = ConfigDict(frozen=True)

    n: int
    ell: int
    t: float
    value: float = Field(ge=0.0)
    direct: float = 0.0
    alias: float = 0.0
    alias_cross: float = 0.0


class RateFit(BaseModel):
    """Least-squares line through (log n, log error)."""

    model_config: ClassVar[ConfigDict] = ConfigDict(frozen=True)

    points: list[tuple[int, float]] = Field(min_length=3)
    slope: float
    intercept: float
    r_squared: float = Field(ge=0.0, le=1.0)
    slope_ci: tuple[float, float]

    @field_validator("r_squared", mode="before")
    @classmethod
    def _clip(cls, value: float) -> float:
        # rounding can leave r^2 a hair above 1 for exact power laws
        return min(max(float(value), 0.0), 1.0)

    def predict(self, n: float) -> float:
        return float(np.exp(self.intercept) * n**self.slope)


class NormSample(BaseModel):
    """One row of errors.csv: a norm of δu_t - u^n_t for one seed."""

    seed: int | None
    n: int
    t: float
    theta: str
    value: float = Field(ge=0.0)


class LevelSummary(BaseModel):
    n: int
    sup_median: float
    sup_mean: float
    sup_stderr: float
    checkpoint_medians: list[float]


class ErrorReport(BaseModel):
    model_config: ClassVar[ConfigDict] = ConfigDict(serialize_by_alias=True)

    schema_version: Literal[1] = Field(default=1, serialization_alias="schema")
    levels: list[int]
    reference_n: int
    checkpoints: list[float]
    seeds: list[int]
    excluded_seeds: dict[int, str] = Field(default_factory=dict)
    norms: dict[str, list[LevelSummary]] = Field(default_factory=dict)
    fits: dict[str, RateFit | None] = Field(default_factory=dict)
    mean_fits: dict[str, RateFit | None] = Field(default_factory=dict)
    apriori: list[AprioriReport] = Field(default_factory=list)


class HeatKernelComparison(BaseModel):
    n: int
    beta: float
    t: float
    point_error: float
    kernel_distance_sq: float
    kernel_ratio: float


class MonteCarloEstimate(BaseModel):
    """Sample mean of |<δ_n O^N_t - O^n_t, δe_ℓ>_n|^2 over coupled linear paths."""

    n: int
    reference_n: int
    ell: int
    t: float
    mean: float
    stderr: float
    paths: int

    def z_score(self, exact: float) -> float:
        if self.stderr == 0:
            return 0.0 if self.mean == exact else float("inf")
        return abs(self.mean - exact) / self.stderr


class Provenance(BaseModel):
    version: str
    mode: str
    config_hash: str
    seeds: tuple[int, int] | None = None

    def header(self) -> str:
        seeds = "none" if self.seeds is None else f"{self.seeds[0]}..{self.seeds[1]}"
        return f"besov-rates {self.version} mode={self.mode} config={self.config_hash} seeds={seeds}"


class CheckResult(BaseModel):
    name: str
    passed: bool
    detail: str = ""
    measurements: dict[str, Any] = Field(default_factory=dict)


class KolmogorovSeries(BaseModel):
    alpha: float
    q: float
    points: list[tuple[int, float]]
    fit: RateFit | None = None
    predicted_slope: float

    @property
    def label(self) -> str:
        return f"alpha={self.alpha:g} q={self.q:g}"


class MonteCarloCheck(BaseModel):
    """A Monte Carlo mode variance next to the exact values it should reproduce."""

    estimate: MonteCarloEstimate
    level_exact: float
    continuum_exact: float
    z_score: float
    passed: bool


class OracleReport(BaseModel):
    model_config: ClassVar[ConfigDict] = ConfigDict(serialize_by_alias=True)

    schema_version: Literal[1] = Field(default=1, serialization_alias="schema")
    time: float
    levels: list[int]
    uniform_mode_bound: dict[int, float]
    kolmogorov: list[KolmogorovSeries]
    lower_bound_time: float
    lower_bound: list[tuple[int, float]]
    monte_carlo: MonteCarloCheck | None = None


class LowerBoundReport(BaseModel):
    model_config: ClassVar[ConfigDict] = ConfigDict(serialize_by_alias=True)

    schema_version: Literal[1] = Field(default=1, serialization_alias="schema")
    time: float
    points: list[tuple[int, float]]
    max_min_ratio: float
    fit: RateFit | None = None
