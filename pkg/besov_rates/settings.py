"""Experiment Settings."""

import os
from enum import StrEnum
from pathlib import Path
from typing import Literal, Self

from config.common import ConfigurationBuilder
from config.env import EnvVars
from config.yaml import YAMLFile
from pydantic import BaseModel, Field, ValidationError, field_validator, model_validator

from besov_rates.core.exceptions import OffGridTimeError
from besov_rates.core.json import report_dumps
from besov_rates.core.utils import digest, dyadic_exponent
from besov_rates.domain.types.besov import BumpWidth
from besov_rates.domain.types.grid import GridSpec, SchemeConstant
from besov_rates.domain.types.scheme import InitialCondition, MonitorExponent, OmegaPolicy, Polynomial

DEFAULT_CONFIG_FILE = "besov_rates.yaml"


class Mode(StrEnum):
    SIMULATE = "simulate"
    RATES = "rates"
    LINEAR_ORACLE = "linear-oracle"
    LOWER_BOUND = "lower-bound"
    VERIFY = "verify"


class AppSettings(BaseModel):
    debug: bool = False


class SchemeSettings(BaseModel):
    c: SchemeConstant = 0.125
    F: Literal["zero"] | list[float] = Field(default_factory=lambda: [0.0, 1.0, 0.0, -1.0])
    psi: InitialCondition = InitialCondition.SIN
    mu: MonitorExponent = 6
    threshold_factor: float | None = Field(default=None, gt=0.0)
    omega_policy: OmegaPolicy = OmegaPolicy.RECORD

    @field_validator("F")
    @classmethod
    def _admissible_polynomial(cls, value: Literal["zero"] | list[float]) -> Literal["zero"] | list[float]:
        if value != "zero":
            try:
                Polynomial(coefficients=tuple(value))
            except ValidationError as exc:
                raise ValueError(exc.errors()[0]["msg"]) from None
        return value

    @property
    def polynomial(self) -> Polynomial:
        return Polynomial.zero() if self.F == "zero" else Polynomial(coefficients=tuple(self.F))

    @model_validator(mode="after")
    def _mu_above_degree(self) -> Self:
        if self.mu <= self.polynomial.degree:
            raise ValueError(f"mu={self.mu} must exceed the degree {self.polynomial.degree} of F")
        return self


class KolmogorovParams(BaseModel):
    alpha: float = Field(lt=0.0)
    q: float = Field(ge=1.0)


class BesovSettings(BaseModel):
    eps0: BumpWidth = 0.05
    theta_list: list[float] = Field(default_factory=lambda: [0.0, -0.2, -0.4], min_length=1)
    kolmogorov: list[KolmogorovParams] = Field(
        default_factory=lambda: [KolmogorovParams(alpha=-0.4, q=64.0), KolmogorovParams(alpha=-0.45, q=256.0)]
    )

    @field_validator("theta_list")
    @classmethod
    def _theta_range(cls, value: list[float]) -> list[float]:
        outside = [theta for theta in value if not -0.5 < theta <= 0.0]
        if outside:
            raise ValueError(f"theta values must lie in (-1/2, 0], got {outside}")
        return value


class OracleSettings(BaseModel):
    time: float = Field(default=1.0, gt=0.0, le=1.0)
    lower_bound_time: float = Field(default=0.25, gt=0.0, le=1.0)
    mc_paths: int = Field(default=0, ge=0)
    mc_batch: int = Field(default=64, ge=1)
    mc_level: int = Field(default=16, ge=1)
    mc_reference: int = Field(default=256, ge=2)
    mc_ell: int = 1
    mc_time: float = Field(default=0.25, gt=0.0, le=1.0)


class VerifySettings(BaseModel):
    samples: int = Field(default=20, ge=1)
    max_n: int = Field(default=256, ge=16)
    bernstein_samples: int = Field(default=1000, ge=1)


class ExperimentConfig(BaseModel):
    mode: Mode = Mode.RATES
    levels: list[int] = Field(default_factory=lambda: [16, 32, 64], min_length=1)
    reference_multiple: int = Field(default=4, ge=2)
    seeds: int = Field(default=20, ge=1)
    base_seed: int = Field(default=0, ge=0)
    checkpoints: list[float] = Field(default_factory=lambda: [i / 16 for i in range(1, 17)], min_length=1)
    output_dir: Path = Path("out")
    workers: int = Field(default=1, ge=1)

    app: AppSettings = AppSettings()
    scheme: SchemeSettings = SchemeSettings()
    besov: BesovSettings = BesovSettings()
    oracle: OracleSettings = OracleSettings()
    verify: VerifySettings = VerifySettings()

    @field_validator("levels")
    @classmethod
    def _nested_levels(cls, value: list[int]) -> list[int]:
        if any(dyadic_exponent(n) is None or n < 2 for n in value):
            raise ValueError(f"levels must be powers of two >= 2, got {value}")
        if any(fine <= coarse for coarse, fine in zip(value, value[1:], strict=False)):
            raise ValueError(f"levels must be strictly ascending, got {value}")
        return value

    @field_validator("reference_multiple")
    @classmethod
    def _dyadic_multiple(cls, value: int) -> int:
        if dyadic_exponent(value) is None:
            raise ValueError(f"reference_multiple must be a power of two, got {value}")
        return value

    @field_validator("checkpoints")
    @classmethod
    def _sorted_checkpoints(cls, value: list[float]) -> list[float]:
        if any(not 0.0 < t <= 1.0 for t in value):
            raise ValueError("checkpoints must lie in (0, 1]")
        if sorted(set(value)) != value:
            raise ValueError("checkpoints must be strictly increasing")
        return value

    @model_validator(mode="after")
    def _grids_admissible(self) -> Self:
        problems = []
        for n in [*self.levels, self.reference_n]:
            try:
                GridSpec(n=n, c=self.scheme.c)
            except ValidationError as exc:
                problems.append(f"n={n}: {exc.errors()[0]['msg']}")
        if not problems:
            coarsest = GridSpec(n=self.levels[0], c=self.scheme.c)
            for t in self.checkpoints:
                try:
                    coarsest.step_of(t)
                except OffGridTimeError:
                    problems.append(f"checkpoint {t!r} is not on the time grid of n={coarsest.n}")
        if problems:
            raise ValueError("; ".join(problems))
        return self

    @property
    def reference_n(self) -> int:
        return self.levels[-1] * self.reference_multiple

    @property
    def grids(self) -> list[GridSpec]:
        return [GridSpec.of(n, self.scheme.c) for n in [*self.levels, self.reference_n]]

    @property
    def seed_list(self) -> list[int]:
        return list(range(self.base_seed, self.base_seed + self.seeds))

    def config_hash(self) -> str:
        """Digest of everything that can change a result; ``workers`` and ``output_dir`` cannot."""
        return digest(report_dumps(self.model_dump(mode="json", exclude={"workers", "output_dir"})))


def load_settings(config_file: str | Path | None = None) -> ExperimentConfig:
    """Load the experiment settings.

    The YAML file comes from ``config_file``, else from ``BESOV_RATES_CONFIG``, else ``besov_rates.yaml``
    in the working directory. Environment variables prefixed ``BESOV_RATES_`` are layered on top.

    Returns:
        ExperimentConfig: The validated configuration.

    """
    if config_file is not None and not Path(config_file).is_file():
        raise FileNotFoundError(f"Configuration file {config_file} not found")
    settings_file = config_file or os.environ.get("BESOV_RATES_CONFIG", DEFAULT_CONFIG_FILE)
    builder = ConfigurationBuilder(
        YAMLFile(settings_file, optional=config_file is None),
        EnvVars(
            prefix="BESOV_RATES_",
            file=".env",
        ),
    )

    configuration = builder.build()

    return configuration.bind(ExperimentConfig)
