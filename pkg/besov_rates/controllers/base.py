"""Shared pieces of the experiment controllers: the seed fan-out and the controller base class."""

from abc import ABC, abstractmethod
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from besov_rates.artifacts.writer import ArtifactWriter
from besov_rates.core.logging import logger
from besov_rates.core.services import add_service
from besov_rates.domain.error_lab import measure_seed_errors
from besov_rates.domain.spde_scheme import apriori_report, coupled_solve_batch
from besov_rates.domain.types.grid import GridSpec
from besov_rates.domain.types.report import NormSample
from besov_rates.domain.types.scheme import AprioriReport, BlowUp, InitialCondition, PathRecord, Polynomial
from besov_rates.settings import ExperimentConfig, Mode

# seeds swept together by one worker
SEED_BATCH = 8


@dataclass(frozen=True, slots=True)
class SeedTask:
    grids: list[GridSpec]
    F: Polynomial
    psi: InitialCondition
    checkpoints: list[float]
    mu: int
    threshold_factor: float | None
    thetas: list[float]
    eps0: float
    seeds: list[int]


@dataclass(slots=True)
class SeedOutcome:
    seed: int
    records: list[PathRecord]
    samples: list[NormSample] = field(default_factory=list)
    apriori: list[AprioriReport] = field(default_factory=list)

    @property
    def blow_up(self) -> tuple[int, BlowUp] | None:
        return next(((r.grid.n, r.blow_up) for r in self.records if r.blow_up is not None), None)

    @property
    def omega_failures(self) -> list[int]:
        return [report.n for report in self.apriori if not report.omega_n_holds]

    @property
    def stopped_levels(self) -> list[int]:
        return [record.grid.n for record in self.records if record.stopping_step is not None]


def simulate_seeds(task: SeedTask) -> list[SeedOutcome]:
    """Coupled sweep of every level for a batch of seeds, measured against the finest level."""
    batches = coupled_solve_batch(
        task.grids,
        task.F,
        task.psi,
        task.seeds,
        task.checkpoints,
        mu=task.mu,
        horizon=task.checkpoints[-1],
        threshold_factor=task.threshold_factor,
    )
    outcomes = []
    for seed, records in zip(task.seeds, batches, strict=True):
        outcome = SeedOutcome(seed=seed, records=records)
        if outcome.blow_up is None:
            outcome.samples = measure_seed_errors(records, task.thetas, task.eps0)
            outcome.apriori = [apriori_report(record) for record in records[:-1]]
        outcomes.append(outcome)
    return outcomes


@add_service(scope="singleton")
class SeedRunner:
    """Fans seed batches out to worker processes and returns the outcomes in seed order."""

    def __init__(self, settings: ExperimentConfig):
        self.settings = settings

    def tasks(self) -> list[SeedTask]:
        settings = self.settings
        seeds = settings.seed_list
        return [
            SeedTask(
                grids=settings.grids,
                F=settings.scheme.polynomial,
                psi=settings.scheme.psi,
                checkpoints=settings.checkpoints,
                mu=settings.scheme.mu,
                threshold_factor=settings.scheme.threshold_factor,
                thetas=settings.besov.theta_list,
                eps0=settings.besov.eps0,
                seeds=seeds[first : first + SEED_BATCH],
            )
            for first in range(0, len(seeds), SEED_BATCH)
        ]

    def run(self) -> list[SeedOutcome]:
        tasks = self.tasks()
        logger.info(
            f"Sweeping {self.settings.seeds} seed(s) over n={self.settings.levels} "
            f"against N={self.settings.reference_n} with {self.settings.workers} worker(s)"
        )
        if self.settings.workers == 1:
            results = [simulate_seeds(task) for task in tasks]
        else:
            with ProcessPoolExecutor(max_workers=self.settings.workers) as pool:
                results = list(pool.map(simulate_seeds, tasks))
        return [outcome for batch in results for outcome in batch]


class Controller(ABC):
    """One CLI mode. ``run`` writes the mode's artifacts and returns the process exit code."""

    mode: Mode

    def __init__(self, settings: ExperimentConfig, artifacts: ArtifactWriter):
        self.settings = settings
        self.artifacts = artifacts

    @abstractmethod
    def run(self) -> int: ...


CONTROLLERS: dict[Mode, type[Controller]] = {}


def controller(mode: Mode):
    """Register a controller class for a mode and as a service."""

    def decorator(cls: type[Controller]) -> type[Controller]:
        cls.mode = mode
        CONTROLLERS[mode] = cls
        return add_service(scope="transient")(cls)

    return decorator
