"""The explicit finite-difference scheme, single-level and coupled multi-level sweeps.

All sweeps go through ``_LevelRunner``. It advances a batch of paths of one level, shaped
(paths, 2n), one step at a time. It also advances the linear path O^n next to them, updates the
a-priori monitors, applies truncation and stores checkpoint snapshots. The update runs elementwise
on each row, so a path's bits do not depend on the batch it runs in.
"""

from collections.abc import Callable, Sequence

import numpy as np

from besov_rates.core.exceptions import BlowUpError, ConfigurationError, CouplingError
from besov_rates.core.logging import logger
from besov_rates.domain.besov_toolkit import lp_norm_values
from besov_rates.domain.noise_field import (
    NOISE_CHUNK_STEPS,
    SeedBatchNoise,
    dyadic_levels,
    noise_intensity,
)
from besov_rates.domain.spectral_grid import laplacian_values
from besov_rates.domain.types.grid import GridFunction, GridSpec
from besov_rates.domain.types.noise import NoiseSource
from besov_rates.domain.types.scheme import (
    DEFAULT_MU,
    AprioriMonitor,
    AprioriReport,
    BlowUp,
    InitialCondition,
    PathRecord,
    Polynomial,
    SchemeState,
)

ZERO = Polynomial.zero()

FineNoiseFactory = Callable[[GridSpec, list[int]], NoiseSource]


def euler_values(u: np.ndarray, eta: np.ndarray, F: Polynomial, grid: GridSpec) -> np.ndarray:
    """u + h (Δ_n u + F(u) + η) along the last axis."""
    drift = laplacian_values(u, grid.n)
    if not F.is_zero:
        drift += F(u)
    drift += eta
    return u + grid.h * drift


def _first_blow_up(values: np.ndarray, grid: GridSpec, step: int) -> BlowUp:
    index = int(np.flatnonzero(~np.isfinite(values))[0])
    return BlowUp(t=grid.time_of(step), x=index / grid.size, value=float(values[index]))


def euler_step(state: SchemeState, eta: GridFunction, F: Polynomial) -> SchemeState:
    grid = state.grid
    with np.errstate(over="ignore", invalid="ignore"):
        values = euler_values(state.u.values, eta.values, F, grid)
    if not np.isfinite(values).all():
        blow_up = _first_blow_up(values, grid, state.step_index + 1)
        raise BlowUpError(blow_up.t, blow_up.x, blow_up.value)
    return SchemeState(u=GridFunction(grid, values), step_index=state.step_index + 1)


class _LevelRunner:
    def __init__(
        self,
        grid: GridSpec,
        F: Polynomial,
        initial: np.ndarray,
        checkpoint_steps: set[int],
        *,
        seeds: Sequence[int | None],
        mu: int = DEFAULT_MU,
        track_linear: bool = True,
        threshold_factor: float | None = None,
        raise_on_blow_up: bool = False,
    ) -> None:
        self.grid = grid
        self.F = F
        self.seeds = list(seeds)
        self.mu = mu
        self.checkpoint_steps = checkpoint_steps
        self.raise_on_blow_up = raise_on_blow_up
        self.threshold = None if threshold_factor is None else threshold_factor * grid.n
        # validates mu against the degree before any work is done
        AprioriMonitor(n=grid.n, nu=F.degree, mu=mu)

        paths = len(self.seeds)
        self.u = np.array(np.broadcast_to(initial, (paths, grid.size)), dtype=np.float64)
        self.o = np.zeros_like(self.u) if track_linear else None
        self.step = 0
        self.active = np.ones(paths, dtype=bool)
        self.blown = np.zeros(paths, dtype=bool)
        self.stopping = np.full(paths, -1, dtype=np.int64)
        self.blow_ups: list[BlowUp | None] = [None] * paths
        self.R_n = np.ones(paths)
        self.A_n = np.zeros(paths)
        self.snapshots: dict[int, np.ndarray] = {}
        self._after_step()

    def _observe(self) -> None:
        if self.o is None:
            return
        live = self.active
        linear_sup = np.max(np.abs(self.o), axis=-1)
        remainder = lp_norm_values(self.u - self.o, self.mu)
        self.R_n = np.where(live, np.maximum(self.R_n, 1.0 + linear_sup), self.R_n)
        self.A_n = np.where(live, np.maximum(self.A_n, remainder), self.A_n)

    def _truncate(self) -> None:
        if self.threshold is None:
            return
        crossed = self.active & (lp_norm_values(self.u, self.mu) >= self.threshold)
        if crossed.any():
            self.stopping[crossed] = self.step
            self.active &= ~crossed
            logger.debug(f"n={self.grid.n}: {int(crossed.sum())} path(s) stopped at step {self.step}")

    def _after_step(self) -> None:
        self._observe()
        self._truncate()
        if self.step in self.checkpoint_steps:
            self.snapshots[self.step] = self.u.copy()

    def _handle_blow_up(self, values: np.ndarray) -> None:
        bad = self.active & ~np.isfinite(values).all(axis=-1)
        for row in np.flatnonzero(bad):
            blow_up = _first_blow_up(values[row], self.grid, self.step + 1)
            if self.raise_on_blow_up:
                raise BlowUpError(blow_up.t, blow_up.x, blow_up.value)
            logger.warning(f"n={self.grid.n}, seed={self.seeds[row]}: blow-up at t={blow_up.t}, x={blow_up.x}")
            self.blow_ups[row] = blow_up
        self.blown |= bad
        self.active &= ~bad

    def advance(self, cells: np.ndarray) -> None:
        """Take one step per time slice of ``cells``, shaped (paths, steps, 2n)."""
        intensity = noise_intensity(self.grid)
        for i in range(cells.shape[-2]):
            eta = intensity * cells[:, i, :]
            with np.errstate(over="ignore", invalid="ignore"):
                values = euler_values(self.u, eta, self.F, self.grid)
            if not np.isfinite(values).all():
                self._handle_blow_up(values)
            self.u = values if self.active.all() else np.where(self.active[:, np.newaxis], values, self.u)
            if self.o is not None:
                self.o = euler_values(self.o, eta, ZERO, self.grid)
            self.step += 1
            self._after_step()

    def records(self) -> list[PathRecord]:
        records = []
        for row, seed in enumerate(self.seeds):
            monitor = None
            if self.o is not None:
                monitor = AprioriMonitor(
                    n=self.grid.n, nu=self.F.degree, mu=self.mu, R_n=float(self.R_n[row]), A_n=float(self.A_n[row])
                )
            records.append(
                PathRecord(
                    grid=self.grid,
                    seed=seed,
                    checkpoints={step: GridFunction(self.grid, snap[row]) for step, snap in self.snapshots.items()},
                    monitor=monitor,
                    stopping_step=int(self.stopping[row]) if self.stopping[row] >= 0 else None,
                    blow_up=self.blow_ups[row],
                )
            )
        return records


def _checkpoint_steps(grid: GridSpec, checkpoints: Sequence[float], horizon: float) -> tuple[set[int], int]:
    if not 0.0 < horizon <= 1.0:
        raise ConfigurationError(f"Horizon must lie in (0, 1], got {horizon!r}")
    last = grid.step_of(horizon)
    steps = {grid.step_of(t) for t in checkpoints}
    if any(step > last for step in steps):
        raise ConfigurationError(f"Checkpoints beyond the horizon {horizon!r}")
    return steps, last


def _nested_levels(levels: Sequence[GridSpec]) -> list[GridSpec]:
    if not levels:
        raise CouplingError("At least one level is required")
    ordered = list(levels)
    for coarse, fine in zip(ordered, ordered[1:], strict=False):
        if fine.n <= coarse.n:
            raise CouplingError(f"Levels must be strictly ascending, got n={coarse.n} before n={fine.n}")
        coarse.refinement_exponent(fine)
    return ordered


def _single_level(
    grid: GridSpec,
    F: Polynomial,
    psi: GridFunction,
    noise: NoiseSource,
    checkpoints: Sequence[float],
    *,
    mu: int,
    horizon: float,
    seed: int | None,
    threshold_factor: float | None,
    raise_on_blow_up: bool,
) -> PathRecord:
    if psi.grid != grid:
        raise CouplingError(f"Initial data lives on n={psi.grid.n}, the scheme on n={grid.n}")
    steps, last = _checkpoint_steps(grid, checkpoints, horizon)
    runner = _LevelRunner(
        grid,
        F,
        psi.values.real,
        steps,
        seeds=[seed],
        mu=mu,
        threshold_factor=threshold_factor,
        raise_on_blow_up=raise_on_blow_up,
    )
    m = grid.refinement_exponent(noise.finest)
    block = max(1, NOISE_CHUNK_STEPS // 4**m)
    for first in range(0, last, block):
        cells = noise.increments(grid, first, min(block, last - first))
        runner.advance(cells if cells.ndim == 3 else cells[np.newaxis])
    return runner.records()[0]


def solve_path(
    grid: GridSpec,
    F: Polynomial,
    psi: GridFunction,
    noise: NoiseSource,
    checkpoints: Sequence[float],
    *,
    mu: int = DEFAULT_MU,
    horizon: float = 1.0,
    seed: int | None = None,
) -> PathRecord:
    """Run the scheme on one level from ψ to ``horizon``, tracking O^n and the a-priori monitor."""
    return _single_level(
        grid,
        F,
        psi,
        noise,
        checkpoints,
        mu=mu,
        horizon=horizon,
        seed=getattr(noise, "seed", seed),
        threshold_factor=None,
        raise_on_blow_up=True,
    )


def truncated_solve(
    grid: GridSpec,
    F: Polynomial,
    psi: GridFunction,
    noise: NoiseSource,
    threshold_factor: float,
    checkpoints: Sequence[float] = (),
    *,
    mu: int = DEFAULT_MU,
    horizon: float = 1.0,
    seed: int | None = None,
) -> PathRecord:
    """Like ``solve_path`` but frozen from the first step where ‖u‖_{L^μ} >= threshold_factor * n."""
    if not threshold_factor > 0:
        raise ConfigurationError(f"Threshold factor must be positive, got {threshold_factor!r}")
    return _single_level(
        grid,
        F,
        psi,
        noise,
        checkpoints,
        mu=mu,
        horizon=horizon,
        seed=getattr(noise, "seed", seed),
        threshold_factor=threshold_factor,
        raise_on_blow_up=False,
    )


def coupled_solve_batch(
    levels: Sequence[GridSpec],
    F: Polynomial,
    psi: InitialCondition,
    seeds: Sequence[int],
    checkpoints: Sequence[float],
    *,
    mu: int = DEFAULT_MU,
    horizon: float = 1.0,
    threshold_factor: float | None = None,
    track_linear: bool = True,
    noise_factory: FineNoiseFactory = SeedBatchNoise,
) -> list[list[PathRecord]]:
    """Drive every level with the same fine noise, for each seed; returns records[seed_index][level_index]."""
    ordered = _nested_levels(levels)
    coarsest, finest = ordered[0], ordered[-1]
    seeds = list(seeds)
    _, last_coarse = _checkpoint_steps(coarsest, checkpoints, horizon)

    runners = []
    for grid in ordered:
        steps, _ = _checkpoint_steps(grid, checkpoints, horizon)
        runners.append(
            _LevelRunner(
                grid,
                F,
                psi.sample(grid).values,
                steps,
                seeds=seeds,
                mu=mu,
                track_linear=track_linear,
                threshold_factor=threshold_factor,
            )
        )

    noise = noise_factory(finest, seeds)
    m = coarsest.refinement_exponent(finest)
    total = last_coarse * 4**m
    block = max(NOISE_CHUNK_STEPS, 4**m)
    logger.debug(f"Coupled sweep over n={[grid.n for grid in ordered]}: {total} fine steps, {len(seeds)} path(s)")
    for first in range(0, total, block):
        fine = noise.fine_cells(first, min(block, total - first))
        cells = dyadic_levels(fine if fine.ndim == 3 else fine[np.newaxis], finest, coarsest)
        for runner in runners:
            runner.advance(cells[runner.grid.n])

    per_level = [runner.records() for runner in runners]
    return [[records[row] for records in per_level] for row in range(len(seeds))]


def coupled_solve(
    levels: Sequence[GridSpec],
    F: Polynomial,
    psi: InitialCondition,
    seed: int,
    checkpoints: Sequence[float],
    *,
    mu: int = DEFAULT_MU,
    horizon: float = 1.0,
    threshold_factor: float | None = None,
    noise_factory: FineNoiseFactory = SeedBatchNoise,
) -> list[PathRecord]:
    return coupled_solve_batch(
        levels,
        F,
        psi,
        [seed],
        checkpoints,
        mu=mu,
        horizon=horizon,
        threshold_factor=threshold_factor,
        noise_factory=noise_factory,
    )[0]


def apriori_report(record: PathRecord) -> AprioriReport:
    if record.monitor is None:
        raise ConfigurationError(f"Path for n={record.grid.n} was run without a-priori monitoring")
    monitor = record.monitor.validate()
    return AprioriReport(
        n=monitor.n,
        seed=record.seed,
        R_n=monitor.R_n,
        A_n=monitor.A_n,
        omega_n_holds=monitor.omega_n_holds,
        ratio=monitor.ratio,
    )
