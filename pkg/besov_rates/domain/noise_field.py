"""Seeded space-time white noise on the finest grid and its exact coarsening to nested levels.

Every value is a pure function of (seed, fine step, spatial index). Fine steps are grouped into
chunks of ``NOISE_CHUNK_STEPS``. Each chunk has its own Philox counter block keyed by the seed, so
any step can be produced without generating the ones before it.

Coarsening is always performed one dyadic level at a time, four time steps by two cells per
halving, and the additions run in a fixed order. Going from N to n in one call therefore gives
exactly the same bits as going through 2n first.
"""

from functools import lru_cache

import numpy as np

from besov_rates.core.exceptions import ConfigurationError, CouplingError, ShapeError
from besov_rates.domain.types.grid import GridFunction, GridSpec
from besov_rates.domain.types.noise import NoiseSlab

NOISE_CHUNK_STEPS = 256
MAX_SEED = 2**128


def _check_seed(seed: int) -> None:
    if not 0 <= seed < MAX_SEED:
        raise ConfigurationError(f"Seed must lie in [0, 2^128), got {seed}")


@lru_cache(maxsize=8)
def _standard_chunk(seed: int, size: int, chunk_index: int) -> np.ndarray:
    bit_generator = np.random.Philox(key=seed, counter=np.array([0, chunk_index, 0, 0], dtype=np.uint64))
    chunk = np.random.Generator(bit_generator).standard_normal((NOISE_CHUNK_STEPS, size))
    chunk.setflags(write=False)
    return chunk


def cell_variance(grid: GridSpec) -> float:
    """|A| for one space-time cell of the grid: h (2n)^-1."""
    return grid.h / grid.size


def fine_noise_block(grid: GridSpec, seed: int, first_step: int, count: int) -> np.ndarray:
    """Cell integrals for fine steps first_step .. first_step + count - 1, shape (count, 2N)."""
    _check_seed(seed)
    if first_step < 0 or count < 0:
        raise ConfigurationError(f"Invalid step range start={first_step}, count={count}")

    pieces = []
    step, stop = first_step, first_step + count
    while step < stop:
        chunk_index, offset = divmod(step, NOISE_CHUNK_STEPS)
        take = min(NOISE_CHUNK_STEPS - offset, stop - step)
        pieces.append(_standard_chunk(seed, grid.size, chunk_index)[offset : offset + take])
        step += take

    block = np.concatenate(pieces) if pieces else np.empty((0, grid.size))
    return block * np.sqrt(cell_variance(grid))


def stream_fine_noise(grid_finest: GridSpec, seed: int, fine_step: int) -> np.ndarray:
    return fine_noise_block(grid_finest, seed, fine_step, 1)[0]


def halve_cells(cells: np.ndarray) -> np.ndarray:
    """Merge 4 consecutive time steps and 2 neighbouring cells: (..., T, 2N) -> (..., T/4, N)."""
    if cells.shape[-2] % 4 or cells.shape[-1] % 2:
        raise ShapeError(f"Cannot halve a cell array of shape {cells.shape}")
    merged = cells[..., 0::4, :] + cells[..., 1::4, :] + cells[..., 2::4, :] + cells[..., 3::4, :]
    return merged[..., 0::2] + merged[..., 1::2]


def aggregate_cells(cells: np.ndarray, m: int) -> np.ndarray:
    for _ in range(m):
        cells = halve_cells(cells)
    return cells


def dyadic_levels(fine_cells: np.ndarray, finest: GridSpec, coarsest: GridSpec) -> dict[int, np.ndarray]:
    """Cells of every dyadic level between finest and coarsest, built by successive halving."""
    m = coarsest.refinement_exponent(finest)
    levels = {finest.n: fine_cells}
    cells = fine_cells
    for exponent in range(1, m + 1):
        cells = halve_cells(cells)
        levels[finest.n >> exponent] = cells
    return levels


def noise_slab(finest: GridSpec, coarsest: GridSpec, seed: int, coarse_step: int) -> NoiseSlab:
    """All nested levels' cells for one time step of the coarsest level."""
    m = coarsest.refinement_exponent(finest)
    fine_time_index = coarse_step * 4**m
    fine_cells = fine_noise_block(finest, seed, fine_time_index, 4**m)
    return NoiseSlab(
        finest=finest,
        fine_time_index=fine_time_index,
        level_increments=dyadic_levels(fine_cells, finest, coarsest),
    )


def coarsen(slab: NoiseSlab, from_level: GridSpec, to_level: GridSpec) -> np.ndarray:
    """Aggregate the cells of ``from_level`` held in the slab to the coarser ``to_level``."""
    m = to_level.refinement_exponent(from_level)
    if from_level.c != slab.finest.c or from_level.n not in slab.level_increments:
        raise CouplingError(f"The slab holds no cells for level n={from_level.n}, c={from_level.c}")
    return aggregate_cells(slab.level_increments[from_level.n], m)


def noise_intensity(grid: GridSpec) -> float:
    """The factor 2n / h turning a cell integral into the discrete noise η_n."""
    return grid.size * grid.steps_per_unit


def eta_increment(cells: np.ndarray, grid: GridSpec) -> GridFunction:
    cells = np.asarray(cells)
    if cells.shape != (grid.size,):
        raise ShapeError(f"Expected {grid.size} cells for n={grid.n}, got shape {cells.shape}")
    return GridFunction(grid, noise_intensity(grid) * cells)


class WhiteNoise:
    """One seeded realization of white noise, handed out at any level nested in ``finest``."""

    def __init__(self, finest: GridSpec, seed: int) -> None:
        _check_seed(seed)
        self._finest = finest
        self.seed = seed

    @property
    def finest(self) -> GridSpec:
        return self._finest

    def fine_cells(self, first_fine_step: int, count: int) -> np.ndarray:
        return fine_noise_block(self._finest, self.seed, first_fine_step, count)

    def increments(self, level: GridSpec, first_step: int, count: int) -> np.ndarray:
        m = level.refinement_exponent(self._finest)
        return aggregate_cells(self.fine_cells(first_step * 4**m, count * 4**m), m)


class SeedBatchNoise:
    """Independent realizations for a batch of seeds, stacked along a leading axis."""

    def __init__(self, finest: GridSpec, seeds: list[int]) -> None:
        self._finest = finest
        self.sources = [WhiteNoise(finest, seed) for seed in seeds]

    @property
    def finest(self) -> GridSpec:
        return self._finest

    def fine_cells(self, first_fine_step: int, count: int) -> np.ndarray:
        return np.stack([source.fine_cells(first_fine_step, count) for source in self.sources])

    def increments(self, level: GridSpec, first_step: int, count: int) -> np.ndarray:
        m = level.refinement_exponent(self._finest)
        return aggregate_cells(self.fine_cells(first_step * 4**m, count * 4**m), m)


class ZeroNoise:
    """The deterministic limit: every cell integral is zero."""

    def __init__(self, finest: GridSpec, batch: int | None = None) -> None:
        self._finest = finest
        self.batch = batch

    @property
    def finest(self) -> GridSpec:
        return self._finest

    def fine_cells(self, first_fine_step: int, count: int) -> np.ndarray:
        shape = (count, self._finest.size) if self.batch is None else (self.batch, count, self._finest.size)
        return np.zeros(shape)

    def increments(self, level: GridSpec, first_step: int, count: int) -> np.ndarray:
        m = level.refinement_exponent(self._finest)
        return aggregate_cells(self.fine_cells(first_step * 4**m, count * 4**m), m)
