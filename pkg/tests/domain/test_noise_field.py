# ruff: noqa: S101, D100, D101, D102, D103
import numpy as np
import pytest

from besov_rates.core.exceptions import ConfigurationError, CouplingError, ShapeError
from besov_rates.domain.noise_field import (
    NOISE_CHUNK_STEPS,
    SeedBatchNoise,
    WhiteNoise,
    aggregate_cells,
    cell_variance,
    coarsen,
    eta_increment,
    fine_noise_block,
    halve_cells,
    noise_slab,
    stream_fine_noise,
)
from besov_rates.domain.types.grid import GridSpec


class TestFineNoise:
    """Seeded cell integrals on the finest grid."""

    def test_reproducible(self, grid_8: GridSpec):
        """The same seed gives the same bits, another seed does not."""
        first = fine_noise_block(grid_8, 3, 0, 10)
        np.testing.assert_array_equal(first, fine_noise_block(grid_8, 3, 0, 10))
        assert not np.array_equal(first, fine_noise_block(grid_8, 4, 0, 10))

    def test_random_access_across_chunks(self, grid_8: GridSpec):
        """A window straddling a chunk boundary matches the slice of a longer block."""
        start = NOISE_CHUNK_STEPS - 6
        long_block = fine_noise_block(grid_8, 11, 0, NOISE_CHUNK_STEPS + 10)
        np.testing.assert_array_equal(fine_noise_block(grid_8, 11, start, 16), long_block[start : start + 16])

    def test_stream_fine_noise(self, grid_8: GridSpec):
        """A single step is the matching row of the block."""
        np.testing.assert_array_equal(stream_fine_noise(grid_8, 5, 17), fine_noise_block(grid_8, 5, 17, 1)[0])

    def test_cell_variance(self, grid_8: GridSpec):
        """Cell integrals have variance |A| = h / 2n."""
        cells = fine_noise_block(grid_8, 0, 0, 4 * NOISE_CHUNK_STEPS)
        assert np.var(cells) / cell_variance(grid_8) == pytest.approx(1.0, abs=0.05)

    @pytest.mark.parametrize("seed", [-1, 2**128])
    def test_seed_range(self, grid_8: GridSpec, seed: int):
        """Seeds outside [0, 2^128) are rejected."""
        with pytest.raises(ConfigurationError):
            fine_noise_block(grid_8, seed, 0, 1)


class TestCoarsening:
    """Exact aggregation of fine cells to nested levels."""

    def test_coarse_cell_variance(self):
        """Aggregated cells have the variance of the coarse cells."""
        fine, coarse = GridSpec.of(16), GridSpec.of(4)
        cells = WhiteNoise(fine, 2).increments(coarse, 0, 1024)
        assert np.var(cells) / cell_variance(coarse) == pytest.approx(1.0, abs=0.1)

    def test_dyadic_path_independence(self):
        """Coarsening 16 -> 4 directly or through 8 gives identical bits."""
        finest, middle, coarsest = GridSpec.of(16), GridSpec.of(8), GridSpec.of(4)
        slab = noise_slab(finest, coarsest, seed=9, coarse_step=3)
        np.testing.assert_array_equal(coarsen(slab, finest, coarsest), slab.level_increments[4])
        np.testing.assert_array_equal(coarsen(slab, middle, coarsest), slab.level_increments[4])

    def test_sums_are_preserved(self, grid_8: GridSpec):
        """Aggregation only regroups cells, so the total is unchanged."""
        cells = fine_noise_block(grid_8, 1, 0, 16)
        assert aggregate_cells(cells, 2).sum() == pytest.approx(cells.sum())

    def test_halving_needs_whole_blocks(self):
        """Time steps must come in fours and cells in pairs."""
        with pytest.raises(ShapeError):
            halve_cells(np.zeros((3, 8)))

    def test_levels_must_be_nested(self):
        """n=12 is not a dyadic refinement of n=16."""
        with pytest.raises(CouplingError):
            WhiteNoise(GridSpec.of(16), 0).increments(GridSpec.of(12), 0, 1)

    def test_batch_rows_match_single_seeds(self, grid_8: GridSpec):
        """Each row of a seed batch is the single-seed realization."""
        batch = SeedBatchNoise(grid_8, [4, 5]).increments(GridSpec.of(4), 2, 3)
        np.testing.assert_array_equal(batch[1], WhiteNoise(grid_8, 5).increments(GridSpec.of(4), 2, 3))


class TestEta:
    """Discrete noise η_n."""

    def test_scaling(self, grid_4: GridSpec):
        """η_n = 2n / h times the cell integral."""
        cells = np.arange(grid_4.size, dtype=np.float64)
        np.testing.assert_allclose(eta_increment(cells, grid_4).values, cells * grid_4.size / grid_4.h)

    def test_shape(self, grid_4: GridSpec):
        """The cells must match the grid."""
        with pytest.raises(ShapeError):
            eta_increment(np.zeros(3), grid_4)
