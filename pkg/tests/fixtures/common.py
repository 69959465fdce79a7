"""Common fixtures for tests."""

import numpy as np
import pytest

from besov_rates.domain.spde_scheme import ZERO, coupled_solve, coupled_solve_batch
from besov_rates.domain.types.grid import GridFunction, GridSpec
from besov_rates.domain.types.scheme import InitialCondition, PathRecord, Polynomial


@pytest.fixture
def rng() -> np.random.Generator:
    """Return a seeded generator for random test data."""
    return np.random.Generator(np.random.Philox(key=1234))


@pytest.fixture
def grid_4() -> GridSpec:
    return GridSpec.of(4)


@pytest.fixture
def grid_8() -> GridSpec:
    return GridSpec.of(8)


@pytest.fixture
def grid_16() -> GridSpec:
    return GridSpec.of(16)


@pytest.fixture
def random_function(grid_8: GridSpec, rng: np.random.Generator) -> GridFunction:
    """Return a real random grid function on the n=8 grid."""
    return GridFunction(grid_8, rng.standard_normal(grid_8.size))


@pytest.fixture
def allen_cahn() -> Polynomial:
    return Polynomial.allen_cahn()


@pytest.fixture
def coupled_records(allen_cahn: Polynomial) -> list[PathRecord]:
    """Return Allen-Cahn records for n=4, 8 and the reference 32, driven by seed 7."""
    levels = [GridSpec.of(n) for n in (4, 8, 32)]
    return coupled_solve(levels, allen_cahn, InitialCondition.SIN, 7, [0.0625, 0.125], horizon=0.125)


@pytest.fixture
def linear_records() -> list[list[PathRecord]]:
    """Return linear records for n=4 and 16 from zero data, for seeds 0..3."""
    levels = [GridSpec.of(4), GridSpec.of(16)]
    return coupled_solve_batch(levels, ZERO, InitialCondition.ZERO, [0, 1, 2, 3], [0.0625], horizon=0.0625)


HEADLINE_LEVELS = (4, 8, 16)
HEADLINE_REFERENCE = 64
HEADLINE_SEEDS = tuple(range(8))


@pytest.fixture(scope="session")
def headline_batches() -> list[list[PathRecord]]:
    """Return Allen-Cahn runs of levels 4, 8, 16 against the reference 64 for eight seeds, up to t=1/4."""
    levels = [GridSpec.of(n) for n in (*HEADLINE_LEVELS, HEADLINE_REFERENCE)]
    return coupled_solve_batch(
        levels, Polynomial.allen_cahn(), InitialCondition.SIN, list(HEADLINE_SEEDS), [0.125, 0.25], horizon=0.25
    )
