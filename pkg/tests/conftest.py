import logging

import pytest

from besov_rates.settings import ExperimentConfig, load_settings
from tests.fixtures.common import (  # noqa: F401
    allen_cahn,
    coupled_records,
    grid_4,
    grid_8,
    grid_16,
    headline_batches,
    linear_records,
    random_function,
    rng,
)

logging.getLogger("besov_rates").setLevel(logging.DEBUG)


@pytest.fixture(scope="session")
def app_settings(request: type[pytest.FixtureRequest]) -> ExperimentConfig:
    return load_settings()


@pytest.fixture
def output_settings(app_settings: ExperimentConfig, tmp_path) -> ExperimentConfig:
    """Test settings writing into a temporary directory."""
    return app_settings.model_copy(update={"output_dir": tmp_path / "out"})
