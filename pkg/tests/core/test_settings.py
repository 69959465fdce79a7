# ruff: noqa: S101, D100, D101, D102, D103
from pathlib import Path

import pytest
from pydantic import ValidationError

from besov_rates.settings import ExperimentConfig, Mode, load_settings


class TestLoadSettings:
    """Layered configuration loading."""

    def test_test_config(self, app_settings: ExperimentConfig):
        """The test configuration is picked up from BESOV_RATES_CONFIG."""
        assert app_settings.levels == [4, 8]
        assert app_settings.reference_n == 32
        assert app_settings.checkpoints == [0.0625, 0.125]
        assert app_settings.app.debug is True

    def test_explicit_file(self, tmp_path: Path):
        """An explicit file wins over the environment."""
        config = tmp_path / "custom.yaml"
        config.write_text("levels: [8, 16, 32]\nseeds: 3\n", encoding="utf-8")
        settings = load_settings(config)
        assert settings.levels == [8, 16, 32]
        assert settings.seed_list == [0, 1, 2]

    def test_missing_explicit_file(self, tmp_path: Path):
        """A named file must exist."""
        with pytest.raises(FileNotFoundError):
            load_settings(tmp_path / "missing.yaml")


class TestDefaults:
    """Default values of the experiment configuration."""

    def test_allen_cahn_defaults(self):
        """c = 1/8, μ = 6, F(v) = v - v^3 and ψ = sin(2πx)."""
        config = ExperimentConfig()
        assert config.mode == Mode.RATES
        assert config.scheme.c == 0.125
        assert config.scheme.mu == 6
        assert config.scheme.polynomial.coefficients == (0.0, 1.0, 0.0, -1.0)
        assert config.scheme.psi == "sin"
        assert config.besov.eps0 == 0.05
        assert config.reference_n == 256
        assert len(config.checkpoints) == 16

    def test_grids(self):
        """Grids are the levels followed by the reference."""
        assert [grid.n for grid in ExperimentConfig(levels=[4, 8]).grids] == [4, 8, 32]


class TestValidation:
    """Every violated invariant is reported."""

    @pytest.mark.parametrize(
        "overrides",
        [
            {"levels": [12, 24]},
            {"levels": [16, 8]},
            {"levels": [1]},
            {"reference_multiple": 3},
            {"checkpoints": [0.5, 0.25]},
            {"checkpoints": [1.5]},
            {"besov": {"theta_list": [0.1]}},
            {"besov": {"theta_list": [-0.5]}},
            {"besov": {"kolmogorov": [{"alpha": 0.1, "q": 64}]}},
            {"scheme": {"F": [0.0, 1.0, -1.0]}},
            {"scheme": {"F": [0.0, 1.0, 0.0, 1.0]}},
            {"scheme": {"F": [0.0, 0.0, 0.0, 0.0, 0.0, -1.0], "mu": 4}},
            {"scheme": {"c": 0.2}},
            {"scheme": {"threshold_factor": 0.0}},
            {"workers": 0},
        ],
    )
    def test_invalid(self, overrides: dict):
        """Invalid values are rejected."""
        with pytest.raises(ValidationError):
            ExperimentConfig.model_validate(overrides)

    def test_off_grid_checkpoint(self):
        """Checkpoints must lie on the time grid of the coarsest level."""
        with pytest.raises(ValidationError) as info:
            ExperimentConfig(levels=[4, 8], checkpoints=[0.001])
        assert "not on the time grid of n=4" in str(info.value)

    def test_collects_every_error(self):
        """Independent problems are reported together."""
        with pytest.raises(ValidationError) as info:
            ExperimentConfig.model_validate({"levels": [3], "besov": {"theta_list": [0.3]}, "seeds": 0})
        assert info.value.error_count() == 3

    def test_zero_polynomial(self):
        """"zero" selects the linear equation."""
        config = ExperimentConfig.model_validate({"scheme": {"F": "zero"}})
        assert config.scheme.polynomial.is_zero


class TestConfigHash:
    """The digest stamped on every artifact."""

    def test_ignores_workers_and_output(self, tmp_path: Path):
        """Parallelism and output location cannot change results."""
        base = ExperimentConfig()
        assert base.config_hash() == ExperimentConfig(workers=4, output_dir=tmp_path).config_hash()

    def test_changes_with_results(self):
        """Anything that changes a result changes the hash."""
        assert ExperimentConfig().config_hash() != ExperimentConfig(seeds=21).config_hash()
