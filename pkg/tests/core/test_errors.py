# ruff: noqa: S101, D100, D101, D102, D103
import pytest
from essentials.exceptions import InvalidArgument, ObjectNotFound
from pydantic import ValidationError

from besov_rates.core.errors import (
    EXIT_CONFIGURATION,
    EXIT_COUPLING,
    EXIT_NOT_FOUND,
    EXIT_PATH_FAILURE,
    EXIT_SOFTWARE,
    handle_error,
)
from besov_rates.core.exceptions import (
    BlowUpError,
    ConfigurationError,
    CouplingError,
    FrequencyRangeError,
    OmegaViolation,
)
from besov_rates.settings import ExperimentConfig


class TestHandleError:
    """Exception type to exit code and error document."""

    @pytest.mark.parametrize(
        "exception,exit_code",
        [
            (ConfigurationError("bad c"), EXIT_CONFIGURATION),
            (FrequencyRangeError(), EXIT_CONFIGURATION),
            (InvalidArgument("bad"), EXIT_CONFIGURATION),
            (CouplingError(), EXIT_COUPLING),
            (OmegaViolation(3, 16), EXIT_PATH_FAILURE),
            (ObjectNotFound("gone"), EXIT_NOT_FOUND),
            (FileNotFoundError("config.yaml"), EXIT_NOT_FOUND),
            (RuntimeError("boom"), EXIT_SOFTWARE),
        ],
    )
    def test_exit_codes(self, exception: Exception, exit_code: int):
        """Each exception class maps to its exit code."""
        code, document = handle_error(exception)
        assert code == exit_code
        assert document["exit_code"] == exit_code
        assert document["detail"]

    def test_blow_up_location(self):
        """Blow-ups report where they happened."""
        code, document = handle_error(BlowUpError(0.5, 0.25, float("inf")))
        assert code == EXIT_PATH_FAILURE
        assert document["errors"] == [{"t": 0.5, "x": 0.25, "value": "inf"}]

    def test_validation_errors_enumerated(self):
        """Every violated invariant appears in the document."""
        with pytest.raises(ValidationError) as info:
            ExperimentConfig.model_validate({"levels": [3], "besov": {"theta_list": [0.3]}})
        code, document = handle_error(info.value)
        assert code == EXIT_CONFIGURATION
        assert {error["loc"] for error in document["errors"]} == {"levels", "besov.theta_list"}

    def test_unexpected_error_hides_message(self):
        """Unexpected errors only name their type."""
        _, document = handle_error(ZeroDivisionError("secret"))
        assert document["detail"] == "Unexpected error: ZeroDivisionError"
