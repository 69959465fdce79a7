# ruff: noqa: S101, D100, D101, D102, D103
import numpy as np
import pytest

from besov_rates.domain.verification import (
    CHECKS,
    VerificationSuite,
    exact,
    log_decay_excess,
    no_growth,
    run_verification,
)

EXACT_CHECKS = [
    "parseval",
    "round_trip",
    "delta_iota",
    "lp_reconstruction",
    "paraproduct_sum",
    "semigroup",
    "stencil_spectral",
    "stability_interval",
    "bernstein",
    "decay_bound",
]


class TestHelpers:
    """Pass rules shared by the checks."""

    def test_no_growth_passes_within_factor(self):
        """Growth up to twice the constant fitted at the smallest n is accepted."""
        result = no_growth("demo", {8: 1.0, 16: 1.5, 32: 1.9})
        assert result.passed
        assert result.measurements == {"8": 1.0, "16": 1.5, "32": 1.9}

    def test_no_growth_fails_beyond_factor(self):
        """Tripling the constant fails."""
        assert not no_growth("demo", {8: 1.0, 16: 3.0}).passed

    def test_exact(self):
        """Deviations are compared with the tolerance."""
        assert exact("demo", {4: 1e-13, 8: 5e-13}, 1e-12).passed
        assert not exact("demo", {4: 1e-13, 8: 5e-12}, 1e-12).passed


class TestSuite:
    """The registered property checks."""

    def test_registry(self):
        """Every property family has a check."""
        assert set(EXACT_CHECKS) <= set(CHECKS)
        assert {
            "lp_sandwich",
            "besov_embedding",
            "product",
            "smoothing",
            "strong_continuity",
            "schauder",
            "det_rate",
            "pn_p",
            "iota_norm",
            "kolmogorov_slopes",
            "rate_one_saturation",
            "uniform_mode_bound",
        } <= set(CHECKS)

    def test_grids(self):
        """Grids are the powers of two between the bounds."""
        suite = VerificationSuite(max_n=32)
        assert [grid.n for grid in suite.grids()] == [4, 8, 16, 32]
        assert [grid.n for grid in suite.grids(smallest=1, largest=4)] == [1, 2, 4]

    @pytest.mark.parametrize("name", EXACT_CHECKS)
    def test_exact_identities_hold(self, name: str):
        """Exact identities hold to rounding on small grids."""
        (result,) = run_verification(max_n=16, samples=2, bernstein_samples=20, names=[name])
        assert result.passed, result.detail

    @pytest.mark.parametrize("name", ["lp_sandwich", "besov_embedding", "det_rate"])
    def test_inequalities_hold(self, name: str):
        """A few no-growth checks pass on small grids."""
        (result,) = run_verification(max_n=32, samples=3, names=[name])
        assert result.passed, result.detail

    @pytest.mark.parametrize(
        "name", ["product", "smoothing", "strong_continuity", "schauder", "pn_p", "iota_norm", "decay_bound"]
    )
    def test_full_size_checks_hold(self, name: str):
        """The no-growth constants stay within the factor up to the default grid sizes."""
        (result,) = run_verification(names=[name])
        assert result.passed, result.detail

    @pytest.mark.filterwarnings("error::RuntimeWarning")
    def test_schauder_without_overflow(self):
        """The discrete time integral multiplier never overflows, including the zero mode."""
        (result,) = run_verification(max_n=64, samples=2, names=["schauder"])
        assert "Warning" not in result.detail
        assert all(np.isfinite(value) for value in result.measurements.values())

    def test_crashing_check_fails(self):
        """A check that raises is reported as failed, not propagated."""
        (result,) = VerificationSuite(max_n=16).run(["no_such_check"])
        assert not result.passed
        assert "KeyError" in result.detail

    def test_reproducible(self):
        """The same seed gives the same measurements."""
        first = run_verification(max_n=16, samples=2, names=["lp_sandwich"])
        second = run_verification(max_n=16, samples=2, names=["lp_sandwich"])
        assert first == second


class TestDecayExcess:
    """Log-space comparison of heat multipliers with exp(-κ t j²)."""

    @pytest.mark.filterwarnings("error")
    def test_underflowing_bound_still_compared(self):
        """A bound that underflows to zero in linear space is still compared, and a vanishing multiplier passes."""
        excess = log_decay_excess(np.array([0.0, 5e-300, np.exp(-700.0)]), np.array([800.0, 800.0, 700.0]))
        assert excess[0] == -np.inf
        assert excess[1] > 0.1
        assert abs(excess[2]) < 1e-12

    def test_small_decay_not_rescaled(self):
        """Below one the excess is the plain log ratio."""
        excess = log_decay_excess(np.array([1.0, np.exp(-0.25)]), np.array([0.5, 0.5]))
        np.testing.assert_allclose(excess, [0.5, 0.25])
