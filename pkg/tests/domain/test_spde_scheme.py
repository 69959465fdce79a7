# ruff: noqa: S101, D100, D101, D102, D103
import numpy as np
import pytest

from besov_rates.core.exceptions import BlowUpError, ConfigurationError, CouplingError
from besov_rates.domain.besov_toolkit import besov_norm, build_filter_bank, lp_norm
from besov_rates.domain.error_lab import error_field
from besov_rates.domain.noise_field import WhiteNoise, ZeroNoise
from besov_rates.domain.spde_scheme import (
    ZERO,
    apriori_report,
    coupled_solve,
    coupled_solve_batch,
    euler_step,
    solve_path,
    truncated_solve,
)
from besov_rates.domain.spectral_grid import discrete_laplacian, discrete_semigroup_apply, discrete_semigroup_steps
from besov_rates.domain.types.besov import BesovParams
from besov_rates.domain.types.grid import GridFunction, GridSpec
from besov_rates.domain.types.scheme import InitialCondition, PathRecord, Polynomial, SchemeState
from tests.fixtures.common import HEADLINE_LEVELS, HEADLINE_REFERENCE


class TestEulerStep:
    """One step of the explicit scheme."""

    def test_stencil(self, random_function: GridFunction, allen_cahn: Polynomial, rng: np.random.Generator):
        """u + h (Δu + F(u) + η)."""
        grid = random_function.grid
        eta = GridFunction(grid, rng.standard_normal(grid.size))
        state = euler_step(SchemeState(random_function), eta, allen_cahn)
        u = random_function.values
        expected = u + grid.h * (discrete_laplacian(random_function).values + u - u**3 + eta.values)
        np.testing.assert_allclose(state.u.values, expected, atol=1e-12)
        assert state.step_index == 1
        assert state.t == grid.h

    def test_constant_without_forcing(self, grid_8: GridSpec):
        """Constants are fixed points of the linear noiseless scheme."""
        state = SchemeState(GridFunction(grid_8, np.full(grid_8.size, 0.3)))
        np.testing.assert_allclose(euler_step(state, GridFunction.zeros(grid_8), ZERO).u.values, 0.3)

    def test_blow_up(self, grid_8: GridSpec, allen_cahn: Polynomial):
        """A non-finite value raises with its location."""
        values = np.zeros(grid_8.size)
        values[5] = 1e200
        with pytest.raises(BlowUpError) as info:
            euler_step(SchemeState(GridFunction(grid_8, values)), GridFunction.zeros(grid_8), allen_cahn)
        assert info.value.x == 5 / grid_8.size
        assert info.value.t == grid_8.h

    def test_mild_form(self, grid_8: GridSpec, allen_cahn: Polynomial, rng: np.random.Generator):
        """k steps equal P^k ψ plus the discrete Duhamel sum h Σ_i P^(k-1-i) (F(u_i) + η_i)."""
        steps = 20
        psi = InitialCondition.SIN.sample(grid_8)
        etas = [GridFunction(grid_8, rng.standard_normal(grid_8.size)) for _ in range(steps)]
        states = [SchemeState(psi)]
        for eta in etas:
            states.append(euler_step(states[-1], eta, allen_cahn))

        expected = discrete_semigroup_steps(grid_8, steps, psi).values.real
        for i, (state, eta) in enumerate(zip(states[:-1], etas, strict=True)):
            forcing = GridFunction(grid_8, allen_cahn(state.u.values) + eta.values)
            expected = expected + grid_8.h * discrete_semigroup_steps(grid_8, steps - 1 - i, forcing).values.real
        np.testing.assert_allclose(states[-1].u.values, expected, atol=1e-10)


class TestSolvePath:
    """Single-level runs."""

    def test_linear_noiseless_is_discrete_semigroup(self, grid_8: GridSpec):
        """With F = 0 and no noise the scheme is the discrete heat semigroup."""
        psi = InitialCondition.SIN.sample(grid_8)
        record = solve_path(grid_8, ZERO, psi, ZeroNoise(grid_8), [0.125], horizon=0.125)
        expected = discrete_semigroup_apply(grid_8, 0.125, psi)
        np.testing.assert_allclose(record.snapshot(0.125).values, expected.values, atol=1e-10)

    def test_seed_recorded(self, grid_8: GridSpec, allen_cahn: Polynomial):
        """The record carries the seed of its noise."""
        psi = InitialCondition.SIN.sample(grid_8)
        record = solve_path(grid_8, allen_cahn, psi, WhiteNoise(grid_8, 21), [0.0625], horizon=0.0625)
        assert record.seed == 21
        assert record.times == [0.0625]

    def test_initial_data_on_other_grid(self, grid_4: GridSpec, grid_8: GridSpec, allen_cahn: Polynomial):
        """ψ must live on the scheme grid."""
        with pytest.raises(CouplingError):
            solve_path(grid_8, allen_cahn, InitialCondition.SIN.sample(grid_4), ZeroNoise(grid_8), [0.0625])

    def test_checkpoint_beyond_horizon(self, grid_8: GridSpec, allen_cahn: Polynomial):
        """Checkpoints after the horizon are rejected."""
        with pytest.raises(ConfigurationError):
            solve_path(grid_8, allen_cahn, InitialCondition.SIN.sample(grid_8), ZeroNoise(grid_8), [0.5], horizon=0.25)

    def test_mu_must_exceed_degree(self, grid_8: GridSpec, allen_cahn: Polynomial):
        """The monitor exponent has to be larger than the degree of F."""
        with pytest.raises(ConfigurationError):
            solve_path(grid_8, allen_cahn, InitialCondition.SIN.sample(grid_8), ZeroNoise(grid_8), [0.0625], mu=2)


class TestTruncatedSolve:
    """Runs frozen at the truncation threshold."""

    def test_stops_immediately_below_initial_norm(self, grid_4: GridSpec, allen_cahn: Polynomial):
        """A threshold under ‖ψ‖_{L^μ} stops the path at step 0 and freezes it there."""
        psi = InitialCondition.SIN.sample(grid_4)
        record = truncated_solve(grid_4, allen_cahn, psi, WhiteNoise(grid_4, 0), 0.01, [0.0625], horizon=0.0625)
        assert record.stopping_step == 0
        assert record.stopping_time == 0.0
        np.testing.assert_array_equal(record.snapshot(0.0625).values, psi.values)

    def test_large_threshold_never_stops(self, grid_4: GridSpec, allen_cahn: Polynomial):
        """A generous threshold leaves the path untouched."""
        psi = InitialCondition.SIN.sample(grid_4)
        truncated = truncated_solve(grid_4, allen_cahn, psi, WhiteNoise(grid_4, 0), 1e6, [0.0625], horizon=0.0625)
        plain = solve_path(grid_4, allen_cahn, psi, WhiteNoise(grid_4, 0), [0.0625], horizon=0.0625)
        assert truncated.stopping_step is None
        np.testing.assert_array_equal(truncated.snapshot(0.0625).values, plain.snapshot(0.0625).values)

    def test_follows_plain_path_then_freezes(self, grid_4: GridSpec):
        """Up to τ_n the truncated path is the plain one; after it every snapshot is the value at τ_n."""
        F = Polynomial(coefficients=(0.0, 4.0, 0.0, -1.0))
        psi = GridFunction(grid_4, np.full(grid_4.size, 0.1))
        times = [i / 16 for i in range(1, 17)]
        plain = solve_path(grid_4, F, psi, ZeroNoise(grid_4), times)
        # constant data grows monotonically towards 2, so the crossing falls in (1/2, 9/16]
        factor = (lp_norm(plain.snapshot(0.5), 6) + lp_norm(plain.snapshot(0.5625), 6)) / 2 / grid_4.n
        truncated = truncated_solve(grid_4, F, psi, ZeroNoise(grid_4), factor, times)

        assert 0.5 < truncated.stopping_time <= 0.5625
        for t in times:
            if t <= 0.5:
                np.testing.assert_array_equal(truncated.snapshot(t).values, plain.snapshot(t).values)
            else:
                np.testing.assert_array_equal(truncated.snapshot(t).values, truncated.snapshot(0.5625).values)
        assert not np.array_equal(truncated.snapshot(1.0).values, plain.snapshot(1.0).values)

    def test_monitor_stops_with_the_path(self, grid_4: GridSpec, allen_cahn: Polynomial):
        """R_n and A_n keep the values they had at the stopping step."""
        psi = InitialCondition.SIN.sample(grid_4)
        record = truncated_solve(grid_4, allen_cahn, psi, WhiteNoise(grid_4, 0), 0.01, [0.0625], horizon=0.0625)
        assert record.stopping_step == 0
        assert record.monitor.R_n == 1.0
        assert record.monitor.A_n == pytest.approx(lp_norm(psi, 6))

    def test_truncation_rarely_fires(self):
        """With threshold 10n the n=64 Allen-Cahn path runs to t=1 on at least 19 of 20 seeds, without blow-up."""
        batch = coupled_solve_batch(
            [GridSpec.of(64)],
            Polynomial.allen_cahn(),
            InitialCondition.SIN,
            list(range(20)),
            [1.0],
            threshold_factor=10.0,
            track_linear=False,
        )
        records = [row[0] for row in batch]
        assert all(record.blow_up is None for record in records)
        assert sum(record.stopping_step is None for record in records) >= 19

    @pytest.mark.parametrize("factor", [0.0, -1.0])
    def test_threshold_must_be_positive(self, grid_4: GridSpec, allen_cahn: Polynomial, factor: float):
        """Non-positive thresholds are rejected."""
        with pytest.raises(ConfigurationError):
            truncated_solve(grid_4, allen_cahn, InitialCondition.SIN.sample(grid_4), ZeroNoise(grid_4), factor)


class TestCoupledSolve:
    """Nested levels driven by one fine noise realization."""

    def test_one_record_per_level(self, coupled_records: list[PathRecord]):
        """Records come back in level order with every checkpoint."""
        assert [record.grid.n for record in coupled_records] == [4, 8, 32]
        assert all(record.times == [0.0625, 0.125] for record in coupled_records)
        assert all(record.seed == 7 for record in coupled_records)

    def test_coarse_level_matches_single_level_run(self, coupled_records: list[PathRecord], allen_cahn: Polynomial):
        """The coarsest coupled path is the single-level path driven by the aggregated noise."""
        grid = GridSpec.of(4)
        single = solve_path(
            grid, allen_cahn, InitialCondition.SIN.sample(grid), WhiteNoise(GridSpec.of(32), 7), [0.125], horizon=0.125
        )
        np.testing.assert_allclose(single.snapshot(0.125).values, coupled_records[0].snapshot(0.125).values, atol=1e-12)

    def test_batch_rows_are_single_runs(self, allen_cahn: Polynomial):
        """A path computed in a batch has the same bits as one computed alone."""
        levels = [GridSpec.of(4), GridSpec.of(16)]
        batch = coupled_solve_batch(levels, allen_cahn, InitialCondition.SIN, [3, 8], [0.0625], horizon=0.0625)
        alone = coupled_solve(levels, allen_cahn, InitialCondition.SIN, 8, [0.0625], horizon=0.0625)
        for batched, single in zip(batch[1], alone, strict=True):
            np.testing.assert_array_equal(batched.snapshot(0.0625).values, single.snapshot(0.0625).values)

    def test_linear_error_smaller_in_weaker_norm(self, linear_records: list[list[PathRecord]]):
        """For coupled linear runs the B^-0.4 error never exceeds the B^0 error, and is smaller overall."""
        bank = build_filter_bank(4)
        weak, strong = [], []
        for coarse, fine in linear_records:
            error = error_field(fine, coarse, 0.0625)
            weak.append(besov_norm(error, BesovParams(alpha=-0.4), bank))
            strong.append(besov_norm(error, BesovParams(alpha=0.0), bank))
        assert all(w <= s for w, s in zip(weak, strong, strict=True))
        assert sum(weak) < sum(strong)

    def test_levels_must_be_nested(self, allen_cahn: Polynomial):
        """Levels that are not dyadic refinements of each other are rejected."""
        with pytest.raises(CouplingError):
            coupled_solve([GridSpec.of(8), GridSpec.of(12)], allen_cahn, InitialCondition.SIN, 0, [0.0625])

    def test_levels_must_ascend(self, allen_cahn: Polynomial):
        """Levels are given coarse to fine."""
        with pytest.raises(CouplingError):
            coupled_solve([GridSpec.of(8), GridSpec.of(4)], allen_cahn, InitialCondition.SIN, 0, [0.0625])


class TestApriori:
    """A-priori monitors R_n, A_n and Ω_n."""

    def test_report(self, coupled_records: list[PathRecord]):
        """R_n is at least one and the ratio matches its definition."""
        report = apriori_report(coupled_records[1])
        assert report.n == 8
        assert report.seed == 7
        assert report.R_n >= 1.0
        assert report.A_n > 0.0
        assert report.ratio == pytest.approx(report.A_n / report.R_n ** ((3 + 6 - 1) / 6))

    def test_linear_remainder_vanishes(self, grid_8: GridSpec):
        """For F = 0 and ψ = 0 the path is its own linear part."""
        record = solve_path(
            grid_8, ZERO, InitialCondition.ZERO.sample(grid_8), WhiteNoise(grid_8, 1), [0.0625], horizon=0.0625
        )
        assert apriori_report(record).A_n == 0.0

    def test_requires_monitor(self):
        """Runs without linear tracking have no report."""
        records = coupled_solve_batch(
            [GridSpec.of(4)], ZERO, InitialCondition.ZERO, [0], [0.0625], horizon=0.0625, track_linear=False
        )
        with pytest.raises(ConfigurationError):
            apriori_report(records[0][0])

    def test_omega_n_is_its_inequality(self, headline_batches: list[list[PathRecord]]):
        """Ω_n holds exactly when R^(ν(ν+μ)) <= n^(2 - 2(ν-1)/μ), here R^27 <= n^(4/3)."""
        for records in headline_batches:
            for record in records:
                report = apriori_report(record)
                assert report.omega_n_holds == (27 * np.log(report.R_n) <= 4 / 3 * np.log(report.n))

    def test_omega_n_holds_without_noise(self, grid_16: GridSpec, allen_cahn: Polynomial):
        """Without noise R_n = 1, so Ω_n holds at every n."""
        psi = InitialCondition.SIN.sample(grid_16)
        report = apriori_report(solve_path(grid_16, allen_cahn, psi, ZeroNoise(grid_16), [0.25], horizon=0.25))
        assert report.R_n == 1.0
        assert report.omega_n_holds

    def test_headline_runs_stay_bounded(self, headline_batches: list[list[PathRecord]]):
        """No Allen-Cahn path blows up, and the worst A_n / R_n^((ν+μ-1)/μ) at most doubles under refinement."""
        assert all(record.blow_up is None for records in headline_batches for record in records)
        levels = (*HEADLINE_LEVELS, HEADLINE_REFERENCE)
        worst = {
            n: max(apriori_report(records[level]).ratio for records in headline_batches)
            for level, n in enumerate(levels)
        }
        assert all(worst[fine] <= 2.0 * worst[coarse] for coarse, fine in zip(levels, levels[1:], strict=False))
