"""Exact second moments of the linear error and the rates they imply."""

import numpy as np

from besov_rates.controllers.base import Controller, controller
from besov_rates.core.errors import EXIT_OK, EXIT_VERIFICATION_FAILED
from besov_rates.core.logging import logger
from besov_rates.core.utils import dyadic_chain
from besov_rates.domain.error_lab import (
    exact_level_mode_variance,
    exact_mode_variance,
    kolmogorov_scan,
    lower_bound_scan,
    mode_variances,
    monte_carlo_mode_variance,
    rate_fit,
    uniform_mode_bound,
)
from besov_rates.domain.types.report import KolmogorovSeries, MonteCarloCheck, OracleReport
from besov_rates.settings import Mode

MODES_HEADER = ("n", "ell", "t", "variance", "scaled_variance")
KOLMOGOROV_HEADER = ("alpha", "q", "n", "bound")
# a Monte Carlo mean further than this many standard errors from the oracle fails the cross-check
MC_SIGMAS = 4.0


@controller(Mode.LINEAR_ORACLE)
class LinearOracle(Controller):
    def oracle_levels(self) -> list[int]:
        return sorted(dyadic_chain(self.settings.levels[0], self.settings.reference_n))

    def modes(self, levels: list[int]) -> list[tuple[int, int, float, float, float]]:
        t, c = self.settings.oracle.time, self.settings.scheme.c
        rows = []
        for n in levels:
            for ell, value in zip(range(-n, n), mode_variances(n, t, c), strict=True):
                rows.append((n, ell, t, float(value), float(n**2 * value)))
        return rows

    def kolmogorov(self, levels: list[int]) -> list[KolmogorovSeries]:
        oracle, besov = self.settings.oracle, self.settings.besov
        series = []
        for params in besov.kolmogorov:
            points = kolmogorov_scan(levels, oracle.time, params.alpha, params.q, besov.eps0, self.settings.scheme.c)
            fit = rate_fit(points) if len(points) >= 3 else None
            series.append(
                KolmogorovSeries(
                    alpha=params.alpha,
                    q=params.q,
                    points=points,
                    fit=fit,
                    predicted_slope=-(0.5 - params.alpha - 1.0 / params.q),
                )
            )
            if fit is not None:
                logger.info(f"Kolmogorov alpha={params.alpha:g}, q={params.q:g}: slope {fit.slope:.3f}")
        return series

    def monte_carlo(self) -> MonteCarloCheck | None:
        oracle, c = self.settings.oracle, self.settings.scheme.c
        if oracle.mc_paths == 0:
            return None
        seeds = list(range(self.settings.base_seed, self.settings.base_seed + oracle.mc_paths))
        logger.info(f"Monte Carlo cross-check: n={oracle.mc_level} against N={oracle.mc_reference}, {len(seeds)} paths")
        estimate = monte_carlo_mode_variance(
            oracle.mc_level, oracle.mc_reference, oracle.mc_ell, oracle.mc_time, seeds, c, batch=oracle.mc_batch
        )
        level_exact = exact_level_mode_variance(oracle.mc_level, oracle.mc_reference, oracle.mc_ell, oracle.mc_time, c)
        z_score = estimate.z_score(level_exact)
        if not np.isfinite(z_score) or z_score > MC_SIGMAS:
            logger.warning(f"Monte Carlo mean {estimate.mean!r} is {z_score:.2f} standard errors from {level_exact!r}")
        return MonteCarloCheck(
            estimate=estimate,
            level_exact=level_exact,
            continuum_exact=exact_mode_variance(oracle.mc_level, oracle.mc_ell, oracle.mc_time, c).value,
            z_score=z_score,
            passed=bool(z_score <= MC_SIGMAS),
        )

    def run(self) -> int:
        oracle, c = self.settings.oracle, self.settings.scheme.c
        levels = self.oracle_levels()
        logger.info(f"Linear oracle at t={oracle.time!r} for n={levels}")

        self.artifacts.table("modes.csv", MODES_HEADER, self.modes(levels))
        series = self.kolmogorov(levels)
        self.artifacts.table(
            "kolmogorov.csv",
            KOLMOGOROV_HEADER,
            [(entry.alpha, entry.q, n, bound) for entry in series for n, bound in entry.points],
        )

        report = OracleReport(
            time=oracle.time,
            levels=levels,
            uniform_mode_bound={n: uniform_mode_bound(n, oracle.time, c) for n in levels},
            kolmogorov=series,
            lower_bound_time=oracle.lower_bound_time,
            lower_bound=lower_bound_scan(levels, oracle.lower_bound_time, c),
            monte_carlo=self.monte_carlo(),
        )
        self.artifacts.report(report)
        self.artifacts.plot(
            "kolmogorov.svg",
            {entry.label: entry.points for entry in series},
            {entry.label: entry.fit for entry in series},
            title=f"Kolmogorov bound of the linear error at t={oracle.time:g}",
            y_label="bound",
        )
        self.artifacts.provenance_file()

        if report.monte_carlo is not None and not report.monte_carlo.passed:
            return EXIT_VERIFICATION_FAILED
        return EXIT_OK
