"""Saturation of the mode-1 error at rate one."""

from besov_rates.controllers.base import Controller, controller
from besov_rates.core.errors import EXIT_OK
from besov_rates.core.logging import logger
from besov_rates.core.utils import dyadic_chain
from besov_rates.domain.error_lab import exact_mode_variance, lower_bound_scan, rate_fit
from besov_rates.domain.types.report import LowerBoundReport
from besov_rates.settings import Mode


@controller(Mode.LOWER_BOUND)
class LowerBound(Controller):
    def run(self) -> int:
        t, c = self.settings.oracle.lower_bound_time, self.settings.scheme.c
        levels = sorted(dyadic_chain(self.settings.levels[0], self.settings.reference_n))
        points = lower_bound_scan(levels, t, c)
        values = [value for _, value in points]
        low, high = min(values), max(values)
        report = LowerBoundReport(
            time=t,
            points=points,
            max_min_ratio=high / low if low > 0 else float("inf"),
            fit=rate_fit([(n, exact_mode_variance(n, 1, t, c).value) for n in levels]) if len(levels) >= 3 else None,
        )
        logger.info(f"n^2 a_1^2 at t={t!r} ranges over [{low!r}, {high!r}]")

        self.artifacts.table("lower_bound.csv", ("n", "t", "scaled_variance"), [(n, t, value) for n, value in points])
        self.artifacts.report(report)
        self.artifacts.plot(
            "lower_bound.svg",
            {"n^2 a_1^2": points},
            {"n^2 a_1^2": None},
            title=f"Scaled mode-1 error variance at t={t:g}",
            y_label="n^2 a_1^2",
        )
        self.artifacts.provenance_file()
        return EXIT_OK
