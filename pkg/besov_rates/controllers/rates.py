"""Convergence rates of the nonlinear scheme, one fit per norm."""

from besov_rates.controllers.base import controller
from besov_rates.controllers.simulate import Simulate
from besov_rates.core.errors import EXIT_OK
from besov_rates.core.logging import logger
from besov_rates.settings import Mode


@controller(Mode.RATES)
class Rates(Simulate):
    def run(self) -> int:
        report = self.simulate()
        series = {
            label: [(summary.n, summary.sup_median) for summary in summaries]
            for label, summaries in report.norms.items()
        }
        for label, fit in report.fits.items():
            if fit is not None:
                low, high = fit.slope_ci
                logger.info(f"theta={label}: slope {fit.slope:.3f} (95% CI {low:.3f}..{high:.3f})")
        self.artifacts.plot(
            "rates.svg",
            series,
            report.fits,
            title=f"Median sup-in-time error against N={report.reference_n}",
            y_label="error",
        )
        return EXIT_OK
