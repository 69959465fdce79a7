"""Runtime property suite."""

from besov_rates.controllers.base import Controller, controller
from besov_rates.core.errors import EXIT_OK, EXIT_VERIFICATION_FAILED
from besov_rates.core.logging import logger
from besov_rates.domain.verification import run_verification
from besov_rates.settings import Mode


@controller(Mode.VERIFY)
class Verify(Controller):
    def run(self) -> int:
        verify = self.settings.verify
        results = run_verification(
            max_n=verify.max_n,
            samples=verify.samples,
            bernstein_samples=verify.bernstein_samples,
            seed=self.settings.base_seed,
            eps0=self.settings.besov.eps0,
            c=self.settings.scheme.c,
        )
        failed = [result.name for result in results if not result.passed]
        self.artifacts.table(
            "checks.csv",
            ("name", "passed", "detail"),
            [(result.name, result.passed, result.detail) for result in results],
        )
        self.artifacts.report({"schema": 1, "passed": not failed, "failed": failed, "checks": results})
        self.artifacts.provenance_file()
        if failed:
            logger.warning(f"{len(failed)} of {len(results)} check(s) failed: {', '.join(failed)}")
            return EXIT_VERIFICATION_FAILED
        logger.info(f"All {len(results)} checks passed")
        return EXIT_OK
