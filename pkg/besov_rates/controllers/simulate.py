"""Coupled simulation of the nonlinear scheme across all levels."""

from besov_rates.artifacts.writer import ArtifactWriter
from besov_rates.controllers.base import Controller, SeedOutcome, SeedRunner, controller
from besov_rates.core.errors import EXIT_OK
from besov_rates.core.exceptions import BlowUpError, OmegaViolation
from besov_rates.core.logging import logger
from besov_rates.domain.error_lab import build_error_report
from besov_rates.domain.types.report import ErrorReport
from besov_rates.domain.types.scheme import OmegaPolicy
from besov_rates.settings import ExperimentConfig, Mode


@controller(Mode.SIMULATE)
class Simulate(Controller):
    def __init__(self, settings: ExperimentConfig, artifacts: ArtifactWriter, runner: SeedRunner):
        super().__init__(settings, artifacts)
        self.runner = runner

    def exclusions(self, outcomes: list[SeedOutcome]) -> dict[int, str]:
        """Apply the blow-up rule and the Ω_n policy; returns the seeds left out of the statistics."""
        excluded: dict[int, str] = {}
        policy = self.settings.scheme.omega_policy
        for outcome in outcomes:
            if (blown := outcome.blow_up) is not None:
                n, event = blown
                if self.settings.scheme.threshold_factor is None:
                    raise BlowUpError(event.t, event.x, event.value)
                logger.warning(f"Seed {outcome.seed} blew up at n={n}, t={event.t!r} despite truncation")
                excluded[outcome.seed] = f"blow-up at n={n}, t={event.t!r}"
                continue
            if outcome.stopped_levels:
                logger.warning(f"Seed {outcome.seed} hit the truncation threshold at n={outcome.stopped_levels}")
            for n in outcome.omega_failures:
                match policy:
                    case OmegaPolicy.ABORT:
                        raise OmegaViolation(outcome.seed, n)
                    case OmegaPolicy.EXCLUDE:
                        logger.warning(f"Excluding seed {outcome.seed}: Ω_n fails at n={n}")
                        excluded.setdefault(outcome.seed, f"omega_n fails at n={n}")
                    case OmegaPolicy.RECORD:
                        logger.warning(f"Ω_n fails for seed {outcome.seed} at n={n}")
        return excluded

    def simulate(self) -> ErrorReport:
        outcomes = self.runner.run()
        excluded = self.exclusions(outcomes)

        self.artifacts.snapshots(record for outcome in outcomes for record in outcome.records)
        samples = [sample for outcome in outcomes for sample in outcome.samples]
        self.artifacts.errors(samples)

        report = build_error_report(
            samples,
            levels=self.settings.levels,
            reference_n=self.settings.reference_n,
            seeds=self.settings.seed_list,
            excluded=excluded,
            apriori=[report for outcome in outcomes for report in outcome.apriori],
        )
        self.artifacts.report(report)
        self.artifacts.provenance_file()
        return report

    def run(self) -> int:
        self.simulate()
        return EXIT_OK
