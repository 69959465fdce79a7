"""Application configuration and the ``besov-rates`` entry point."""

import argparse
import os
import sys
from collections.abc import Sequence
from typing import Any

from rodi import Container

from besov_rates.controllers import CONTROLLERS, Controller
from besov_rates.core.errors import EXIT_OK, handle_error
from besov_rates.core.json import pretty_dumps
from besov_rates.core.logging import config_logger, logger
from besov_rates.core.services import configure_services
from besov_rates.settings import ExperimentConfig, Mode, load_settings

WORKERS_ENV = "BESOV_RATES_WORKERS"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="besov-rates",
        description="Strong convergence experiments for the explicit scheme of 1+1D stochastic Allen-Cahn.",
    )
    parser.add_argument("mode", choices=[mode.value for mode in Mode], help="experiment to run")
    parser.add_argument("--config", help="YAML configuration file")
    parser.add_argument("--seeds", type=int, help="number of seeds, overrides the file")
    parser.add_argument("--workers", type=int, help=f"worker processes, falls back to {WORKERS_ENV}")
    parser.add_argument("--out", help="output directory, overrides the file")
    return parser


def apply_overrides(settings: ExperimentConfig, args: argparse.Namespace) -> ExperimentConfig:
    """Revalidate the settings with the command-line values on top, so flags obey the same invariants."""
    overrides: dict[str, Any] = {"mode": args.mode}
    if args.seeds is not None:
        overrides["seeds"] = args.seeds
    if args.workers is not None:
        overrides["workers"] = args.workers
    elif os.environ.get(WORKERS_ENV):
        overrides["workers"] = os.environ[WORKERS_ENV]
    if args.out is not None:
        overrides["output_dir"] = args.out
    return ExperimentConfig.model_validate({**settings.model_dump(), **overrides})


def configure_application(services: Container, settings: ExperimentConfig) -> Controller:
    config_logger(settings)
    logger.info(f"Mode {settings.mode.value}, config {settings.config_hash()}, output in {settings.output_dir}")
    provider = services.build_provider()
    return provider.get(CONTROLLERS[settings.mode])


def run(argv: Sequence[str] | None = None) -> int:
    """Run one experiment and return the exit code.

    Errors are reported as a JSON document on stderr; the exit code identifies the failure class.
    """
    args = build_parser().parse_args(argv)
    try:
        settings = apply_overrides(load_settings(args.config), args)
        controller = configure_application(*configure_services(settings))
        exit_code = controller.run()
    except Exception as exc:
        exit_code, document = handle_error(exc)
        sys.stderr.write(pretty_dumps(document) + "\n")
        return exit_code
    if exit_code == EXIT_OK:
        logger.info("Done")
    return exit_code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
