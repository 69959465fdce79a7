from collections.abc import Iterable, Mapping, Sequence
from pathlib import Path
from typing import Any

import pendulum

from besov_rates import __version__
from besov_rates.artifacts.plots import loglog_svg
from besov_rates.artifacts.reports import write_errors_csv, write_provenance, write_report_json, write_table_csv
from besov_rates.artifacts.snapshots import write_snapshot_binary, write_snapshot_csv
from besov_rates.core.logging import logger
from besov_rates.core.services import add_service
from besov_rates.domain.types.report import NormSample, Provenance, RateFit
from besov_rates.domain.types.scheme import PathRecord
from besov_rates.settings import ExperimentConfig, Mode


@add_service(scope="singleton")
class ArtifactWriter:
    """Writes every output of a run under ``output_dir``, stamped with the run's provenance."""

    def __init__(self, settings: ExperimentConfig):
        self.settings = settings
        self.output_dir = Path(settings.output_dir)

    def provenance(self, *, with_seeds: bool | None = None) -> Provenance:
        if with_seeds is None:
            with_seeds = self.settings.mode in (Mode.SIMULATE, Mode.RATES)
        seeds = self.settings.seed_list
        return Provenance(
            version=__version__,
            mode=self.settings.mode.value,
            config_hash=self.settings.config_hash(),
            seeds=(seeds[0], seeds[-1]) if with_seeds else None,
        )

    def _path(self, name: str) -> Path:
        self.output_dir.mkdir(parents=True, exist_ok=True)
        return self.output_dir / name

    def _written(self, path: Path) -> Path:
        logger.info(f"Wrote {path}")
        return path

    def report(self, payload: Any) -> Path:
        return self._written(write_report_json(self._path("report.json"), payload, self.provenance()))

    def errors(self, samples: Iterable[NormSample]) -> Path:
        return self._written(write_errors_csv(self._path("errors.csv"), samples, self.provenance()))

    def table(self, name: str, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> Path:
        return self._written(write_table_csv(self._path(name), header, rows, self.provenance()))

    def snapshots(self, records: Iterable[PathRecord]) -> list[Path]:
        directory = self._path("snapshots")
        directory.mkdir(exist_ok=True)
        header = self.provenance().header()
        written = []
        for record in records:
            stem = f"seed{record.seed}_n{record.grid.n}"
            written.append(write_snapshot_csv(directory / f"{stem}.csv", record, header))
            written.append(write_snapshot_binary(directory / f"{stem}.bsrt", record))
        logger.info(f"Wrote {len(written)} snapshot file(s) to {directory}")
        return written

    def plot(
        self,
        name: str,
        series: Mapping[str, Sequence[tuple[int, float]]],
        fits: Mapping[str, RateFit | None],
        *,
        title: str,
        y_label: str,
    ) -> Path:
        svg = loglog_svg(series, fits, title=title, y_label=y_label, generated_at=pendulum.now("UTC"))
        path = self._path(name)
        path.write_text(svg, encoding="utf-8")
        return self._written(path)

    def provenance_file(self) -> Path:
        return self._written(write_provenance(self._path("provenance.txt"), self.provenance(), pendulum.now("UTC")))
