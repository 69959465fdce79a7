"""Report files: errors.csv, generic CSV tables, report.json and provenance.txt."""

import csv
from collections.abc import Iterable, Sequence
from pathlib import Path
from typing import Any

from pendulum import DateTime

from besov_rates.core.json import report_dumps
from besov_rates.domain.types.report import NormSample, Provenance

ERRORS_HEADER = ("seed", "n", "t", "theta", "norm_value")


def _cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_table_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence[Any]], provenance: Provenance) -> Path:
    with path.open("w", newline="", encoding="utf-8") as stream:
        stream.write(f"# {provenance.header()}\n")
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow(header)
        writer.writerows([_cell(value) for value in row] for row in rows)
    return path


def write_errors_csv(path: Path, samples: Iterable[NormSample], provenance: Provenance) -> Path:
    rows = ((sample.seed, sample.n, sample.t, sample.theta, sample.value) for sample in samples)
    return write_table_csv(path, ERRORS_HEADER, rows, provenance)


def write_report_json(path: Path, payload: Any, provenance: Provenance) -> Path:
    """Write the report with a provenance block; key order and bytes depend only on the content."""
    document = payload.model_dump(mode="json") if hasattr(payload, "model_dump") else dict(payload)
    document["provenance"] = provenance.model_dump(mode="json")
    path.write_bytes(report_dumps(document))
    return path


def write_provenance(path: Path, provenance: Provenance, generated_at: DateTime) -> Path:
    lines = [
        provenance.header(),
        f"version: {provenance.version}",
        f"mode: {provenance.mode}",
        f"config_hash: {provenance.config_hash}",
        f"seeds: {'none' if provenance.seeds is None else f'{provenance.seeds[0]}..{provenance.seeds[1]}'}",
        f"generated_at: {generated_at.to_iso8601_string()}",
    ]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path
