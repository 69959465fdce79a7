"""Path snapshots on disk: a CSV listing and the compact little-endian "BSRT" dump.

BSRT layout: a 16-byte header (magic ``BSRT``, then version, n and checkpoint count as u32), followed
by one record per checkpoint holding its time and the 2n values, all as f64.
"""

import csv
from pathlib import Path
from typing import NamedTuple

import numpy as np
from essentials.exceptions import InvalidArgument

from besov_rates.domain.types.scheme import PathRecord

MAGIC = b"BSRT"
FORMAT_VERSION = 1

HEADER = np.dtype([("magic", "S4"), ("version", "<u4"), ("n", "<u4"), ("count", "<u4")])


def checkpoint_dtype(n: int) -> np.dtype:
    return np.dtype([("t", "<f8"), ("values", "<f8", (2 * n,))])


class SnapshotDump(NamedTuple):
    n: int
    times: np.ndarray
    values: np.ndarray


def write_snapshot_csv(path: Path, record: PathRecord, provenance: str) -> Path:
    points = record.grid.points
    with path.open("w", newline="", encoding="utf-8") as stream:
        stream.write(f"# {provenance}\n")
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow(["t", "x", "value"])
        for step in sorted(record.checkpoints):
            t = record.grid.time_of(step)
            values = record.checkpoints[step].values
            writer.writerows((repr(t), repr(float(x)), repr(float(v))) for x, v in zip(points, values, strict=True))
    return path


def write_snapshot_binary(path: Path, record: PathRecord) -> Path:
    steps = sorted(record.checkpoints)
    header = np.array([(MAGIC, FORMAT_VERSION, record.grid.n, len(steps))], dtype=HEADER)
    body = np.empty(len(steps), dtype=checkpoint_dtype(record.grid.n))
    for i, step in enumerate(steps):
        body[i] = (record.grid.time_of(step), record.checkpoints[step].values.real)
    path.write_bytes(header.tobytes() + body.tobytes())
    return path


def read_snapshot_binary(path: Path) -> SnapshotDump:
    payload = path.read_bytes()
    if len(payload) < HEADER.itemsize:
        raise InvalidArgument(f"{path} is too short for a snapshot dump")
    header = np.frombuffer(payload, dtype=HEADER, count=1)[0]
    if header["magic"] != MAGIC:
        raise InvalidArgument(f"{path} is not a snapshot dump (magic {header['magic']!r})")
    if header["version"] != FORMAT_VERSION:
        raise InvalidArgument(f"Unsupported snapshot dump version {header['version']}")

    n, count = int(header["n"]), int(header["count"])
    dtype = checkpoint_dtype(n)
    if len(payload) != HEADER.itemsize + count * dtype.itemsize:
        raise InvalidArgument(f"{path} holds {len(payload)} bytes, expected {HEADER.itemsize + count * dtype.itemsize}")
    body = np.frombuffer(payload, dtype=dtype, count=count, offset=HEADER.itemsize)
    return SnapshotDump(n=n, times=body["t"].copy(), values=body["values"].copy())
