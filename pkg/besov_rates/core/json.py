"""Configuration for JSON serialization via orjson."""

from pathlib import Path
from typing import Any

import numpy as np
import orjson
from pendulum import DateTime
from pydantic import BaseModel

REPORT_OPTIONS = orjson.OPT_INDENT_2 | orjson.OPT_SORT_KEYS | orjson.OPT_SERIALIZE_NUMPY


def default(obj: Any) -> Any:  # pyright: ignore[reportExplicitAny, reportAny]
    """Set default serialize function for JSON serialization via orjson.

    Args:
        obj: The object to serialize.

    Returns:
        The serialized object.

    """
    if isinstance(obj, BaseModel):
        return obj.model_dump(mode="json")
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, DateTime):
        return obj.isoformat()
    if isinstance(obj, Path):
        return obj.as_posix()
    if isinstance(obj, Exception):
        return str(obj)

    raise TypeError


def dumps(obj: Any) -> str:  # pyright: ignore[reportExplicitAny, reportAny]
    """Reload dumps."""
    return orjson.dumps(obj, default=default).decode("utf8")


def pretty_dumps(obj: Any) -> str:  # pyright: ignore[reportExplicitAny, reportAny]
    """Reload pretty dumps."""
    return orjson.dumps(obj, default=default, option=orjson.OPT_INDENT_2).decode("utf8")


def report_dumps(obj: Any) -> bytes:  # pyright: ignore[reportExplicitAny, reportAny]
    """Serialize a report with sorted keys, so equal inputs give equal bytes."""
    return orjson.dumps(obj, default=default, option=REPORT_OPTIONS) + b"\n"


def loads(obj: str | bytes) -> Any:  # pyright: ignore[reportExplicitAny]
    """Reload loads."""
    return orjson.loads(obj)  # pyright: ignore[reportAny]
