"""
CSV and JSON writers for run outputs.

CSV files are RFC-4180 with CRLF line endings and floats written by repr,
so a rerun with the same config reproduces them byte for byte. Every row
carries the config digest and the clustering tolerance; JSON documents
carry the same values in a ``meta`` block.
"""
from __future__ import annotations

import csv
import hashlib
import json
import logging
import math
from pathlib import Path
from typing import Any, Dict, Iterable, List, Mapping, Sequence, Union

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


def jsonable(value: Any) -> Any:
    """Recursively replace tuples with lists and infinities with strings."""
    if isinstance(value, float):
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        if math.isnan(value):
            return "nan"
        return value
    if isinstance(value, Mapping):
        return {str(k): jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    return value


def canonical_json(payload: Any) -> str:
    return json.dumps(jsonable(payload), sort_keys=True, separators=(",", ":"), allow_nan=False)


def config_digest(payload: Mapping[str, Any]) -> str:
    return hashlib.sha256(canonical_json(payload).encode("utf-8")).hexdigest()[:16]


def file_digest(path: PathLike) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(65536), b""):
            h.update(chunk)
    return h.hexdigest()


def write_csv(path: PathLike, header: Sequence[str], rows: Iterable[Sequence[Any]], digest: str, tol: float) -> Path:
    """Write rows with trailing config_digest and tol columns."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    count = 0
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\r\n")
        writer.writerow(list(header) + ["config_digest", "tol"])
        for row in rows:
            writer.writerow([_cell(v) for v in row] + [digest, repr(float(tol))])
            count += 1
    logger.info("wrote %d rows to %s", count, path)
    return path


def _cell(value: Any) -> str:
    if isinstance(value, float):
        return repr(value)
    if value is None:
        return ""
    return str(value)


def write_json(path: PathLike, payload: Mapping[str, Any]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        json.dump(jsonable(payload), f, sort_keys=True, indent=2, allow_nan=False)
        f.write("\n")
    logger.info("wrote %s", path)
    return path


def load_json(path: PathLike) -> Dict[str, Any]:
    with open(path, "r", encoding="utf-8") as f:
        return json.load(f)


def read_csv(path: PathLike) -> List[Dict[str, str]]:
    with open(path, "r", newline="", encoding="utf-8") as f:
        return list(csv.DictReader(f))


__all__ = [
    "canonical_json",
    "config_digest",
    "file_digest",
    "jsonable",
    "load_json",
    "read_csv",
    "write_csv",
    "write_json",
]
