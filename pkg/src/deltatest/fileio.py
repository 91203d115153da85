"""Reading observations and writing versioned JSON reports / plot CSVs."""
from __future__ import annotations

import csv
import hashlib
import io as _io
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .errors import ParseError

SCHEMA_VERSION = 1
PLOT_COLUMNS = ("x", "value", "series")


def _read_text(source) -> tuple[str, str]:
    if source is None or str(source) == "-":
        return sys.stdin.read(), "<stdin>"
    path = Path(source)
    return path.read_text(encoding="utf-8"), str(path)


def _guess_format(name: str) -> str:
    return "jsonl" if name.endswith((".jsonl", ".ndjson", ".json")) else "csv"


def _finite(text: str, line: int) -> float:
    try:
        v = float(text)
    except ValueError:
        raise ParseError(f"not a number: {text!r}", line) from None
    if not math.isfinite(v):
        raise ParseError(f"non-finite value {text!r}", line)
    return v


def parse_csv(text: str) -> np.ndarray:
    values = []
    first = True
    for lineno, row in enumerate(csv.reader(_io.StringIO(text)), start=1):
        if not row or not row[0].strip():
            continue
        cell = row[0].strip()
        if first:
            first = False
            try:
                float(cell)
            except ValueError:
                continue  # header
        values.append(_finite(cell, lineno))
    if not values:
        raise ParseError("no observations in input")
    return np.asarray(values)


def parse_jsonl(text: str) -> np.ndarray:
    values = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON ({exc.msg})", lineno) from None
        if not isinstance(obj, dict) or "value" not in obj:
            raise ParseError('expected an object with a "value" field', lineno)
        v = obj["value"]
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise ParseError(f'"value" is not numeric: {v!r}', lineno)
        if not math.isfinite(v):
            raise ParseError("non-finite value", lineno)
        values.append(float(v))
    if not values:
        raise ParseError("no observations in input")
    return np.asarray(values)


def ingest(source=None, fmt: Optional[str] = None) -> np.ndarray:
    """Read observations from a path (or stdin for ``None``/``"-"``).

    CSV: first column, one value per row, a non-numeric first row is
    treated as a header. JSONL: one object per line with a numeric
    ``value``. Non-finite entries are rejected with their line number.
    """
    text, name = _read_text(source)
    fmt = fmt or _guess_format(name)
    if fmt == "csv":
        return parse_csv(text)
    if fmt == "jsonl":
        return parse_jsonl(text)
    raise ValueError(f"unknown format {fmt!r}")


def file_digest(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return "sha256:" + h.hexdigest()


def array_digest(values) -> str:
    return "sha256:" + hashlib.sha256(np.ascontiguousarray(values, np.float64).tobytes()).hexdigest()


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    if hasattr(obj, "to_dict"):
        return _jsonable(obj.to_dict())
    return obj


@dataclass
class ReportDocument:
    command: str
    config: dict
    results: dict
    seeds: dict = field(default_factory=dict)
    input_digests: dict = field(default_factory=dict)
    runtime_seconds: float = 0.0
    tool: str = "deltatest"
    version: str = ""
    schema_version: int = SCHEMA_VERSION

    def __post_init__(self):
        if not self.version:
            from . import __version__
            self.version = __version__

    def to_dict(self) -> dict:
        return _jsonable({
            "schema_version": self.schema_version,
            "tool": self.tool,
            "version": self.version,
            "command": self.command,
            "input_digests": self.input_digests,
            "config": self.config,
            "seeds": self.seeds,
            "results": self.results,
            "runtime_seconds": self.runtime_seconds,
        })

    def to_json(self, indent: Optional[int] = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent, sort_keys=False)

    @classmethod
    def from_dict(cls, d: dict) -> "ReportDocument":
        return cls(command=d["command"], config=d["config"], results=d["results"],
                   seeds=d.get("seeds", {}), input_digests=d.get("input_digests", {}),
                   runtime_seconds=d.get("runtime_seconds", 0.0), tool=d.get("tool", "deltatest"),
                   version=d.get("version", ""), schema_version=d.get("schema_version", SCHEMA_VERSION))

    @classmethod
    def from_json(cls, text: str) -> "ReportDocument":
        return cls.from_dict(json.loads(text))


def write_plot_csv(rows, path) -> None:
    """Tidy (x, value, series) rows, UTF-8, LF line endings."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(PLOT_COLUMNS)
        for x, value, series in rows:
            w.writerow([repr(float(x)), repr(float(value)), series])
