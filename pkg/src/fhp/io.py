"""Text formats: ``fhp v1`` point sets and JSON reports."""
from __future__ import annotations

import hashlib
import json
import re
from pathlib import Path

import numpy as np

from .core import PointSet
from .errors import InputError

_HEADER = re.compile(r"^fhp v1 n=(\d+) d=(\d+) scale=(\S+)$")


def fmt_float(x: float) -> str:
    return "%.17g" % float(x)


def format_pointset(ps: PointSet) -> str:
    lines = [f"fhp v1 n={ps.n} d={ps.d} scale={fmt_float(ps.scale)}"]
    lines.extend(" ".join(fmt_float(v) for v in row) for row in ps.points)
    return "\n".join(lines) + "\n"


def parse_pointset(text: str) -> PointSet:
    lines = [ln.strip() for ln in text.strip().splitlines()]
    if not lines:
        raise InputError("empty point-set file")
    m = _HEADER.match(lines[0])
    if m is None:
        raise InputError(f"bad header line: {lines[0]!r}")
    n, d = int(m.group(1)), int(m.group(2))
    try:
        scale = float(m.group(3))
        rows = [[float(tok) for tok in ln.split()] for ln in lines[1:] if ln]
    except ValueError as exc:
        raise InputError(f"unparseable number: {exc}") from None
    if len(rows) != n:
        raise InputError(f"header says n={n} but found {len(rows)} rows")
    if any(len(r) != d for r in rows):
        raise InputError(f"every row must have d={d} coordinates")
    return PointSet(np.array(rows, dtype=float).reshape(n, d), scale)


def write_pointset(ps: PointSet, path) -> None:
    Path(path).write_text(format_pointset(ps))


def read_pointset(path) -> PointSet:
    try:
        return parse_pointset(Path(path).read_text())
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from None


def file_digest(path) -> str:
    try:
        return hashlib.sha256(Path(path).read_bytes()).hexdigest()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from None


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    return obj


def dumps_report(report: dict) -> str:
    """Stable serialization: sorted keys, shortest round-trip float repr."""
    return json.dumps(_plain(report), sort_keys=True, indent=2, allow_nan=False) + "\n"


def loads_report(text: str) -> dict:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"malformed report: {exc}") from None
    if not isinstance(data, dict) or "kind" not in data:
        raise InputError("report must be a JSON object with a 'kind' field")
    return data
