"""CSV signals and JSON reports with bit-exact, deterministic serialization."""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np

from .spectral import GridSignal

__all__ = ["write_signal", "read_signal", "write_report", "read_report", "to_jsonable"]

SPACING_RTOL = 1e-9


def write_signal(signal: GridSignal, path) -> None:
    """Write ``x,y`` rows using the shortest round-trip float representation."""
    path = Path(path)
    try:
        with path.open("w", newline="") as fh:
            fh.write("x,y\n")
            for x, y in zip(signal.x, signal.samples):
                fh.write(f"{float(x)!r},{float(y)!r}\n")
    except OSError as exc:
        raise OSError(f"cannot write signal to {path}: {exc.strerror or exc}") from exc


def read_signal(path) -> GridSignal:
    """Read an ``x,y`` CSV; the ``x`` column must be uniformly spaced."""
    path = Path(path)
    try:
        with path.open(newline="") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise OSError(f"cannot read signal from {path}: {exc.strerror or exc}") from exc
    if not rows or [c.strip() for c in rows[0]] != ["x", "y"]:
        raise ValueError(f"{path}: expected header 'x,y'")
    try:
        data = np.array([[float(c) for c in r] for r in rows[1:] if r], dtype=float)
    except ValueError as exc:
        raise ValueError(f"{path}: {exc}") from exc
    if data.ndim != 2 or data.shape[1] != 2 or data.shape[0] < 2:
        raise ValueError(f"{path}: need at least two rows of two columns")
    x, y = data[:, 0], data[:, 1]
    steps = np.diff(x)
    dx = (x[-1] - x[0]) / (x.size - 1)
    if not dx > 0 or np.max(np.abs(steps - dx)) > SPACING_RTOL * dx:
        raise ValueError(f"{path}: x column is not uniformly spaced")
    try:
        return GridSignal(y, dx, x[0])
    except ValueError as exc:
        raise ValueError(f"{path}: {exc}") from exc


def to_jsonable(obj, where="report"):
    """Convert numpy scalars and containers; infinities become ``"inf"``/``"-inf"``.

    NaN is rejected since a report must not contain undefined values.
    """
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v, f"{where}.{k}") for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v, f"{where}[{i}]") for i, v in enumerate(obj)]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist(), where)
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        if math.isnan(v):
            raise ValueError(f"{where} is NaN; reports must not contain NaN")
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return v
    if obj is None or isinstance(obj, str):
        return obj
    raise TypeError(f"{where}: cannot serialize {type(obj).__name__}")


def write_report(report: dict, path) -> None:
    """Write ``report`` as JSON with sorted keys; repeated writes are identical."""
    path = Path(path)
    text = json.dumps(to_jsonable(report), sort_keys=True, indent=2, allow_nan=False) + "\n"
    try:
        path.write_text(text)
    except OSError as exc:
        raise OSError(f"cannot write report to {path}: {exc.strerror or exc}") from exc


def _decode(obj):
    if isinstance(obj, dict):
        return {k: _decode(v) for k, v in obj.items()}
    if isinstance(obj, list):
        return [_decode(v) for v in obj]
    if obj == "inf":
        return math.inf
    if obj == "-inf":
        return -math.inf
    return obj


def read_report(path) -> dict:
    path = Path(path)
    try:
        return _decode(json.loads(path.read_text()))
    except OSError as exc:
        raise OSError(f"cannot read report from {path}: {exc.strerror or exc}") from exc
