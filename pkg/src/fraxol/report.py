"""Deterministic JSON and CSV output.

Floats are rounded to 12 significant digits and keys keep their insertion
order, so identical results give byte-identical files.
"""

from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path
from typing import Iterable, Optional, Sequence

import numpy as np

SIG_DIGITS = 12


def round_sig(x: float) -> float:
    return float(f"{x:.{SIG_DIGITS}g}")


def canonical(obj):
    """Recursively convert to JSON-ready data with rounded floats.

    Non-finite floats become None in JSON output.
    """
    if isinstance(obj, dict):
        return {str(k): canonical(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [canonical(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [canonical(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return round_sig(x) if math.isfinite(x) else None
    return obj


def format_value(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x)).lower()
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return f"{x:.{SIG_DIGITS}g}" if math.isfinite(x) else "nan"
    return str(x)


def json_text(obj) -> str:
    return json.dumps(canonical(obj), indent=2, ensure_ascii=False) + "\n"


def csv_text(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_value(v) for v in row])
    return buf.getvalue()


def _write(text: str, path: Path) -> Path:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")
    except OSError as exc:
        raise OSError(f"cannot write report {path}: {exc.strerror or exc}") from exc
    return path


def emit_report(result, fmt: str, path, header: Optional[Sequence[str]] = None) -> Path:
    """Write ``result`` as JSON (any mapping) or CSV (``header`` plus rows)."""
    if fmt == "json":
        return _write(json_text(result), path)
    if fmt == "csv":
        if header is None:
            raise ValueError("CSV output needs a header")
        return _write(csv_text(header, result), path)
    raise ValueError(f"unknown report format {fmt!r}")


def node_rows(nodes: np.ndarray, *columns: np.ndarray) -> list[list]:
    return [[k, *map(float, x), *(float(c[k]) for c in columns)] for k, x in enumerate(nodes)]


def node_header(dim: int, names: Sequence[str]) -> list[str]:
    return ["index", *(f"x{k}" for k in range(1, dim + 1)), *names]
