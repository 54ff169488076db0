"""Lossless CSV/JSON writers."""
from __future__ import annotations

import json
import math
from pathlib import Path


def fmt(value) -> str:
    if isinstance(value, (bool,)):
        return str(int(value))
    if isinstance(value, int):
        return str(value)
    if isinstance(value, str):
        return value
    value = float(value)
    if math.isnan(value):
        return "nan"
    # 17 significant digits round-trip any double
    return format(value, ".16e")


def write_csv(path, header, rows) -> Path:
    path = Path(path)
    lines = [",".join(header)]
    lines += [",".join(fmt(v) for v in row) for row in rows]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def write_json(path, payload) -> Path:
    path = Path(path)
    path.write_text(json.dumps(payload, indent=2, sort_keys=True, allow_nan=True) + "\n",
                    encoding="utf-8")
    return path


def complex_matrix(m) -> dict:
    return {"real": [[float(v.real) for v in row] for row in m],
            "imag": [[float(v.imag) for v in row] for row in m]}
