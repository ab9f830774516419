"""CSV and JSON writers for experiment artifacts, plus matching readers."""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path
from typing import Iterable, Sequence

SWEEP_HEADER = ("epsilon", "theta", "phi", "delta_d", "delta_d_n", "diff")
EIGSCAN_HEADER = ("epsilon", "copies", "mode", "zeta")
APPENDIXB_HEADER = ("r1", "r2", "theta", "phi", "d_before", "d_after")


def format_value(x) -> str:
    if isinstance(x, str):
        return x
    if isinstance(x, (int,)) and not isinstance(x, bool):
        return str(x)
    x = float(x)
    if math.isnan(x):
        return "nan"
    return format(x, ".12g")


def write_csv(path, header: Sequence[str], rows: Iterable[Sequence]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([format_value(x) for x in row])
    return path


def _parse(field: str):
    try:
        if field.lstrip("-").isdigit():
            return int(field)
        return float(field)
    except ValueError:
        return field


def read_csv(path) -> list[dict]:
    with Path(path).open(encoding="utf-8", newline="") as fh:
        return [{k: _parse(v) for k, v in row.items()} for row in csv.DictReader(fh)]


def write_json(path, doc) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(doc, indent=2, sort_keys=False) + "\n", encoding="utf-8")
    return path


def read_json(path):
    return json.loads(Path(path).read_text(encoding="utf-8"))
