"""Curve results and their CSV / JSON serialisation."""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path

CSV_COLUMNS = ("axis", "T", "P_D", "stderr", "trials", "config_hash")


@dataclass
class CurveResult:
    axis: str
    T: list[int]
    P_D: list[float]
    stderr: list[float]
    trials: int
    config_hash: str
    seed: int
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        if not (len(self.T) == len(self.P_D) == len(self.stderr)):
            raise ValueError("T, P_D and stderr must have equal length")

    def at(self, T: int) -> float:
        return self.P_D[self.T.index(T)]


def binomial_stderr(p: float, trials: int) -> float:
    return math.sqrt(p * (1 - p) / trials)


def to_csv(results) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in results:
        for t, p, se in zip(r.T, r.P_D, r.stderr):
            w.writerow([r.axis, t, repr(float(p)), repr(float(se)), r.trials, r.config_hash])
    return buf.getvalue()


def to_json(results) -> str:
    return json.dumps([asdict(r) for r in results], indent=1, sort_keys=True)


def from_json(text: str) -> list[CurveResult]:
    return [CurveResult(**d) for d in json.loads(text)]


def from_csv(text: str) -> list[dict]:
    return list(csv.DictReader(io.StringIO(text)))


def emit_results(results, fmt: str, path) -> Path:
    """Write results as ``csv`` or ``json``; returns the path written."""
    if fmt == "csv":
        text = to_csv(results)
    elif fmt == "json":
        text = to_json(results)
    else:
        raise ValueError(f"unknown format {fmt!r}")
    path = Path(path)
    path.write_text(text)
    return path
