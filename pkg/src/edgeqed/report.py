"""Deterministic CSV/JSON emission and the output-file manifest."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

SCHEMA_VERSION = 1


@dataclass
class RunReport:
    """Everything a scenario run produced: scalars, files, timing."""

    scenario: str
    parameters: dict
    scalars: dict
    files: dict = field(default_factory=dict)
    provenance: dict = field(default_factory=dict)
    wall_clock_s: float = 0.0
    convergence: dict | None = None

    @property
    def convergence_ok(self) -> bool:
        return self.convergence is None or bool(self.convergence.get("ok", True))


def _fmt(value) -> str:
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    return str(value)


def write_csv(path: Path, header: list[str], columns: list[np.ndarray]) -> Path:
    """RFC-4180 CSV, LF endings, 17 significant digits."""
    if len(header) != len(columns):
        raise ValueError("header and column counts differ")
    n = len(columns[0])
    rows = ["," .join(header)]
    cols = [np.asarray(c) for c in columns]
    for c in cols:
        if len(c) != n:
            raise ValueError("columns have unequal lengths")
    for i in range(n):
        rows.append(",".join(_fmt(c[i]) for c in cols))
    path.write_text("\n".join(rows) + "\n", encoding="utf-8", newline="\n")
    return path


def sha256_of(path: Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 16), b""):
            digest.update(block)
    return digest.hexdigest()


def _jsonable(obj):
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return [_jsonable(x) for x in obj.tolist()]
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(x) for x in obj]
    return obj


def write_summary(report: RunReport, out_dir: Path) -> Path:
    """JSON summary with a fixed schema version and the file manifest.

    Wall-clock time is deliberately excluded so identical configs produce
    byte-identical output; it is reported on stdout instead.
    """
    payload = {
        "schema_version": SCHEMA_VERSION,
        "scenario": report.scenario,
        "parameters": _jsonable(report.parameters),
        "scalars": _jsonable(report.scalars),
        "provenance": _jsonable(report.provenance),
        "convergence": _jsonable(report.convergence),
        "manifest": dict(sorted(report.files.items())),
    }
    path = out_dir / "summary.json"
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path


def register_file(report: RunReport, out_dir: Path, path: Path):
    report.files[str(path.relative_to(out_dir))] = f"sha256:{sha256_of(path)}"
