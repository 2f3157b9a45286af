"""Verification reports and CSV serialization of fields and matrices.

Reports serialize deterministically: identical inputs give byte-identical
JSON once the volatile fields (timestamp, runtime) are zeroed, which
`canonical_json` does.  CSV exports use 17-significant-digit formatting,
so a round trip through `import_field` is bitwise lossless.
"""

import json
import os
from dataclasses import dataclass, field

import numpy as np


def _open_out(path: str):
    parent = os.path.dirname(path)
    if parent:
        os.makedirs(parent, exist_ok=True)
    return open(path, "w", encoding="utf-8", newline="")


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    return obj


@dataclass
class CheckResult:
    """One named check: measured values against its tolerances."""

    name: str
    passed: bool
    measured: dict
    tolerance: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"name": self.name, "passed": bool(self.passed),
                "measured": _jsonable(self.measured),
                "tolerance": _jsonable(self.tolerance)}


@dataclass
class VerificationReport:
    """Outcome of one experiment: named checks plus run metadata."""

    experiment: str
    checks: list
    grid: dict = field(default_factory=dict)
    version: str = ""
    config: dict = field(default_factory=dict)
    runtime_s: float = 0.0
    timestamp: str = ""

    @property
    def all_passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> list:
        out = []
        for c in self.checks:
            if not c.passed:
                out.append(f"{c.name}: measured {_jsonable(c.measured)} "
                           f"vs tolerance {_jsonable(c.tolerance)}")
        return out

    def to_dict(self) -> dict:
        return {
            "experiment": self.experiment,
            "checks": [c.to_dict() for c in self.checks],
            "all_passed": self.all_passed,
            "grid": _jsonable(self.grid),
            "version": self.version,
            "config": _jsonable(self.config),
            "runtime_s": float(self.runtime_s),
            "timestamp": self.timestamp,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def canonical_json(self) -> str:
        """Serialization with the volatile fields zeroed, for determinism
        comparisons."""
        d = self.to_dict()
        d["runtime_s"] = 0.0
        d["timestamp"] = ""
        return json.dumps(d, indent=2, sort_keys=True) + "\n"

    def write(self, path: str) -> None:
        with _open_out(path) as fh:
            fh.write(self.to_json())


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def export_field(values, path: str, grid=None) -> None:
    """Write a node field or a square matrix as CSV.

    1-d fields need the grid and come out as (t, s..., value) rows in node
    index order; an empty field writes the header only.  2-d square arrays
    come out with an integer index header and one index column.
    """
    a = np.asarray(values, dtype=float)
    lines = []
    if a.ndim == 2:
        n, m = a.shape
        if n != m:
            raise ValueError("matrix export requires a square array")
        lines.append("index," + ",".join(str(j) for j in range(n)))
        for i in range(n):
            lines.append(str(i) + "," + ",".join(_fmt(v) for v in a[i]))
    else:
        dim = grid.coords().shape[1] if grid is not None and a.size else 2
        if dim == 2:
            header = "t,s,value"
        else:
            header = "t," + ",".join(f"s{k}" for k in range(1, dim)) \
                + ",value"
        lines.append(header)
        if a.size:
            if grid is None or a.shape[0] != grid.n_nodes:
                raise ValueError("field export needs the matching grid")
            coords = grid.coords()
            for i in range(a.shape[0]):
                row = ",".join(_fmt(c) for c in coords[i])
                lines.append(row + "," + _fmt(a[i]))
    with _open_out(path) as fh:
        fh.write("\n".join(lines) + "\n")


def import_field(path: str):
    """Round-trip reader for `export_field` files.

    Returns a square matrix for matrix files, else (coords, values).
    """
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip()
        body = [ln.strip() for ln in fh if ln.strip()]
    if header.startswith("index,"):
        mat = [[float(tok) for tok in ln.split(",")[1:]] for ln in body]
        return np.asarray(mat, dtype=float)
    rows = [[float(tok) for tok in ln.split(",")] for ln in body]
    if not rows:
        k = header.count(",")
        return np.empty((0, k), dtype=float), np.empty(0, dtype=float)
    arr = np.asarray(rows, dtype=float)
    return arr[:, :-1], arr[:, -1]
