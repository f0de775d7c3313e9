"""Persistent run artifacts.

Layout of a run directory:

    manifest.json        config echo, code version, seeds, timings, completed flag
    diagnostics.csv      one row per recorded step (columns per run kind)
    norms.csv            per-slice norm report (flattened-coordinate runs)
    stability.csv        post-hoc orbital distance per snapshot
    snapshots/t_<i>.bin  interleaved re/im float64 field dumps (+ .json sidecar)

The manifest is written first with completed=false and rewritten at the end;
partial artifacts are therefore detectable.  CSV floats use 17 significant
digits so values round-trip exactly.
"""

from __future__ import annotations

import json
import os
import time
from importlib import metadata
from pathlib import Path

import numpy as np

from .spectral import Field, Grid, load_field, save_field


def _fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".17g")


def _code_version() -> str:
    try:
        return metadata.version("compactlab")
    except metadata.PackageNotFoundError:
        return "unknown"


class CsvWriter:
    """Line-buffered CSV with full float64 round-trip formatting."""

    def __init__(self, path, columns):
        self.path = Path(path)
        self.columns = list(columns)
        self._fh = open(self.path, "w", buffering=1)
        self._fh.write(",".join(self.columns) + "\n")

    def writerow(self, values):
        if len(values) != len(self.columns):
            raise ValueError("row width does not match header")
        self._fh.write(",".join(_fmt(v) for v in values) + "\n")

    def close(self):
        if not self._fh.closed:
            self._fh.close()


class RunArtifact:
    """A run directory with manifest bookkeeping."""

    def __init__(self, directory, config: dict, seed=None):
        self.dir = Path(directory)
        self.dir.mkdir(parents=True, exist_ok=True)
        (self.dir / "snapshots").mkdir(exist_ok=True)
        self._t_start = time.time()
        self.manifest = {
            "schema_version": config.get("schema_version", 1),
            "config": config,
            "seed": seed,
            "code_version": _code_version(),
            "created_unix": self._t_start,
            "completed": False,
            "timings": {},
        }
        self._writers = {}
        self._snapshot_count = 0
        self.write_manifest()

    # -- manifest

    def write_manifest(self):
        with open(self.dir / "manifest.json", "w") as fh:
            json.dump(self.manifest, fh, indent=2, default=float)

    def finalize(self, completed=True, **extra):
        self.manifest["timings"]["wall_seconds"] = time.time() - self._t_start
        self.manifest["completed"] = bool(completed)
        self.manifest.update(extra)
        for w in self._writers.values():
            w.close()
        self.write_manifest()

    # -- tabular outputs

    def csv(self, name, columns) -> CsvWriter:
        if name not in self._writers:
            self._writers[name] = CsvWriter(self.dir / f"{name}.csv", columns)
        return self._writers[name]

    # -- snapshots

    def save_snapshot(self, f: Field, t: float, suffix="") -> str:
        stem = f"t_{self._snapshot_count:04d}{suffix}"
        save_field(self.dir / "snapshots" / stem, f, t)
        return stem

    def bump_snapshot_index(self):
        self._snapshot_count += 1


def load_manifest(directory) -> dict:
    with open(Path(directory) / "manifest.json") as fh:
        return json.load(fh)


def load_diagnostics(directory, name="diagnostics"):
    """CSV as a dict of named float columns."""
    path = Path(directory) / f"{name}.csv"
    with open(path) as fh:
        header = fh.readline().strip().split(",")
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return {col: data[:, i] for i, col in enumerate(header)}


def iter_snapshots(directory, suffix=""):
    """Yield (t, Field) for every stored snapshot, in index order."""
    snapdir = Path(directory) / "snapshots"
    stems = sorted(
        p.name[:-5] for p in snapdir.glob(f"t_*{suffix}.json")
        if _matches_suffix(p.name[:-5], suffix))
    for stem in stems:
        f, t = load_field(snapdir / stem)
        yield t, f


def _matches_suffix(stem, suffix):
    core = stem[len("t_"):]
    if suffix:
        return core.endswith(suffix)
    return core.isdigit()


class SolverAbort(RuntimeError):
    """Raised when a run detects non-finite values (blow-up signal)."""
