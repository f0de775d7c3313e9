"""Stand-alone reading of run-artifact directories.

Deliberately independent of the solver package: everything here works from
the documented on-disk formats alone.

    manifest.json        {"config": ..., "completed": bool, ...}
    diagnostics.csv      header row + float columns
    norms.csv            same
    stability.csv        same
    snapshots/t_*.bin    interleaved re/im float64 little-endian, length 2N
    snapshots/t_*.json   {"L": half-length, "N": points, "t": time}
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np


class ArtifactError(RuntimeError):
    pass


def load_manifest(directory):
    path = Path(directory) / "manifest.json"
    if not path.exists():
        raise ArtifactError(f"no manifest in {directory}")
    with open(path) as fh:
        return json.load(fh)


def require_completed(directory) -> dict:
    manifest = load_manifest(directory)
    if not manifest.get("completed", False):
        raise ArtifactError(f"artifact {directory} is incomplete")
    return manifest


def load_csv(directory, name):
    """Named float columns of <name>.csv, or None when absent."""
    path = Path(directory) / f"{name}.csv"
    if not path.exists():
        return None
    with open(path) as fh:
        header = fh.readline().strip().split(",")
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    if data.size == 0:
        raise ArtifactError(f"{path} has no rows")
    return {col: data[:, i] for i, col in enumerate(header)}


def load_snapshot(path_stem):
    """(t, x, values) from a .bin/.json sidecar pair."""
    stem = Path(path_stem)
    with open(stem.with_suffix(".json")) as fh:
        meta = json.load(fh)
    raw = np.fromfile(stem.with_suffix(".bin"), dtype="<f8")
    n = int(meta["N"])
    if raw.size != 2 * n:
        raise ArtifactError(f"{stem}.bin: expected {2 * n} doubles, "
                            f"got {raw.size}")
    values = raw[0::2] + 1j * raw[1::2]
    half = float(meta["L"])
    x = -half + 2.0 * half * np.arange(n) / n
    return float(meta["t"]), x, values


def iter_snapshots(directory):
    """Primary field snapshots (t_<index>.bin), sorted by index."""
    snapdir = Path(directory) / "snapshots"
    if not snapdir.is_dir():
        raise ArtifactError(f"no snapshots directory in {directory}")
    stems = sorted(p.with_suffix("") for p in snapdir.glob("t_*.json")
                   if p.stem[len("t_"):].isdigit())
    if not stems:
        raise ArtifactError(f"no snapshots found in {directory}")
    for stem in stems:
        yield load_snapshot(stem)
