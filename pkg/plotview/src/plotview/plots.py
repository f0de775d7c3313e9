"""Figure builders: snapshot panels, conservation curves, norm and
stability time series.  Static output only (PNG plus vector PDF)."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from .reader import ArtifactError, iter_snapshots, load_csv, require_completed


def _save(fig, out_dir, name):
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = []
    for ext in ("png", "pdf"):
        p = out_dir / f"{name}.{ext}"
        fig.savefig(p, dpi=150, bbox_inches="tight")
        paths.append(p)
    plt.close(fig)
    return paths


def plot_snapshots(artifact_dir, out_dir):
    """One panel per stored slice: |u(t, x)| against x."""
    require_completed(artifact_dir)
    snaps = list(iter_snapshots(artifact_dir))
    n = len(snaps)
    fig, axes = plt.subplots(1, n, figsize=(3.0 * n, 2.8), sharey=True)
    if n == 1:
        axes = [axes]
    for ax, (t, x, u) in zip(axes, snaps):
        ax.plot(x, np.abs(u), lw=1.2)
        ax.set_title(f"t = {t:g}")
        ax.set_xlabel("x")
    axes[0].set_ylabel("|u|")
    fig.suptitle("field magnitude time slices")
    return _save(fig, out_dir, "snapshots")


def plot_conservation(artifact_dir, out_dir):
    """Mass and energy curves, axes scaled to the drift magnitude.

    Flattened-coordinate artifacts track half-line masses instead; whichever
    columns exist are drawn.
    """
    require_completed(artifact_dir)
    diag = load_csv(artifact_dir, "diagnostics")
    if diag is None:
        raise ArtifactError(f"no diagnostics.csv in {artifact_dir}")
    t = diag["t"]
    tracked = [c for c in ("mass", "energy", "half_mass_left",
                           "half_mass_right") if c in diag]
    if not tracked:
        raise ArtifactError("diagnostics.csv has no conserved-quantity columns")
    fig, axes = plt.subplots(1, len(tracked), figsize=(4.0 * len(tracked), 3.0))
    if len(tracked) == 1:
        axes = [axes]
    for ax, col in zip(axes, tracked):
        v = diag[col]
        drift = v - v[0]
        ax.plot(t, drift, lw=1.0)
        span = max(np.max(np.abs(drift)), 1e-16)
        ax.set_ylim(-1.5 * span, 1.5 * span)
        ax.set_title(f"{col} drift (initial {v[0]:.6g})")
        ax.set_xlabel("t")
    fig.suptitle("conserved-quantity drift")
    return _save(fig, out_dir, "conservation")


def plot_norms(artifact_dir, out_dir):
    require_completed(artifact_dir)
    norms = load_csv(artifact_dir, "norms")
    if norms is None:
        raise ArtifactError(f"no norms.csv in {artifact_dir}")
    t = norms["t"]
    fig, ax = plt.subplots(figsize=(5.5, 3.2))
    for col in ("h_s", "z_s", "ah_s_tau", "az_s_tau", "l_inf"):
        if col in norms and np.all(np.isfinite(norms[col])):
            ax.plot(t, norms[col], lw=1.0, label=col)
    ax.set_xlabel("t")
    ax.legend(fontsize=8)
    ax.set_title("tracked norms")
    return _save(fig, out_dir, "norms")


def plot_stability(artifact_dir, out_dir):
    require_completed(artifact_dir)
    stab = load_csv(artifact_dir, "stability")
    if stab is None:
        raise ArtifactError(f"no stability.csv in {artifact_dir}")
    fig, ax = plt.subplots(figsize=(5.5, 3.2))
    ax.plot(stab["t"], stab["distance"], "o-", lw=1.0)
    ax.set_xlabel("t")
    ax.set_ylabel("orbital distance")
    ax.set_title("distance to the squared-state orbit")
    return _save(fig, out_dir, "stability")


WHICH = {
    "snapshots": plot_snapshots,
    "conservation": plot_conservation,
    "norms": plot_norms,
    "stability": plot_stability,
}


def plot_all(artifact_dir, out_dir):
    written = []
    written += plot_snapshots(artifact_dir, out_dir)
    written += plot_conservation(artifact_dir, out_dir)
    for optional in (plot_norms, plot_stability):
        try:
            written += optional(artifact_dir, out_dir)
        except ArtifactError:
            pass  # companion plots only when their tables exist
    return written
