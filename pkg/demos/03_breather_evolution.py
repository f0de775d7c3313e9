"""Short evolution of the perturbed breather in physical coordinates.

A Gaussian phase perturbation exp(i a e^{-20 x^2}) keeps the modulus intact
at t = 0 and then spreads toward the support endpoints while mass, momentum
and energy stay put.  (The full published-figure preset is
`compactlab figure1 --out DIR`; this demo runs a tenth of the horizon.)
"""

import tempfile

import numpy as np

from compactlab.artifacts import iter_snapshots, load_diagnostics
from compactlab.solver_x import run_x
from compactlab.states import X0, phase_gradient

config = {
    "schema_version": 1,
    "coordinates": "x",
    "N": 256,
    "T": 0.05,
    "dt": 1e-5,
    "snapshot_stride": 1250,
    "diag_stride": 50,
    "mu": 1,
    "data": {"omega": 1.0, "theta": 0.0, "perturbation": {"a": 0.1, "w": 20.0}},
}

out = tempfile.mkdtemp(prefix="demo_run_")
art = run_x(config, out)
print(f"artifact: {out}")

diag = load_diagnostics(out)
for col in ("mass", "momentum", "energy"):
    v = diag[col]
    print(f"{col:9s} drift: {np.max(np.abs(v - v[0])):.3e}")

print("\nphase-activity frontier (largest |x| with significant arg-gradient):")
ref = None
for t, f in iter_snapshots(out):
    g = np.abs(phase_gradient(f))
    inner = np.abs(f.grid.nodes) < 0.97 * X0
    if ref is None:
        ref = np.max(g[inner])
    mask = inner & (g > 0.1 * ref)
    frontier = np.max(np.abs(f.grid.nodes[mask])) if mask.any() else 0.0
    print(f"  t = {t:5.3f}: frontier = {frontier:.3f}  (endpoint {X0:.3f})")
