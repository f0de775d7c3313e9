import math

import numpy as np
import pytest

from compactlab.artifacts import SolverAbort, load_diagnostics, load_manifest
from compactlab.solver_x import XState, rhs_x, run_x, stable_dt, step_x
from compactlab.spectral import Field, Grid
from compactlab.states import (
    X0,
    BreatherSpec,
    breather_exact,
    compacton,
    mass,
)


def test_rhs_zero_state():
    g = Grid(1.5 * X0, 256)
    out = rhs_x(XState(0.0, Field.zero(g), 1))
    assert np.max(np.abs(out.samples)) == 0.0


def test_rhs_constant_state_phase_rotation():
    # spatially constant data on the torus: the dispersive term vanishes and
    # the state follows du/dt = -i mu |A|^2 A
    g = Grid(2.0, 64)
    A = 0.8 - 0.3j
    u = Field.from_callable(g, lambda x: A * np.ones_like(x))
    for mu in (-1, 0, 1):
        out = rhs_x(XState(0.0, u, mu))
        expected = -1j * mu * abs(A) ** 2 * A
        assert np.max(np.abs(out.samples - expected)) < 1e-12


def test_rhs_breather_is_eigenfunction():
    # the stationary profile satisfies rhs = -i omega u away from the
    # support corners; accuracy is limited by the corner's slow spectral
    # decay, so the grid is large and the corner neighborhoods are excluded
    g = Grid(1.5 * X0, 2**16)
    spec = BreatherSpec()
    u = compacton(spec, g)
    out = rhs_x(XState(0.0, u, 1))
    resid = out.samples - (-1j * spec.omega * u.samples)
    inner = np.abs(g.nodes) <= 0.85 * X0
    assert np.max(np.abs(resid[inner])) < 1e-4


def test_rhs_mu_zero_not_stationary():
    g = Grid(1.5 * X0, 4096)
    spec = BreatherSpec()
    u = compacton(spec, g)
    out = rhs_x(XState(0.0, u, 0))
    resid = out.samples - (-1j * spec.omega * u.samples)
    inner = np.abs(g.nodes) <= 0.85 * X0
    assert np.max(np.abs(resid[inner])) > 0.1


def test_step_zero_fixed_point():
    g = Grid(1.5 * X0, 256)
    s = XState(0.0, Field.zero(g), 1)
    s1 = step_x(s, 1e-4)
    assert np.max(np.abs(s1.u.samples)) == 0.0
    assert s1.t == pytest.approx(1e-4)


def test_step_constant_phase_ode_order():
    g = Grid(2.0, 64)
    A = 1.1 + 0.2j
    u = Field.from_callable(g, lambda x: A * np.ones_like(x))
    errs = []
    for dt in (2e-3, 1e-3):
        s1 = step_x(XState(0.0, u, 1), dt)
        exact = A * np.exp(-1j * abs(A) ** 2 * dt)
        errs.append(np.max(np.abs(s1.u.samples - exact)))
    # classical fourth-order local error: halving dt shrinks it ~32x
    assert errs[0] / errs[1] > 16.0


def test_step_reverse_consistency():
    g = Grid(1.5 * X0, 256)
    spec = BreatherSpec()
    u0 = compacton(spec, g)
    errs = []
    for dt in (4e-5, 2e-5):
        fwd = step_x(XState(0.0, u0, 1), dt)
        back = step_x(XState(dt, fwd.u, 1), -dt)
        errs.append(np.max(np.abs(back.u.samples - u0.samples)))
    assert errs[0] > 0.0
    assert errs[0] / errs[1] > 8.0  # at least fourth-order shrinkage


def test_stable_dt_scaling():
    g = Grid(1.5 * X0, 256)
    u = compacton(BreatherSpec(), g)
    dt = stable_dt(u)
    assert dt == pytest.approx(0.5 / (2.0 * g.xi_max**2), rel=1e-6)


def test_run_short_conservation(tmp_path):
    config = {
        "schema_version": 1, "coordinates": "x", "N": 256, "T": 0.01,
        "dt": 1e-5, "snapshot_stride": 250, "diag_stride": 10, "mu": 1,
        "data": {"omega": 1.0, "theta": 0.0},
    }
    art = run_x(config, tmp_path / "run")
    man = load_manifest(art.dir)
    assert man["completed"] is True
    diag = load_diagnostics(art.dir)
    m = diag["mass"]
    assert np.max(np.abs(m - m[0])) / m[0] < 1e-8
    h = diag["energy"]
    assert np.max(np.abs(h - h[0])) / abs(h[0]) < 1e-8
    # breather: the distance to the continuum profile is set by the initial
    # band projection of the corner tail (~5e-4) and must not drift
    d = diag["breather_l2_distance"]
    assert np.max(d) < 1e-3
    # the truncated profile is not an exact eigenstate; its orbit wobbles
    # at the tail scale but must not run away
    assert np.max(d) - np.min(d) < 1e-4
    # band limitation smears a ~5e-8 mass shadow outside the support
    assert np.max(diag["support_tail_mass"]) < 1e-6


def test_run_snapshot_count(tmp_path):
    config = {
        "schema_version": 1, "coordinates": "x", "N": 256, "T": 4e-4,
        "dt": 1e-5, "snapshot_stride": 10, "diag_stride": 5, "mu": 1,
        "data": {"omega": 1.0, "theta": 0.0,
                 "perturbation": {"a": 0.1, "w": 20.0}},
    }
    art = run_x(config, tmp_path / "run")
    snaps = sorted((art.dir / "snapshots").glob("t_*.bin"))
    assert len(snaps) == 5  # t = 0 plus four strides


def test_blowup_aborts_with_partial_artifact(tmp_path):
    # a grossly unstable step size trips the non-finite detector
    config = {
        "schema_version": 1, "coordinates": "x", "N": 256, "T": 1.0,
        "dt": 0.01, "snapshot_stride": 5, "diag_stride": 1, "mu": 1,
        "data": {"omega": 1.0, "theta": 0.0},
    }
    with pytest.raises(SolverAbort):
        run_x(config, tmp_path / "boom")
    man = load_manifest(tmp_path / "boom")
    assert man["completed"] is False
