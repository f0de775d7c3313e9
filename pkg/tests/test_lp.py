import numpy as np
import pytest

from compactlab.estimates import random_band_limited
from compactlab.lp import (
    bump,
    lp_lowpass,
    lp_project,
    max_band,
    paraproduct_hh,
    paraproduct_hh_direct,
    paraproduct_lh,
    smooth_step,
)
from compactlab.norms import linf_norm
from compactlab.spectral import Field, Grid


def test_bump_support_properties():
    xi = np.array([-3.0, -2.0, -1.5, -1.0, -0.3, 0.0, 0.5, 1.0, 1.5, 2.0, 5.0])
    vals = bump(xi)
    assert np.all(vals[np.abs(xi) <= 1.0] == 1.0)
    assert np.all(vals[np.abs(xi) >= 2.0] == 0.0)
    mid = (np.abs(xi) > 1.0) & (np.abs(xi) < 2.0)
    assert np.all((vals[mid] > 0.0) & (vals[mid] < 1.0))
    # even, and exactly 1/2 at the midpoint of the transition
    assert bump(np.array([1.5]))[0] == pytest.approx(0.5)
    assert np.array_equal(bump(xi), bump(-xi))
    # smooth_step endpoints
    assert smooth_step(np.array([0.5]))[0] == pytest.approx(0.5)


def test_projection_of_constant(grid512):
    const = Field.from_callable(grid512, lambda x: np.ones_like(x))
    p0 = lp_project(const, 0)
    assert np.max(np.abs(p0.samples - 1.0)) < 1e-13
    for j in (1, 2, 5):
        assert linf_norm(lp_project(const, j)) < 1e-13


def test_single_mode_band_split():
    # |xi| = 3 sits in the overlap of bands 1 and 2, split half/half by the
    # bump values bump(3/2) = 1/2 and bump(3) = 0, bump(3/4) = 1
    g = Grid(np.pi * 64, 512)  # dxi = 1/64, so xi = 3 is on the grid
    idx = 3 * 64
    hat = np.zeros(512, dtype=np.complex128)
    hat[idx] = 1.0
    f = Field.from_hat(g, hat)
    p0 = lp_project(f, 0)
    p1 = lp_project(f, 1)
    p2 = lp_project(f, 2)
    assert linf_norm(p0) < 1e-14
    total = p1 + p2
    assert np.max(np.abs(total.samples - f.samples)) < 1e-12
    assert linf_norm(p1) == pytest.approx(0.5 * linf_norm(f), rel=1e-10)


def test_telescoping(grid512, rng):
    f = random_band_limited(grid512, rng, decay_r=1.0)
    for J in (0, 2, 5, max_band(grid512)):
        total = np.zeros(512, dtype=np.complex128)
        for j in range(J + 1):
            total += lp_project(f, j).samples
        low = lp_lowpass(f, J)
        assert np.max(np.abs(total - low.samples)) < 1e-12
    assert np.max(np.abs(lp_lowpass(f, None).samples - f.samples)) == 0.0


def test_paraproduct_constant_low_factor(grid512, rng):
    c = 2.5
    const = Field.from_callable(grid512, lambda x: c * np.ones_like(x))
    g = random_band_limited(grid512, rng, decay_r=1.0)
    t = paraproduct_lh(const, g)
    # T_const g = c * (g - P_{<=3} g): the constant passes every low-pass
    high = g.samples - lp_lowpass(g, 3).samples
    assert np.max(np.abs(t.samples - c * high)) < 1e-10
    fg = const.samples * g.samples
    recon = t.samples + paraproduct_lh(g, const).samples \
        + paraproduct_hh(const, g).samples
    assert np.max(np.abs(recon - fg)) < 1e-10


def test_paraproducts_vanish_below_band(grid512, rng):
    # both factors supported below the first paraproduct band (|xi| < 8):
    # T_f g = T_g f = 0 and Pi carries the whole product
    f = random_band_limited(grid512, rng, xi_band=7.5)
    g = random_band_limited(grid512, rng, xi_band=7.5)
    assert linf_norm(paraproduct_lh(f, g)) < 1e-14
    assert linf_norm(paraproduct_lh(g, f)) < 1e-14
    pi = paraproduct_hh(f, g)
    fg = f.samples * g.samples
    assert np.max(np.abs(pi.samples - fg)) < 1e-12


def test_decomposition_identity(grid512, rng):
    from compactlab.spectral import dealias

    for _ in range(4):
        f = random_band_limited(grid512, rng, decay_r=1.0)
        g = random_band_limited(grid512, rng, decay_r=2.0)
        fg = dealias(f * g)
        recon = paraproduct_lh(f, g) + paraproduct_lh(g, f) + paraproduct_hh(f, g)
        scale = max(linf_norm(fg), 1e-300)
        assert linf_norm(fg - recon) / scale < 1e-10
        # the independent near-diagonal summation agrees as well
        direct = paraproduct_lh(f, g) + paraproduct_lh(g, f) \
            + paraproduct_hh_direct(f, g)
        assert linf_norm(fg - direct) / scale < 1e-10
