import math

import numpy as np
import pytest

from compactlab.spectral import Field, Grid
from compactlab.stability import (
    DiagnosticsRecord,
    assemble_diagnostics,
    q_functionals,
    record_roundtrip,
    spectral_shift,
    stability_distance,
    stability_distance_bruteforce,
)
from compactlab.states import (
    X0,
    BreatherSpec,
    PerturbationSpec,
    compacton,
    mass,
    perturbed_data,
)


@pytest.fixture(scope="module")
def xgrid():
    return Grid(1.5 * X0, 512)


def test_distance_zero_on_ground_state(xgrid):
    phi = compacton(BreatherSpec(), xgrid)
    d, th, h, flag = stability_distance(phi, 1.0)
    assert d < 1e-10
    assert abs(th) < 1e-3 or abs(th - math.pi) < 1e-3
    assert abs(h) < 1e-3
    assert not flag


def test_distance_recovers_planted_orbit_element(xgrid):
    # a grid-aligned shift keeps the spectral shift exact on the sampled
    # square (the support corner's aliased tail makes off-grid shifts exact
    # only to the aliasing level, not 1e-6)
    phi = compacton(BreatherSpec(), xgrid)
    theta0 = 0.9
    h0 = 57 * xgrid.dx
    planted = Field(xgrid, np.exp(1j * theta0)
                    * np.roll(phi.samples, 57))  # u(x) = phi(x - h0)
    d, th, h, flag = stability_distance(planted, 1.0)
    assert d < 1e-6
    assert th == pytest.approx(theta0 % math.pi, abs=1e-3)
    assert h == pytest.approx(h0, abs=1e-3)
    assert not flag


def test_distance_matches_bruteforce(xgrid):
    u = perturbed_data(BreatherSpec(), PerturbationSpec(amplitude=0.1), xgrid)
    d, th, h, _ = stability_distance(u, 1.0)
    d_bf, th_bf, h_bf = stability_distance_bruteforce(u, 1.0)
    assert d > 0.0
    assert d <= d_bf * (1.0 + 1e-9)  # refinement can only improve
    assert abs(d - d_bf) / d_bf < 0.01


def test_distance_gauge_invariance(xgrid):
    u = perturbed_data(BreatherSpec(), PerturbationSpec(amplitude=0.1), xgrid)
    d0, _, _, _ = stability_distance(u, 1.0)
    moved = Field(xgrid, np.exp(0.7j) * np.roll(u.samples, 31))
    d1, _, _, _ = stability_distance(moved, 1.0)
    assert d1 == pytest.approx(d0, abs=1e-6)
    # an off-grid move is invariant only up to the corner's aliasing level
    moved2 = spectral_shift(Field(xgrid, np.exp(0.7j) * u.samples), -0.4)
    d2, _, _, _ = stability_distance(moved2, 1.0)
    assert d2 == pytest.approx(d0, abs=1e-3)


def test_distance_continuous_in_amplitude(xgrid):
    ds = []
    for a in (0.05, 0.1):
        u = perturbed_data(BreatherSpec(), PerturbationSpec(amplitude=a), xgrid)
        d, _, _, _ = stability_distance(u, 1.0)
        ds.append(d)
    assert 0 < ds[0] < ds[1]
    # roughly linear response in the amplitude at leading order
    assert ds[1] / ds[0] == pytest.approx(2.0, rel=0.35)


def test_q_functionals(xgrid):
    phi = compacton(BreatherSpec(), xgrid)
    m_q, h_q = q_functionals(phi)
    assert m_q == pytest.approx(mass(phi), abs=1e-10)
    assert h_q == pytest.approx(-math.pi / math.sqrt(2.0), abs=1e-4)
    z = Field.zero(xgrid)
    assert q_functionals(z) == (0.0, 0.0)


def test_assemble_and_roundtrip(xgrid):
    phi = compacton(BreatherSpec(), xgrid)
    rec = assemble_diagnostics(phi, t=0.0, mu=1, omega=1.0,
                               norms={"h_s": 1.0})
    assert rec.momentum == pytest.approx(0.0, abs=1e-12)
    assert rec.stability_distance < 1e-10
    back = record_roundtrip(rec)
    assert back == rec
