"""Littlewood-Paley projections and Bony paraproducts.

The dyadic localizers are built from one fixed smooth even bump: identically
1 on [-1, 1], supported in (-2, 2), glued by the standard exponential
partition function in between.  Every decomposition identity used downstream
depends only on those support properties.
"""

from __future__ import annotations

import numpy as np

from .spectral import Field, Grid, MultiplierSpec, apply_multiplier, dealias


def smooth_step(t: np.ndarray) -> np.ndarray:
    """e^{-1/t} / (e^{-1/t} + e^{-1/(1-t)}) on (0, 1): 0 at 0+, 1 at 1-."""
    t = np.asarray(t, dtype=np.float64)
    out = np.empty_like(t)
    lo = t <= 0.0
    hi = t >= 1.0
    mid = ~(lo | hi)
    out[lo] = 0.0
    out[hi] = 1.0
    tm = t[mid]
    a = np.exp(-1.0 / tm)
    b = np.exp(-1.0 / (1.0 - tm))
    out[mid] = a / (a + b)
    return out


def bump(xi: np.ndarray) -> np.ndarray:
    """Smooth even cutoff: 1 on [-1, 1], 0 outside (-2, 2)."""
    axi = np.abs(np.asarray(xi, dtype=np.float64))
    return smooth_step(2.0 - axi)


def lowpass_multiplier(grid: Grid, j: int) -> MultiplierSpec:
    return MultiplierSpec.from_values(grid, bump(grid.wavenumbers / 2.0**j))


def lp_lowpass(f: Field, j) -> Field:
    """P_{<=j} f = bump(2^-j D) f; j=None means no projection at all."""
    if j is None:
        return f
    if j < 0:
        raise ValueError("j must be nonnegative")
    return apply_multiplier(f, lowpass_multiplier(f.grid, j))


def lp_project(f: Field, j: int) -> Field:
    """Dyadic band P_j: P_0 = bump(D); P_j = bump(2^-j D) - bump(2^(1-j) D)."""
    if j < 0:
        raise ValueError("j must be nonnegative")
    xi = f.grid.wavenumbers
    if j == 0:
        sym = bump(xi)
    else:
        sym = bump(xi / 2.0**j) - bump(xi / 2.0 ** (j - 1))
    return apply_multiplier(f, MultiplierSpec.from_values(f.grid, sym))


def max_band(grid: Grid) -> int:
    """Smallest J with P_{<=J} = identity on this grid (bump == 1 up to xi_max)."""
    j = 0
    while grid.xi_max / 2.0**j > 1.0:
        j += 1
    return j


def paraproduct_lh(f: Field, g: Field) -> Field:
    """Low-high paraproduct T_f g = sum_{j>=4} P_{<=j-4} f * P_j g.

    Each pointwise product is dealiased (two-thirds rule).
    """
    grid = f.grid
    if g.grid != grid:
        raise ValueError("fields live on different grids")
    jmax = max_band(grid)
    acc = np.zeros(grid.n_points, dtype=np.complex128)
    for j in range(4, jmax + 1):
        pj = lp_project(g, j)
        if not np.any(pj.samples):
            continue
        low = lp_lowpass(f, j - 4)
        acc += dealias(Field._wrap(grid, low.samples * pj.samples)).samples
    return Field._wrap(grid, acc)


def paraproduct_hh(f: Field, g: Field) -> Field:
    """High-high remainder Pi[f, g] = fg - T_f g - T_g f (dealiased fg)."""
    fg = dealias(Field._wrap(f.grid, f.samples * g.samples))
    return Field._wrap(
        f.grid,
        fg.samples - paraproduct_lh(f, g).samples - paraproduct_lh(g, f).samples,
    )


def paraproduct_hh_direct(f: Field, g: Field) -> Field:
    """Pi[f, g] summed directly over near-diagonal bands |a - b| <= 3.

    Independent of :func:`paraproduct_hh`; the two must agree because the
    three index cones partition the full double band sum.
    """
    grid = f.grid
    jmax = max_band(grid)
    pf = [lp_project(f, a).samples for a in range(jmax + 1)]
    pg = [lp_project(g, b).samples for b in range(jmax + 1)]
    acc = np.zeros(grid.n_points, dtype=np.complex128)
    for a in range(jmax + 1):
        for b in range(jmax + 1):
            if abs(a - b) <= 3:
                acc += dealias(Field._wrap(grid, pf[a] * pg[b])).samples
    return Field._wrap(grid, acc)
