"""Numerical evaluation of the working function-space norms.

Covers Sobolev H^s, Zhidkov Z^s (L-infinity plus H^{s-1/2} of the
derivative), their analytic counterparts AH^s_tau / AZ^s_tau built from the
strip shifts exp(+-tau D), the smoothing pairing, and the Sobolev
commutator.  The vector convention for the analytic norms is the sum of the
two component norms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .spectral import (
    Field,
    MultiplierOverflowError,
    apply_multiplier,
    bracket_power,
    dealias,
    derivative,
    exp_shift,
)

#: standing validity window for (s, tau); values outside are allowed but flagged
S_WINDOW = (0.0, 0.5)
TAU_WINDOW = (0.0, 1.0)


@dataclass(frozen=True)
class NormParams:
    """Regularity index s and analyticity radius tau >= 0."""

    s: float
    tau: float

    def __post_init__(self):
        if self.tau < 0:
            raise ValueError("tau must be nonnegative")

    def in_validity_window(self) -> bool:
        return (S_WINDOW[0] < self.s <= S_WINDOW[1]
                and TAU_WINDOW[0] < self.tau <= TAU_WINDOW[1])


@dataclass
class NormReport:
    """Norm values at one time slice; NaN-free unless flagged in overflow."""

    t: float
    h_s: float
    z_s: float
    ah_s_tau: float
    az_s_tau: float
    l_inf: float
    smoothing_pairing: float
    overflow: dict = field(default_factory=dict)

    CSV_COLUMNS = ("t", "h_s", "z_s", "ah_s_tau", "az_s_tau", "l_inf",
                   "smoothing_pairing")

    def row(self):
        return [self.t, self.h_s, self.z_s, self.ah_s_tau, self.az_s_tau,
                self.l_inf, self.smoothing_pairing]

    def to_dict(self):
        out = {k: getattr(self, k) for k in self.CSV_COLUMNS}
        out["overflow"] = dict(self.overflow)
        return out


def l2_norm(f: Field) -> float:
    return math.sqrt(float(np.sum(np.abs(f.samples) ** 2)) * f.grid.dx)


def linf_norm(f: Field) -> float:
    return float(np.max(np.abs(f.samples)))


def l1_norm(f: Field) -> float:
    return float(np.sum(np.abs(f.samples)) * f.grid.dx)


def h_norm(f: Field, s: float) -> float:
    """H^s norm: quadrature of <xi>^{2s} |f_hat|^2."""
    xi = f.grid.wavenumbers
    w = (1.0 + xi * xi) ** s
    return math.sqrt(float(np.sum(w * np.abs(f.hat) ** 2)) * f.grid.dxi)


def z_norm(f: Field, s: float) -> float:
    """Zhidkov norm: sup|f| + ||f_y||_{H^{s-1/2}}."""
    return linf_norm(f) + h_norm(derivative(f, 1), s - 0.5)


def w1inf_norm(f: Field) -> float:
    return linf_norm(f) + linf_norm(derivative(f, 1))


_BASE_NORMS = {
    "h": lambda f, p: h_norm(f, p.s),
    "z": lambda f, p: z_norm(f, p.s),
    "linf": lambda f, p: linf_norm(f),
    "l2": lambda f, p: l2_norm(f),
}


def a_norm(f: Field, base: str, params: NormParams) -> float:
    """Analytic norm ||exp(tau D) f||_X + ||exp(-tau D) f||_X.

    Raises MultiplierOverflowError when the field's spectral tail cannot
    support the strip width tau (reject policy).
    """
    if base not in _BASE_NORMS:
        raise ValueError(f"unknown base norm {base!r}")
    fn = _BASE_NORMS[base]
    if params.tau == 0.0:
        return 2.0 * fn(f, params)
    plus = exp_shift(f, params.tau)
    minus = exp_shift(f, -params.tau)
    return fn(plus, params) + fn(minus, params)


def smoothing_pairing(z: Field, tau: float) -> float:
    """-Re < d_y S_tau z, C_tau z > via its Plancherel form.

    Equals the quadrature of xi * tanh(tau xi) * |cosh(tau xi) z_hat|^2, a
    nonnegative quantity measuring the strip-shrink smoothing rate.
    """
    g = z.grid
    xi = g.wavenumbers
    mag = np.abs(z.hat)
    nz = mag > 0
    # log-space magnitude of cosh * |z_hat| to delay overflow
    ax = np.abs(tau * xi)
    log_cosh = ax + np.log1p(np.exp(-2.0 * ax)) - np.log(2.0)
    with np.errstate(divide="ignore"):
        tot = np.where(nz, log_cosh + np.log(np.where(nz, mag, 1.0)), -np.inf)
    weight = xi * np.tanh(tau * xi)
    weight[g.nyquist_mask] = 0.0  # odd-symbol convention
    if np.any(nz & (2.0 * tot + np.log(np.maximum(weight, 1e-300)) > 700.0)):
        raise MultiplierOverflowError("smoothing pairing overflow: tau too large")
    vals = np.where(nz, weight * np.exp(2.0 * tot), 0.0)
    return float(np.sum(vals) * g.dxi)


def commutator_sobolev(f: Field, g: Field, s: float) -> Field:
    """[<D>^s, f] g_y  =  <D>^s(f g_y) - f <D>^s(g_y), products dealiased."""
    gy = derivative(g, 1)
    br = bracket_power(f.grid, s)
    term1 = apply_multiplier(dealias(f * gy), br)
    term2 = dealias(f * apply_multiplier(gy, br))
    return term1 - term2


def norm_report(f: Field, params: NormParams, t: float = 0.0) -> NormReport:
    """All tracked norms of one field; analytic entries flag on overflow."""
    rep = NormReport(
        t=t,
        h_s=h_norm(f, params.s),
        z_s=z_norm(f, params.s),
        ah_s_tau=math.inf,
        az_s_tau=math.inf,
        l_inf=linf_norm(f),
        smoothing_pairing=math.inf,
    )
    for key, fn in (
        ("ah_s_tau", lambda: a_norm(f, "h", params)),
        ("az_s_tau", lambda: a_norm(f, "z", params)),
        ("smoothing_pairing", lambda: smoothing_pairing(f, params.tau)),
    ):
        try:
            setattr(rep, key, fn())
        except MultiplierOverflowError as exc:
            rep.overflow[key] = str(exc)
    if not params.in_validity_window():
        rep.overflow.setdefault(
            "params", f"(s={params.s}, tau={params.tau}) outside the standing "
                      f"window 0 < s <= 1/2, 0 < tau <= 1")
    return rep
