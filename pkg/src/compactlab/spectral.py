"""Periodic spectral toolbox: grids, fields, multipliers, spectral calculus.

The discrete transform follows the continuum convention

    f_hat(xi) = (2*pi)**-0.5 * integral f(x) exp(-i*x*xi) dx,

realized as a scaled DFT, so coefficient magnitudes (and every norm built
from them) converge to grid-independent numbers under refinement.

Fields are immutable values; every operation here is pure and reentrant.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property

import numpy as np

SQRT_2PI = np.sqrt(2.0 * np.pi)

# exp() overflows double precision just above this
_LOG_DBL_MAX = 709.78
_LOG_SAFE = 708.0


class MultiplierOverflowError(FloatingPointError):
    """The requested symbol would push a nonzero coefficient past double range.

    Usually a sign that the analyticity radius tau is too large for the
    field's spectral decay.
    """


@dataclass(frozen=True)
class Grid:
    """Uniform periodic grid on [-L, L) with 2pi/(2L)-spaced wavenumbers.

    Nodes are x_n = -L + 2*L*n/N; wavenumbers xi_k = pi*k/L for
    k in {-N/2, ..., N/2 - 1} (stored in FFT order).
    """

    half_length: float
    n_points: int

    def __post_init__(self):
        if self.half_length <= 0:
            raise ValueError("half_length must be positive")
        n = self.n_points
        if n < 16 or (n & (n - 1)) != 0:
            raise ValueError("n_points must be a power of two, at least 16")

    @property
    def dx(self) -> float:
        return 2.0 * self.half_length / self.n_points

    @property
    def dxi(self) -> float:
        return np.pi / self.half_length

    @cached_property
    def nodes(self) -> np.ndarray:
        n = self.n_points
        x = -self.half_length + 2.0 * self.half_length * np.arange(n) / n
        x.setflags(write=False)
        return x

    @cached_property
    def k_index(self) -> np.ndarray:
        k = np.fft.fftfreq(self.n_points, d=1.0 / self.n_points).astype(np.int64)
        k.setflags(write=False)
        return k

    @cached_property
    def wavenumbers(self) -> np.ndarray:
        xi = self.dxi * self.k_index.astype(np.float64)
        xi.setflags(write=False)
        return xi

    @cached_property
    def _alt_sign(self) -> np.ndarray:
        # (-1)**k factor translating between the DFT (origin at node 0) and
        # the centered interval [-L, L)
        s = np.where(self.k_index % 2 == 0, 1.0, -1.0)
        s.setflags(write=False)
        return s

    @cached_property
    def nyquist_mask(self) -> np.ndarray:
        m = self.k_index == -(self.n_points // 2)
        m.setflags(write=False)
        return m

    @cached_property
    def dealias_mask(self) -> np.ndarray:
        # two-thirds rule: keep |k| <= N/3
        m = np.abs(self.k_index) <= self.n_points // 3
        m.setflags(write=False)
        return m

    @property
    def xi_max(self) -> float:
        return self.dxi * (self.n_points // 2)


class Field:
    """Complex function sampled on a Grid, with cached spectral coefficients."""

    __slots__ = ("grid", "samples", "_hat")

    def __init__(self, grid: Grid, samples, hat=None):
        arr = np.array(samples, dtype=np.complex128, copy=True)
        if arr.shape != (grid.n_points,):
            raise ValueError(f"samples must have shape ({grid.n_points},)")
        arr.setflags(write=False)
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "samples", arr)
        object.__setattr__(self, "_hat", hat)

    def __setattr__(self, name, value):
        raise AttributeError("Field is immutable")

    @classmethod
    def _wrap(cls, grid: Grid, samples: np.ndarray, hat=None) -> "Field":
        """Adopt an array without copying (caller relinquishes ownership)."""
        obj = cls.__new__(cls)
        samples = np.ascontiguousarray(samples, dtype=np.complex128)
        samples.setflags(write=False)
        object.__setattr__(obj, "grid", grid)
        object.__setattr__(obj, "samples", samples)
        object.__setattr__(obj, "_hat", hat)
        return obj

    @classmethod
    def from_callable(cls, grid: Grid, fn) -> "Field":
        return cls._wrap(grid, np.asarray(fn(grid.nodes), dtype=np.complex128))

    @classmethod
    def zero(cls, grid: Grid) -> "Field":
        return cls._wrap(grid, np.zeros(grid.n_points, dtype=np.complex128))

    @classmethod
    def from_hat(cls, grid: Grid, hat) -> "Field":
        hat = np.asarray(hat, dtype=np.complex128)
        scale = SQRT_2PI / grid.dx
        samples = np.fft.ifft(grid._alt_sign * hat) * scale
        h = np.array(hat, copy=True)
        h.setflags(write=False)
        return cls._wrap(grid, samples, hat=h)

    @property
    def hat(self) -> np.ndarray:
        if self._hat is None:
            h = (self.grid.dx / SQRT_2PI) * (self.grid._alt_sign * np.fft.fft(self.samples))
            h.setflags(write=False)
            object.__setattr__(self, "_hat", h)
        return self._hat

    # -- elementary pointwise algebra (convenience; heavy loops use raw arrays)

    def __add__(self, other):
        hat = None
        if isinstance(other, Field) and self._hat is not None \
                and other._hat is not None:
            hat = self._hat + other._hat
        return Field._wrap(self.grid, self.samples + _coerce(self, other), hat)

    def __sub__(self, other):
        hat = None
        if isinstance(other, Field) and self._hat is not None \
                and other._hat is not None:
            hat = self._hat - other._hat
        return Field._wrap(self.grid, self.samples - _coerce(self, other), hat)

    def __mul__(self, other):
        # scalar multiples scale the cached coefficients too, preserving
        # exact spectral zeros (which exponential multipliers rely on)
        if np.isscalar(other):
            hat = None if self._hat is None else other * self._hat
            return Field._wrap(self.grid, other * self.samples, hat)
        return Field._wrap(self.grid, self.samples * _coerce(self, other))

    __rmul__ = __mul__

    def __neg__(self):
        hat = None if self._hat is None else -self._hat
        return Field._wrap(self.grid, -self.samples, hat)

    def conj(self) -> "Field":
        return Field._wrap(self.grid, np.conj(self.samples))

    def real_part(self) -> "Field":
        return Field._wrap(self.grid, self.samples.real.astype(np.complex128))

    def imag_part(self) -> "Field":
        return Field._wrap(self.grid, self.samples.imag.astype(np.complex128))


def _coerce(f: Field, other):
    if isinstance(other, Field):
        if other.grid is not f.grid and other.grid != f.grid:
            raise ValueError("fields live on different grids")
        return other.samples
    return other


# ---------------------------------------------------------------------------
# Fourier multipliers


@dataclass(frozen=True)
class MultiplierSpec:
    """A Fourier symbol tabulated at the grid wavenumbers.

    ``log_abs`` carries log|m| in a form that stays finite for exponentially
    large symbols, so products m(xi)*f_hat can be formed in log space and
    overflow detected before it happens.  ``overflow_policy`` is either
    "reject" (raise) or "clamp" (saturate at the double-precision ceiling).
    """

    grid: Grid
    values: np.ndarray
    log_abs: np.ndarray
    phase: np.ndarray
    overflow_policy: str = "reject"

    def __post_init__(self):
        if self.overflow_policy not in ("reject", "clamp"):
            raise ValueError("overflow_policy must be 'reject' or 'clamp'")

    @classmethod
    def from_values(cls, grid: Grid, values, overflow_policy="reject",
                    odd=False) -> "MultiplierSpec":
        vals = np.asarray(values, dtype=np.complex128).copy()
        if odd:
            vals[grid.nyquist_mask] = 0.0
        mag = np.abs(vals)
        with np.errstate(divide="ignore"):
            log_abs = np.log(mag)
        phase = np.where(mag > 0, vals / np.where(mag > 0, mag, 1.0), 1.0)
        for a in (vals, log_abs, phase):
            a.setflags(write=False)
        return cls(grid, vals, log_abs, phase, overflow_policy)

    @classmethod
    def from_callable(cls, grid: Grid, fn, overflow_policy="reject",
                      odd=False) -> "MultiplierSpec":
        return cls.from_values(grid, fn(grid.wavenumbers), overflow_policy, odd)


def _log_cosh(x: np.ndarray) -> np.ndarray:
    ax = np.abs(x)
    return ax + np.log1p(np.exp(-2.0 * ax)) - np.log(2.0)


def _log_sinh_abs(x: np.ndarray) -> np.ndarray:
    ax = np.abs(x)
    with np.errstate(divide="ignore"):
        return np.where(ax > 0, ax + np.log1p(-np.exp(-2.0 * ax)) - np.log(2.0), -np.inf)


def _assemble(grid, log_abs, phase, policy) -> MultiplierSpec:
    with np.errstate(over="ignore", invalid="ignore"):
        vals = phase * np.exp(log_abs)
    bad = ~np.isfinite(vals)
    if bad.any():
        # sentinel for symbols past double range; apply_multiplier works in
        # log space whenever values are not all finite
        vals = np.where(bad, np.inf, vals)
    log_abs = np.asarray(log_abs, dtype=np.float64).copy()
    phase = np.asarray(phase, dtype=np.complex128).copy()
    for a in (vals, log_abs, phase):
        a.setflags(write=False)
    return MultiplierSpec(grid, vals, log_abs, phase, policy)


def cosh_multiplier(grid: Grid, tau: float, overflow_policy="reject") -> MultiplierSpec:
    """C_tau = cosh(tau D): symmetric, real-to-real."""
    xi = grid.wavenumbers
    return _assemble(grid, _log_cosh(tau * xi), np.ones_like(xi, dtype=np.complex128),
                     overflow_policy)


def sinh_multiplier(grid: Grid, tau: float, overflow_policy="reject") -> MultiplierSpec:
    """S_tau = i*sinh(tau D): skew-symmetric, real-to-real, Nyquist zeroed."""
    xi = grid.wavenumbers
    log_abs = _log_sinh_abs(tau * xi)
    phase = (1j * np.sign(tau * xi)).astype(np.complex128)
    phase[phase == 0] = 1.0
    log_abs = log_abs.copy()
    log_abs[grid.nyquist_mask] = -np.inf
    return _assemble(grid, log_abs, phase, overflow_policy)


def tanh_multiplier(grid: Grid, tau: float, overflow_policy="reject") -> MultiplierSpec:
    """T_tau = i*tanh(tau D): skew-symmetric, Nyquist zeroed."""
    xi = grid.wavenumbers
    vals = 1j * np.tanh(tau * xi)
    return MultiplierSpec.from_values(grid, vals, overflow_policy, odd=True)


def exp_multiplier(grid: Grid, tau: float, overflow_policy="reject") -> MultiplierSpec:
    """exp(tau D), i.e. the shift f(y) -> f(y - i*tau) for tau > 0.

    Assembled as cosh + (Nyquist-zeroed) sinh, so the algebra
    exp(+-tau D) = (1 -+ i T_tau) C_tau holds exactly at every grid
    wavenumber, including the unpaired Nyquist mode.
    """
    xi = grid.wavenumbers
    t = tau * xi
    # log(e^t) = t exactly, except the Nyquist mode loses its odd (sinh) half
    log_abs = t.astype(np.float64).copy()
    log_abs[grid.nyquist_mask] = _log_cosh(t[grid.nyquist_mask])
    phase = np.ones_like(xi, dtype=np.complex128)
    return _assemble(grid, log_abs, phase, overflow_policy)


def bracket_power(grid: Grid, s: float) -> MultiplierSpec:
    """<xi>^s = (1 + xi^2)^(s/2)."""
    xi = grid.wavenumbers
    return MultiplierSpec.from_values(grid, (1.0 + xi * xi) ** (0.5 * s))


def apply_multiplier(f: Field, m: MultiplierSpec) -> Field:
    """Return the field with spectral coefficients m(xi_k) * f_hat_k."""
    if m.grid != f.grid:
        raise ValueError("field and multiplier live on different grids")
    fh = f.hat
    mag = np.abs(fh)
    nz = mag > 0
    with np.errstate(divide="ignore", invalid="ignore"):
        tot = np.where(nz, m.log_abs + np.log(np.where(nz, mag, 1.0)), -np.inf)
    over = nz & (tot > _LOG_DBL_MAX)
    if over.any():
        if m.overflow_policy == "reject":
            k = int(np.argmax(np.where(over, tot, -np.inf)))
            raise MultiplierOverflowError(
                f"symbol overflow at xi={f.grid.wavenumbers[k]:.4g} "
                f"(log10 product ~ {tot[k] / np.log(10):.1f})")
        tot = np.minimum(tot, _LOG_SAFE)
    if np.all(np.isfinite(m.values)) and (not nz.any() or tot[nz].max() < _LOG_SAFE):
        out = m.values * fh
    else:
        unit = np.where(nz, fh / np.where(nz, mag, 1.0), 0.0)
        out = m.phase * unit * np.exp(np.where(nz, tot, -np.inf))
    return Field.from_hat(f.grid, out)


def exp_shift(f: Field, tau: float, overflow_policy="reject") -> Field:
    """exp(tau D) f; tau may be negative."""
    return apply_multiplier(f, exp_multiplier(f.grid, tau, overflow_policy))


# ---------------------------------------------------------------------------
# Spectral calculus


def derivative(f: Field, order: int) -> Field:
    """(i xi)^order in frequency; Nyquist zeroed for odd orders; order <= 4."""
    if not isinstance(order, (int, np.integer)) or order < 0:
        raise ValueError("order must be a nonnegative integer")
    if order > 4:
        raise ValueError("derivative supports order <= 4")
    if order == 0:
        return f
    return Field.from_hat(f.grid, _deriv_hat(f.grid, f.hat, order))


def _deriv_hat(grid: Grid, hat: np.ndarray, order: int) -> np.ndarray:
    sym = (1j * grid.wavenumbers) ** order
    if order % 2 == 1:
        sym = sym.copy()
        sym[grid.nyquist_mask] = 0.0
    return sym * hat


def dealias(f: Field) -> Field:
    """Two-thirds rule: zero all coefficients with |k| > N/3."""
    h = f.hat
    out = np.where(f.grid.dealias_mask, h, 0.0)
    if np.array_equal(out, h):
        return f
    return Field.from_hat(f.grid, out)


def antiderivative_from_zero(f: Field) -> Field:
    """F with F(0) = 0 and F' = f.

    The mean of f is carried as an explicit affine term mean*y (it has no
    periodic antiderivative); the zero-mean remainder is integrated
    spectrally.  The result is a pointwise object: feeding it back into
    spectral operators is only meaningful when the affine part is zero or the
    surrounding product decays at the grid edges.
    """
    g = f.grid
    hat = np.array(f.hat, copy=True)
    mean = hat[0] * g.dxi / SQRT_2PI  # = (1/2L) * integral f
    hat[0] = 0.0
    xi = g.wavenumbers
    with np.errstate(divide="ignore", invalid="ignore"):
        anti = np.where(xi != 0, hat / (1j * np.where(xi != 0, xi, 1.0)), 0.0)
    anti[g.nyquist_mask] = 0.0
    per = Field.from_hat(g, anti)
    n0 = g.n_points // 2  # node at y = 0
    samples = per.samples + mean * g.nodes - per.samples[n0]
    return Field._wrap(g, samples)


# ---------------------------------------------------------------------------
# Quadrature and serialization


def integrate(f: Field) -> complex:
    """Grid quadrature of f over one period (exact for band-limited f)."""
    return complex(np.sum(f.samples) * f.grid.dx)


def field_to_bytes(f: Field) -> bytes:
    """Interleaved re/im float64, little-endian, length 2N."""
    out = np.empty(2 * f.grid.n_points, dtype="<f8")
    out[0::2] = f.samples.real
    out[1::2] = f.samples.imag
    return out.tobytes()


def field_from_bytes(grid: Grid, raw: bytes) -> Field:
    arr = np.frombuffer(raw, dtype="<f8")
    if arr.size != 2 * grid.n_points:
        raise ValueError("byte payload length does not match grid")
    return Field._wrap(grid, arr[0::2] + 1j * arr[1::2])


def save_field(path, f: Field, t: float) -> None:
    """Write <path>.bin plus the {L, N, t} JSON sidecar <path>.json."""
    path = str(path)
    with open(path + ".bin", "wb") as fh:
        fh.write(field_to_bytes(f))
    with open(path + ".json", "w") as fh:
        json.dump({"L": f.grid.half_length, "N": f.grid.n_points, "t": t}, fh)


def load_field(path) -> tuple[Field, float]:
    path = str(path)
    with open(path + ".json") as fh:
        meta = json.load(fh)
    grid = Grid(meta["L"], meta["N"])
    with open(path + ".bin", "rb") as fh:
        f = field_from_bytes(grid, fh.read())
    return f, float(meta["t"])
