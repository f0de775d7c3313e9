"""Time integration of the regularized flattened system.

State is (U, W, c) where W is stored as a fixed analytic background
S_ref(y) = -sqrt(w_ref) tanh(sqrt(w_ref) y) plus a decaying correction V:
tanh is not periodic, so S_ref and its derivatives are evaluated in closed
form while only V passes through the FFT.

Evolution (frequency cutoff j, P = P_{<=j}, f_j = P f; j=None disables the
projection entirely and makes the sech weight in B equal to one):

    i U_t = P[ -i B U_{j,y} + U_{j,yy} + 2 i Im(W_j) U_{j,y} + mu |U_j|^2 U_j ]
    i W_t = P[ -i B W_{j,y} + W_{j,yy} + flux_y + 3 i Re(W_j) Im(W_j) W_j
               + 2 mu |U_j|^2 Re(W_j) ]
    c_t   = -Im W(c) - 3 int_0^c Re(W) Im(W)

with B = -3 sech(2^-j y) int_0^y Re(W_j) Im(W_j).

Two variants of the quadratic flux are provided:

    "derived":  flux_y = (2 W^2 - |W|^2)_y = 4 W W_y - conj(W) W_y - W conj(W)_y
    "printed":  flux_y = (2 W^2 - (1/2)|W|^2)_y

The derived coefficient is the one under which the exact tanh profile is
stationary; the 1/2 variant leaves a residual W W_y = w^{3/2} tanh sech^2
(peak ~ 0.385 w^{3/2}) and is kept runnable as a regression reference.

The analyticity radius shrinks linearly, tau(t) = tau0 (1 - (M/delta) t),
valid up to T_* = delta / (2 M) where tau = tau0/2.  M defaults to the
data-sized choice max(1, ||U0||^2 + ||W0||^2); it is a monitoring parameter,
not a stability constraint of the discrete scheme, and may be overridden.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .artifacts import RunArtifact, SolverAbort
from .coords import gauge_rhs, half_line_masses
from .lp import bump
from .norms import (
    NormParams,
    a_norm,
    h_norm,
    l2_norm,
    linf_norm,
    norm_report,
    smoothing_pairing,
)
from .spectral import (
    Field,
    Grid,
    MultiplierOverflowError,
    apply_multiplier,
    cosh_multiplier,
    derivative,
    exp_multiplier,
)
from .states import BreatherSpec, PerturbationSpec, breather_y_exact, perturbed_y_data

FLUX_VARIANTS = ("derived", "printed")


@dataclass(frozen=True)
class TauSchedule:
    """Linearly shrinking analyticity radius tau(t) = tau0 (1 - (M/delta) t)."""

    tau0: float
    big_m: float
    delta: float

    def __post_init__(self):
        if not (0.0 < self.tau0 <= 1.0):
            raise ValueError("tau0 must lie in (0, 1]")
        if self.big_m < 1.0:
            raise ValueError("M must be at least 1")
        if not (0.0 < self.delta < 1.0):
            raise ValueError("delta must lie in (0, 1)")

    @property
    def horizon(self) -> float:
        """T_* = delta / (2M); tau stays above tau0/2 on [0, T_*]."""
        return self.delta / (2.0 * self.big_m)

    def tau(self, t: float) -> float:
        if t < 0 or t > self.horizon * (1.0 + 1e-12):
            raise ValueError("t outside the schedule's validity window")
        return self.tau0 * (1.0 - (self.big_m / self.delta) * t)

    @property
    def tau_rate(self) -> float:
        return -self.tau0 * self.big_m / self.delta


@dataclass
class YState:
    """Solver state in flattened coordinates.

    W is reconstructed as s_ref + V; omega_ref pins the tanh background.
    """

    t: float
    U: Field
    V: Field
    c: float
    j: int | None
    mu: int
    omega_ref: float
    flux_variant: str = "derived"

    @property
    def grid(self) -> Grid:
        return self.U.grid

    def s_ref(self) -> np.ndarray:
        return _tanh_background(self.grid, self.omega_ref)[0]

    def W(self) -> Field:
        return Field._wrap(self.grid, self.s_ref() + self.V.samples)


def _tanh_background(grid: Grid, omega_ref: float):
    """(S, S', S'') of S(y) = -sqrt(w) tanh(sqrt(w) y), closed form."""
    rw = math.sqrt(omega_ref)
    y = grid.nodes
    th = np.tanh(rw * y)
    sech2 = 1.0 / np.cosh(rw * y) ** 2
    s = -rw * th
    s1 = -omega_ref * sech2
    s2 = 2.0 * omega_ref * rw * sech2 * th
    return (s.astype(np.complex128), s1.astype(np.complex128),
            s2.astype(np.complex128))


class _YKernel:
    """Array-level right-hand side with cached symbols for one (grid, j)."""

    def __init__(self, grid: Grid, j, mu: int, omega_ref: float,
                 flux_variant: str = "derived"):
        if flux_variant not in FLUX_VARIANTS:
            raise ValueError(f"flux_variant must be one of {FLUX_VARIANTS}")
        self.grid = grid
        self.j = j
        self.mu = mu
        self.flux_variant = flux_variant
        self.mask = grid.dealias_mask.astype(np.float64)
        ixi = 1j * grid.wavenumbers
        ixi[grid.nyquist_mask] = 0.0
        self.ixi = ixi
        self.xi_sq = -grid.wavenumbers**2
        if j is None:
            self.proj = np.ones(grid.n_points)
            self.sech_w = np.ones(grid.n_points)
        else:
            self.proj = bump(grid.wavenumbers / 2.0**j)
            self.sech_w = 1.0 / np.cosh(grid.nodes / 2.0**j)
        self.s0, self.s1, self.s2 = _tanh_background(grid, omega_ref)
        # the tanh background sits entirely below any admissible cutoff, so
        # P_{<=j} S_ref = S_ref to machine precision and only V is projected
        self.y = grid.nodes

    def _deal(self, arr):
        return np.fft.ifft(self.mask * np.fft.fft(arr))

    def _project(self, arr):
        return np.fft.ifft(self.proj * np.fft.fft(arr))

    def _ddy(self, arr):
        return np.fft.ifft(self.ixi * np.fft.fft(arr))

    def _antider(self, arr):
        # mean carried as an explicit affine term, F(0) = 0 at the center node
        h = np.fft.fft(arr)
        mean = h[0] / self.grid.n_points
        h[0] = 0.0
        with np.errstate(divide="ignore", invalid="ignore"):
            h = np.where(self.ixi != 0, h / np.where(self.ixi != 0, self.ixi, 1.0), 0.0)
        per = np.fft.ifft(h)
        n0 = self.grid.n_points // 2
        return per - per[n0] + mean * self.y

    def rhs(self, u: np.ndarray, v: np.ndarray, c: float):
        """Return (du, dv, dc)."""
        uj = self._project(u)
        vj = self._project(v)
        wj = self.s0 + vj
        alpha = wj.real
        beta = wj.imag

        uj_h = np.fft.fft(uj)
        uj_y = np.fft.ifft(self.ixi * uj_h)
        uj_yy = np.fft.ifft(self.xi_sq * uj_h)
        vj_h = np.fft.fft(vj)
        wj_y = self.s1 + np.fft.ifft(self.ixi * vj_h)
        wj_yy = self.s2 + np.fft.ifft(self.xi_sq * vj_h)

        ab = self._deal((alpha * beta).astype(np.complex128))
        big_b = self.sech_w * (-3.0 * self._antider(ab))

        # U equation
        absu2 = self._deal(uj * np.conj(uj))
        bru = (-1j) * self._deal(big_b * uj_y) \
            + uj_yy \
            + 2j * self._deal(beta.astype(np.complex128) * uj_y) \
            + self.mu * self._deal(absu2 * uj)
        du = -1j * self._project(bru)

        # W equation: quadratic flux via the product rule (W_y decays even
        # though W does not)
        half = 0.5 if self.flux_variant == "printed" else 1.0
        flux_y = 4.0 * self._deal(wj * wj_y) \
            - half * (self._deal(np.conj(wj) * wj_y) + self._deal(wj * np.conj(wj_y)))
        brw = (-1j) * self._deal(big_b * wj_y) \
            + wj_yy \
            + flux_y \
            + 3j * self._deal(ab * wj) \
            + 2.0 * self.mu * self._deal(absu2 * alpha.astype(np.complex128))
        dv = -1j * self._project(brw)

        # gauge ODE, using the same truncated W as the velocity
        wj_field = Field._wrap(self.grid, wj)
        dc = gauge_rhs(wj_field, c)
        return du, dv, dc

    def step(self, u, v, c, dt):
        k1 = self.rhs(u, v, c)
        k2 = self.rhs(u + 0.5 * dt * k1[0], v + 0.5 * dt * k1[1], c + 0.5 * dt * k1[2])
        k3 = self.rhs(u + 0.5 * dt * k2[0], v + 0.5 * dt * k2[1], c + 0.5 * dt * k2[2])
        k4 = self.rhs(u + dt * k3[0], v + dt * k3[1], c + dt * k3[2])
        u1 = u + (dt / 6.0) * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0])
        v1 = v + (dt / 6.0) * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1])
        c1 = c + (dt / 6.0) * (k1[2] + 2 * k2[2] + 2 * k3[2] + k4[2])
        return u1, v1, c1

    def step_if(self, u, v, c, dt):
        """Integrating-factor (Lawson) variant: the linear dispersion symbol
        is advanced exactly, the remainder by the same fourth-order stages."""
        lam = 1j * (self.proj**2) * (-self.xi_sq)  # note xi_sq = -(xi^2)
        e1 = np.exp(0.5 * dt * lam)
        e2 = e1 * e1

        def nl(uu, vv, cc):
            du, dv, dc = self.rhs(uu, vv, cc)
            # remove the exactly-integrated linear part
            du -= np.fft.ifft(lam * np.fft.fft(uu))
            dv -= np.fft.ifft(lam * np.fft.fft(vv))
            return du, dv, dc

        def efold(arr, e):
            return np.fft.ifft(e * np.fft.fft(arr))

        k1 = nl(u, v, c)
        u_a = efold(u + 0.5 * dt * k1[0], e1)
        v_a = efold(v + 0.5 * dt * k1[1], e1)
        k2 = nl(u_a, v_a, c + 0.5 * dt * k1[2])
        u_b = efold(u, e1) + 0.5 * dt * k2[0]
        v_b = efold(v, e1) + 0.5 * dt * k2[1]
        k3 = nl(u_b, v_b, c + 0.5 * dt * k2[2])
        u_c = efold(u, e2) + dt * efold(k3[0], e1)
        v_c = efold(v, e2) + dt * efold(k3[1], e1)
        k4 = nl(u_c, v_c, c + dt * k3[2])
        u1 = efold(u, e2) + (dt / 6.0) * (
            efold(k1[0], e2) + 2 * efold(k2[0] + k3[0], e1) + k4[0])
        v1 = efold(v, e2) + (dt / 6.0) * (
            efold(k1[1], e2) + 2 * efold(k2[1] + k3[1], e1) + k4[1])
        c1 = c + (dt / 6.0) * (k1[2] + 2 * k2[2] + 2 * k3[2] + k4[2])
        return u1, v1, c1


def rhs_y(state: YState):
    """(dU, dV, dc) of the regularized system at the given state."""
    kern = _YKernel(state.grid, state.j, state.mu, state.omega_ref,
                    state.flux_variant)
    du, dv, dc = kern.rhs(state.U.samples, state.V.samples, state.c)
    return Field._wrap(state.grid, du), Field._wrap(state.grid, dv), dc


def step_y(state: YState, dt: float, sched: TauSchedule,
           method: str = "rk4") -> YState:
    """Advance one step; refuses to step past the schedule horizon."""
    if state.t + dt > sched.horizon * (1.0 + 1e-12):
        raise ValueError("step exceeds the tau-schedule horizon T_*")
    kern = _YKernel(state.grid, state.j, state.mu, state.omega_ref,
                    state.flux_variant)
    stepper = kern.step_if if method == "ifrk4" else kern.step
    u1, v1, c1 = stepper(state.U.samples, state.V.samples, state.c, dt)
    if not (np.all(np.isfinite(u1)) and np.all(np.isfinite(v1))):
        raise SolverAbort(f"non-finite state at t = {state.t + dt:.6g}")
    return replace(state, t=state.t + dt,
                   U=Field._wrap(state.grid, u1),
                   V=Field._wrap(state.grid, v1), c=c1)


# ---------------------------------------------------------------------------
# configured runs


DIAG_COLUMNS = ("t", "c", "half_mass_left", "half_mass_right", "min_abs_u",
                "utow_residual", "v_edge", "ct_u_l2_sq", "rhs_pairing")


def default_y_half_length(omega: float) -> float:
    # wide enough that the sech tail (and its periodization seam) sits below
    # every working tolerance: |U| ~ exp(-20) ~ 4e-9 at the edge
    return 20.0 / math.sqrt(omega)


def stable_dt_y(grid: Grid) -> float:
    # fourth-order explicit stages tolerate |lambda| dt <~ 2.8 on the
    # imaginary axis; lambda_max = xi_max^2
    return 2.5 / grid.xi_max**2


def build_initial_y_data(config: dict, grid: Grid):
    data = config.get("data", {})
    spec = BreatherSpec(omega=data.get("omega", 1.0),
                        theta=data.get("theta", 0.0),
                        mu=config.get("mu", 1))
    pert = data.get("perturbation")
    if pert and pert.get("a", 0.0) != 0.0:
        U0, W0 = perturbed_y_data(
            spec, PerturbationSpec(amplitude=pert["a"], width=pert["w"]), grid)
    else:
        U0, W0 = breather_y_exact(0.0, spec, grid)
    return U0, W0, spec


def split_w(W0: Field, omega_ref: float = None):
    """Split W into the tanh background and the decaying correction V."""
    if omega_ref is None:
        omega_ref = float(np.max(np.abs(W0.samples))) ** 2
    s0 = _tanh_background(W0.grid, omega_ref)[0]
    return Field._wrap(W0.grid, W0.samples - s0), omega_ref


def analytic_w_norm(state: YState, params: NormParams) -> float:
    """||W||_{AZ^s_tau} with the background shifted in closed form.

    exp(+-tau D) of the tanh part is tanh(sqrt(w)(y -+ i tau)), valid for
    tau < pi/(2 sqrt(w_ref)); only V goes through the spectral shift.
    """
    grid = state.grid
    rw = math.sqrt(state.omega_ref)
    if params.tau >= 0.95 * math.pi / (2.0 * rw):
        raise MultiplierOverflowError(
            "tau too close to the tanh background's strip radius")
    total = 0.0
    for sign in (+1.0, -1.0):
        shift = grid.nodes - 1j * sign * params.tau
        s_shift = -rw * np.tanh(rw * shift)
        s1_shift = -state.omega_ref / np.cosh(rw * shift) ** 2
        em = exp_multiplier(grid, sign * params.tau)
        v_shift = apply_multiplier(state.V, em).samples
        v1_shift = apply_multiplier(derivative(state.V, 1), em).samples
        w_shift = Field._wrap(grid, s_shift + v_shift)
        w1_shift = Field._wrap(grid, s1_shift + v1_shift)
        total += linf_norm(w_shift) + h_norm(w1_shift, params.s - 0.5)
    return total


def run_y(config: dict, out_dir) -> RunArtifact:
    """Integrate the flattened system, tracking norms and transport invariants.

    Per-slice records: the gauge point c, both half-line masses of |U|, the
    minimum interior modulus, the sup-norm residual of W - conj(U)U_y/|U|^2
    on the resolved interior, the edge magnitude of V, and the pair
    (||C_tau U||_{L^2}^2, Re<C_tau dU, C_tau U>) feeding the shrink-rate
    energy identity.
    """
    data = config.get("data", {})
    omega = data.get("omega", 1.0)
    n = config["N"]
    L = config.get("L") or default_y_half_length(omega)
    grid = Grid(L, n)
    U0, W0, spec = build_initial_y_data(config, grid)
    V0, omega_ref = split_w(W0)

    j = config.get("j", 8)
    mu = config.get("mu", 1)
    flux_variant = config.get("flux_variant", "derived")
    s = config.get("s", 0.5)
    tau0 = config.get("tau0", 0.4)
    delta = config.get("delta", 0.05)

    state = YState(0.0, U0, V0, 0.0, j, mu, omega_ref, flux_variant)

    big_m = config.get("M")
    if big_m is None:
        p0 = NormParams(s, tau0)
        big_m = max(1.0, a_norm(U0, "h", p0) ** 2
                    + analytic_w_norm(state, p0) ** 2)
    sched = TauSchedule(tau0, float(big_m), delta)

    T = config["T"]
    if T > sched.horizon * (1.0 + 1e-12):
        raise ValueError(
            f"T = {T} exceeds the schedule horizon T_* = {sched.horizon:.4g}; "
            "override M or delta if a longer monitored window is wanted")
    dt = config.get("dt") or min(stable_dt_y(grid), T / 16.0)
    steps = max(1, int(round(T / dt)))
    dt = T / steps
    snap_stride = config.get("snapshot_stride") or max(1, steps // 4)
    norm_stride = config.get("norm_stride", 1)

    art = RunArtifact(out_dir, config)
    diag = art.csv("diagnostics", DIAG_COLUMNS)
    norms_csv = art.csv("norms", ("t", "h_s", "z_s", "ah_s_tau", "az_s_tau",
                                  "l_inf", "smoothing_pairing"))

    kern = _YKernel(grid, j, mu, omega_ref, flux_variant)
    method = config.get("method", "rk4")
    stepper = kern.step_if if method == "ifrk4" else kern.step

    def record(st: YState):
        tau_t = sched.tau(st.t)
        params = NormParams(s, tau_t)
        W = st.W()
        # transported-identity residual on the resolved interior: where the
        # modulus sits above the differentiation noise floor
        Uy = derivative(st.U, 1).samples
        mod = np.abs(st.U.samples)
        interior = mod >= 1e-5 * float(np.max(mod))
        mod2 = mod**2
        floor = (1e-13 * float(np.max(mod))) ** 2
        ratio = np.conj(st.U.samples) * Uy / np.maximum(mod2, floor)
        utow = float(np.max(np.abs((W.samples - ratio)[interior])))
        left, right = half_line_masses(st.U, st.c)
        v_edge = float(max(abs(st.V.samples[0]), abs(st.V.samples[-1])))
        ct = cosh_multiplier(grid, tau_t)
        ctu = apply_multiplier(st.U, ct)
        du, dv, dc = kern.rhs(st.U.samples, st.V.samples, st.c)
        ct_du = apply_multiplier(Field._wrap(grid, du), ct)
        rhs_pair = float(np.sum((ct_du.samples * np.conj(ctu.samples)).real)
                         * grid.dx)
        diag.writerow([
            st.t, st.c, left, right,
            float(np.min(mod[interior])), utow, v_edge,
            l2_norm(ctu) ** 2, rhs_pair,
        ])
        try:
            az = analytic_w_norm(st, params)
        except MultiplierOverflowError:
            az = math.inf
        rep = norm_report(st.U, params, t=st.t)
        norms_csv.writerow([
            st.t, rep.h_s,
            linf_norm(W) + h_norm(derivative(st.V, 1) + Field._wrap(grid, kern.s1), params.s - 0.5),
            rep.ah_s_tau, az, rep.l_inf, rep.smoothing_pairing,
        ])

    u, v, c = U0.samples, V0.samples, 0.0
    try:
        record(state)
        art.save_snapshot(state.U, 0.0)
        art.save_snapshot(state.W(), 0.0, suffix="_w")
        art.bump_snapshot_index()
        for i in range(1, steps + 1):
            u, v, c = stepper(u, v, c, dt)
            t = i * dt
            if not (np.all(np.isfinite(u)) and np.all(np.isfinite(v))):
                raise SolverAbort(f"non-finite state at t = {t:.6g}")
            state = replace(state, t=t, U=Field._wrap(grid, u.copy()),
                            V=Field._wrap(grid, v.copy()), c=c)
            if i % norm_stride == 0 or i == steps:
                record(state)
            if i % snap_stride == 0 or i == steps:
                art.save_snapshot(state.U, t)
                art.save_snapshot(state.W(), t, suffix="_w")
                art.bump_snapshot_index()
    except SolverAbort:
        art.finalize(completed=False, n_steps=steps, dt=dt,
                     schedule={"tau0": tau0, "M": big_m, "delta": delta})
        raise
    art.finalize(completed=True, n_steps=steps, dt=dt,
                 schedule={"tau0": tau0, "M": big_m, "delta": delta,
                           "horizon": sched.horizon})
    return art
