"""Time integrators for the three flows.

Models and the state each one evolves:

* ``eps_nls``:  i dpsi/dt = D^eps psi + lam |psi|^2 psi.  Strang splitting
  evolves the physical field psi (both substeps are exact maps); the
  profile integrator evolves U(t) = e^{i t D^eps} psi(t) with a classical
  4-stage one-step method on i dU/dt = lam N^t[U, U, U].
* ``limit_nls``: the profile W of the averaged model,
  i dW/dt = lam N_0^t[W, W, W]; the physical field is recovered by one
  exact free-z propagation, phi(t) = e^{i t dz^2/2} W(t).
* ``full_resonant``: i dG/dt = lam R[G, G, G], slice-decoupled in zeta.

Step sizes are gated by hard bounds (reproducibility beats adaptivity at
this scale): Strang needs dt <= eps^2/4, the profile method needs the
fastest retained oscillation resolved, the resonant flows need dt <= 0.1.
"""

from dataclasses import dataclass, field as dc_field, asdict

import numpy as np

from .diagnostics import DiagnosticsSeries, config_hash
from .errors import ConfigError, NumericsError
from .field import SpectralField, ZGrid, propagate, to_grid, to_spectral
from .nonlinear import ThetaRule, f_av, fr_rhs, full_nonlinearity, partial_resonant
from . import norms as norms_mod

__all__ = [
    "SimConfig",
    "Trajectory",
    "initial_data",
    "step_strang_eps",
    "step_profile_rk4",
    "step_limit",
    "step_fr",
    "run",
]

MODELS = ("eps_nls", "limit_nls", "full_resonant")
INTEGRATORS = ("strang", "profile_rk4")
LIMIT_DT_BOUND = 0.1


def profile_dt_bound(eps, n_max):
    """Resolve the fastest retained oscillation, rate 2 n_max / (2 eps^2)."""
    return 2.0 * np.pi * eps**2 / (8.0 * (2 * n_max + 1))


@dataclass
class SimConfig:
    """All run parameters; validated against the stiffness policy."""

    model: str = "limit_nls"
    eps: float = 0.2
    lam: float = 1.0
    alpha: float = 0.1
    n_max: int = 2
    m_quad: int = 0           # 0 means the minimum, 2 n_max + 2
    n_z: int = 32
    l_z: float = 32.0
    dt: float = 0.05
    t_end: float = 1.0
    integrator: str = "strang"
    theta_k: int = 0          # 0 means the minimum exact rule, 2 n_max + 1
    stride: int = 1
    seed: int = 0

    def __post_init__(self):
        if self.m_quad == 0:
            self.m_quad = 2 * self.n_max + 2
        if self.theta_k == 0:
            self.theta_k = 2 * self.n_max + 1

    def validate(self):
        if self.model not in MODELS:
            raise ConfigError(f"unknown model {self.model!r}")
        if self.integrator not in INTEGRATORS:
            raise ConfigError(f"unknown integrator {self.integrator!r}")
        if self.lam not in (-1.0, 0.0, 1.0):
            raise ConfigError(f"lam must be -1, 0 or +1, got {self.lam}")
        if not 0.0 < self.eps <= 1.0:
            raise ConfigError(f"eps must be in (0, 1], got {self.eps}")
        if self.dt <= 0 or self.t_end < 0:
            raise ConfigError("dt must be > 0 and t_end >= 0")
        if self.stride < 1:
            raise ConfigError("stride must be >= 1")
        if self.theta_k < 2 * self.n_max + 1:
            raise ConfigError(
                f"theta_k={self.theta_k} below the exact-rule threshold "
                f"{2 * self.n_max + 1}")
        if self.model == "eps_nls" and self.integrator == "strang":
            bound = self.eps**2 / 4.0
            if self.dt > bound * (1.0 + 1e-12):
                raise ConfigError(
                    f"dt={self.dt} exceeds the Strang stiffness bound "
                    f"eps^2/4 = {bound:.3e}")
        elif self.model == "eps_nls":
            bound = profile_dt_bound(self.eps, self.n_max)
            if self.dt > bound * (1.0 + 1e-12):
                raise ConfigError(
                    f"dt={self.dt} exceeds the profile oscillation bound "
                    f"{bound:.3e}")
        else:
            if self.dt > LIMIT_DT_BOUND * (1.0 + 1e-12):
                raise ConfigError(
                    f"dt={self.dt} exceeds the resonant-flow bound "
                    f"{LIMIT_DT_BOUND}")
        steps = round(self.t_end / self.dt) if self.t_end > 0 else 0
        if abs(steps * self.dt - self.t_end) > 1e-9 * max(1.0, self.t_end):
            raise ConfigError(
                f"t_end={self.t_end} is not an integer number of steps of "
                f"dt={self.dt}")
        return steps

    def as_mapping(self):
        return {k: v for k, v in asdict(self).items()}

    def hash(self):
        return config_hash(self.as_mapping())


@dataclass
class Trajectory:
    """Snapshots at stride times plus the diagnostics series."""

    times: list
    snapshots: list
    series: DiagnosticsSeries = dc_field(default=None)

    def final(self):
        return self.snapshots[-1]

    def at_time(self, t):
        i = int(np.argmin(np.abs(np.asarray(self.times) - t)))
        if abs(self.times[i] - t) > 1e-9 * max(1.0, abs(t)):
            raise KeyError(f"no snapshot at t={t}")
        return self.snapshots[i]


def initial_data(workspace, zgrid, alpha, z_width=1.0, excited=None):
    """Separable Gaussian data: alpha * h00(x) * exp(-z^2 / (2 w^2)), levels
    optionally admixed, normalized so the L2 norm equals alpha exactly."""
    profile = np.exp(-0.5 * (zgrid.points / z_width) ** 2)
    zc = zgrid.coeffs_from_samples(profile)
    zc /= np.linalg.norm(zc)
    coeffs = np.zeros((workspace.n_modes, zgrid.n_z), dtype=complex)
    coeffs[workspace.mode_index((0, 0))] = zc
    for (mode, amp) in (excited or []):
        coeffs[workspace.mode_index(tuple(mode))] += amp * zc
    f = SpectralField(workspace, zgrid, coeffs)
    return f * (alpha / f.l2_norm())


def step_strang_eps(psi, dt, eps, lam):
    """One Strang step of eps-NLS: exact half linear phase, exact pointwise
    nonlinear rotation psi -> exp(-i lam |psi|^2 dt) psi, exact half phase."""
    if dt > eps**2 / 4.0 * (1.0 + 1e-12):
        raise ConfigError(f"dt={dt} exceeds the Strang bound eps^2/4={eps**2/4:.3e}")
    half = propagate(psi, -0.5 * dt, "d_eps", eps)
    if lam != 0.0:
        g = to_grid(half)
        g.values *= np.exp(-1j * lam * dt * np.abs(g.values) ** 2)
        half = to_spectral(g)
    return propagate(half, -0.5 * dt, "d_eps", eps)


def _rk4(state, t, dt, rhs):
    k1 = rhs(t, state)
    k2 = rhs(t + 0.5 * dt, state + (0.5 * dt) * k1)
    k3 = rhs(t + 0.5 * dt, state + (0.5 * dt) * k2)
    k4 = rhs(t + dt, state + dt * k3)
    return state + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def step_profile_rk4(u, t, dt, eps, lam):
    """One RK4 step on the profile equation i dU/dt = lam N^t[U, U, U]."""
    bound = profile_dt_bound(eps, u.workspace.n_max)
    if dt > bound * (1.0 + 1e-12):
        raise ConfigError(
            f"dt={dt} exceeds the oscillation-resolution bound {bound:.3e}")
    if lam == 0.0:
        return u.copy()

    def rhs(s, v):
        return (-1j * lam) * full_nonlinearity(v, v, v, s, eps)

    return _rk4(u, t, dt, rhs)


def step_limit(w, t, dt, lam, rule=None):
    """One RK4 step on the averaged profile equation i dW/dt = lam N_0^t[W]."""
    if dt > LIMIT_DT_BOUND * (1.0 + 1e-12):
        raise ConfigError(f"dt={dt} exceeds the resonant-flow bound {LIMIT_DT_BOUND}")
    if lam == 0.0:
        return w.copy()

    def rhs(s, v):
        return (-1j * lam) * partial_resonant(v, v, v, s)

    return _rk4(w, t, dt, rhs)


def step_fr(g, dt, lam, rule=None):
    """One RK4 step on the autonomous full-resonant system i dG/dt = lam R[G]."""
    if dt > LIMIT_DT_BOUND * (1.0 + 1e-12):
        raise ConfigError(f"dt={dt} exceeds the resonant-flow bound {LIMIT_DT_BOUND}")
    if lam == 0.0:
        return g.copy()

    def rhs(s, v):
        return (-1j * lam) * fr_rhs(v, rule=rule)

    return _rk4(g, 0.0, dt, rhs)


def _make_stepper(config):
    if config.model == "eps_nls":
        if config.integrator == "strang":
            return lambda f, t: step_strang_eps(f, config.dt, config.eps, config.lam)
        return lambda f, t: step_profile_rk4(f, t, config.dt, config.eps, config.lam)
    if config.model == "limit_nls":
        return lambda f, t: step_limit(f, t, config.dt, config.lam)
    return lambda f, t: step_fr(f, config.dt, config.lam)


def run(config, initial, norm_config=None):
    """Integrate one model; returns the Trajectory with diagnostics.

    For eps_nls/strang the recorded state is the physical field psi; for
    eps_nls/profile_rk4 it is the profile U; for the other models the
    profile W or G.  Deterministic for a fixed config (fixed-order
    reductions throughout); aborts with NumericsError on NaN/Inf.
    """
    steps = config.validate()
    ws, zg = initial.workspace, initial.zgrid
    if ws.n_max != config.n_max or ws.m_quad != config.m_quad:
        raise ConfigError("initial data workspace does not match the config")
    if zg.n_z != config.n_z or abs(zg.l_z - config.l_z) > 1e-12:
        raise ConfigError("initial data z-grid does not match the config")
    ncfg = norm_config or norms_mod.NormConfig()

    stepper = _make_stepper(config)
    times = [0.0]
    snapshots = [initial.copy()]
    f = initial.copy()
    for i in range(steps):
        f = stepper(f, i * config.dt)
        if not f.is_finite():
            raise NumericsError(
                f"non-finite field after step {i + 1} (t={(i + 1) * config.dt})",
                step_index=i + 1)
        if (i + 1) % config.stride == 0:
            times.append((i + 1) * config.dt)
            snapshots.append(f.copy())

    series = _diagnose(times, snapshots, config, ncfg)
    return Trajectory(times=times, snapshots=snapshots, series=series)


def _diagnose(times, snapshots, config, ncfg):
    series = DiagnosticsSeries(meta={
        "config_hash": config.hash(),
        "model": config.model,
    })
    ddt = _ddt_s_surrogate(times, snapshots, ncfg)
    for i, (t, f) in enumerate(zip(times, snapshots)):
        flagged = 0.0 if norms_mod.band_margin_ok(f) else 1.0
        series.append_row(
            t=t,
            l2=f.l2_norm(),
            sigma0_s=norms_mod.sigma0_norm(f, ncfg.s_sigma),
            z=norms_mod.z_norm(f),
            s_norm=norms_mod.s_norm(f, ncfg),
            s_plus=norms_mod.s_plus_norm(f, ncfg),
            mass=norms_mod.mass(f),
            level_energy=norms_mod.level_energy(f),
            ang_momentum=norms_mod.angular_momentum(f),
            xT_diag=np.nan,
            flags=flagged,
            _ddt_s=ddt[i],
        )
    # Running X_T-style sup becomes well-defined once central differences exist.
    if len(times) >= 3:
        xt = series.columns["xT_diag"]
        for i in range(2, len(times)):
            window = DiagnosticsSeries({
                "t": series.columns["t"][: i + 1],
                "z": series.columns["z"][: i + 1],
                "s_norm": series.columns["s_norm"][: i + 1],
                "_ddt_s": series.columns["_ddt_s"][: i + 1],
            })
            xt[i] = norms_mod.time_weighted_sup(window, "x_t", ncfg.delta)
    return series


def _ddt_s_surrogate(times, snapshots, ncfg):
    """S-norm of the central-difference time derivative of the snapshots."""
    n = len(times)
    out = np.zeros(n)
    for i in range(n):
        if 0 < i < n - 1:
            lo, hi = i - 1, i + 1
        elif n >= 2:
            lo, hi = (0, 1) if i == 0 else (n - 2, n - 1)
        else:
            continue
        span = times[hi] - times[lo]
        if span <= 0:
            continue
        diff = snapshots[hi] - snapshots[lo]
        out[i] = norms_mod.s_norm(diff * (1.0 / span), ncfg)
    return out
