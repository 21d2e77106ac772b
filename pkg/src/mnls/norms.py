"""Computable versions of the norm zoo and the time-weighted diagnostics.

Everything here is defined directly on the unitary coefficients fixed in
:mod:`mnls.field`.  The Hermite-Sobolev norm is realized through a smooth
spectral multiplier (equivalent to the dyadic definition, exactly
diagonal in this basis); all cross-paper claims therefore use trends and
ratios, never absolute constants.
"""

from dataclasses import dataclass

import numpy as np

from .field import apply_z_bessel, band_edge_mass, multiply_z, BAND_MARGIN

__all__ = [
    "NormConfig",
    "sigma_x_norm",
    "sigma0_norm",
    "z_norm",
    "s_norm",
    "s_plus_norm",
    "mass",
    "level_energy",
    "angular_momentum",
    "time_weighted_sup",
]


@dataclass(frozen=True)
class NormConfig:
    """Parameters of the norm family.

    s_sigma is the Hermite-Sobolev exponent of the S-norm (default 7, the
    regularity the long-time estimates assume; drop to 2 for fast tests).
    delta is the time-weight exponent; the theory takes 0 < delta < 1e-4
    and 1e-4 itself is accepted as the boundary default.
    """

    s_sigma: float = 7.0
    delta: float = 1e-4

    def __post_init__(self):
        if self.s_sigma < 0:
            raise ValueError(f"s_sigma must be >= 0, got {self.s_sigma}")
        if not 0.0 < self.delta <= 1e-4:
            raise ValueError(f"delta must be in (0, 1e-4], got {self.delta}")


def _lambda_levels(n_max):
    """lambda_n = (n + 1) / 2 for n = 0..n_max."""
    return 0.5 * (np.arange(n_max + 1) + 1.0)


def _level_mass(workspace, coeffs):
    """Mass per H0 level; coeffs shaped (n_modes,) or (n_modes, n_z)."""
    mags = np.abs(coeffs) ** 2
    if mags.ndim == 2:
        mags = mags.sum(axis=1)
    out = np.zeros(workspace.n_max + 1)
    np.add.at(out, workspace.levels, mags)
    return out


def sigma_x_norm(workspace, coeffs, s):
    """Sigma_x^s norm of a 2D slice: (sum_n lambda_n^s ||u_n||^2)^(1/2)."""
    lam = _lambda_levels(workspace.n_max)
    return float(np.sqrt(np.sum(lam ** s * _level_mass(workspace, coeffs))))


def sigma0_norm(f, s):
    """Hermite-Sobolev norm via the multiplier (1 + 2 lambda_n + zeta^2)^(s/2).

    Equivalent (not equal) to the dyadic Littlewood-Paley definition.
    """
    lam = 0.5 * (f.workspace.levels + 1.0)
    w = (1.0 + 2.0 * lam[:, None] + f.zgrid.zeta[None, :] ** 2) ** (0.5 * s)
    return float(np.linalg.norm(w * f.coeffs))


def z_norm(f):
    """sup over zeta of (1+|zeta|^2)^2 sum_p (1+p) ||F_p(., zeta)||^2, rooted.

    Discrete convention: the unitary coefficient slices stand in for
    F_hat(., zeta_k); comparisons are always made on a fixed grid.
    """
    lev_w = (1.0 + f.workspace.levels.astype(float))[:, None]
    per_slice = np.sum(lev_w * np.abs(f.coeffs) ** 2, axis=0)
    weight = (1.0 + f.zgrid.zeta ** 2) ** 2
    return float(np.sqrt(np.max(weight * per_slice)))


def s_norm(f, cfg=None):
    """||F||_S = ||F||_{Sigma_0^N} + ||z F||_{L2} with N = cfg.s_sigma."""
    cfg = cfg or NormConfig()
    zf = multiply_z(f, warn=False)
    return sigma0_norm(f, cfg.s_sigma) + zf.l2_norm()


def s_plus_norm(f, cfg=None):
    """||F||_{S+} = ||F||_S + ||(1 - dz^2)^4 F||_S + ||z F||_S."""
    cfg = cfg or NormConfig()
    return (s_norm(f, cfg)
            + s_norm(apply_z_bessel(f, order=4), cfg)
            + s_norm(multiply_z(f, warn=False), cfg))


def band_margin_ok(f):
    """Quality gate for the z-multiplication entering S and S+."""
    return band_edge_mass(f) <= BAND_MARGIN


def mass(f):
    """||F||_{L2}^2, the conserved mass of all three flows."""
    return f.mass()


def level_energy(f):
    """sum_n lambda_n ||Pi_n F||^2, conserved by the resonant flows."""
    lam = _lambda_levels(f.workspace.n_max)
    return float(np.sum(lam * _level_mass(f.workspace, f.coeffs)))


def angular_momentum(f):
    """<L F, F> = sum over modes of (n1 - n2)/2 |c|^2."""
    w = f.workspace.eig_l[:, None]
    return float(np.sum(w * np.abs(f.coeffs) ** 2))


def time_weighted_sup(series, weight="x_t", delta=1e-4, t_split=None):
    """Diagnostic sup patterned on the X_T / Y_T space-time norms.

    sup over recorded times of

        Z(t) + (1+|t|)^{-delta} S(t) + (1+|t|)^{1-3 delta} ||dF/dt||_S

    where the time derivative is the central-difference surrogate the
    series carries (column ``ddt_s``, built from snapshot fields).
    weight selects the window: "x_t" takes t <= t_split, "y_t" t >= t_split
    (default: the whole series / t >= 1).
    """
    t = np.asarray(series.column("t"))
    if t.size < 3:
        raise ValueError("time_weighted_sup needs at least 3 snapshots")
    z = np.asarray(series.column("z"))
    s = np.asarray(series.column("s_norm"))
    ddt = np.asarray(series.column("ddt_s"))
    if weight == "x_t":
        sel = t <= (t_split if t_split is not None else t[-1])
    elif weight == "y_t":
        sel = t >= (t_split if t_split is not None else 1.0)
    else:
        raise ValueError(f"weight must be x_t or y_t, got {weight!r}")
    if not np.any(sel):
        raise ValueError("empty time window")
    tt = t[sel]
    vals = (z[sel]
            + (1.0 + np.abs(tt)) ** (-delta) * s[sel]
            + (1.0 + np.abs(tt)) ** (1.0 - 3.0 * delta) * ddt[sel])
    return float(np.max(vals))
