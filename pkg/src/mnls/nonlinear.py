"""Trilinear forms: the oscillatory cubic term, its theta-average, and the
resonant right-hand sides.

All forms reduce to one primitive, :func:`cubic_pointwise`, the Galerkin
projection of F * conj(G) * H (the conjugation sits on the middle slot
throughout the package).  Products are formed on the product quadrature
grid in x (exact for quartic mode products) and on a 2x zero-padded grid
in z (cubic products triple the bandwidth; images of the padded band land
outside the retained band, so the truncated result is alias-free).

The theta-average uses the level grading: inputs are rotated by
exp(-i theta n) per level n, outputs by exp(+i theta n).  A surviving
quadruple of levels (p, q, r, s) then carries the integer phase
omega = p - q + r - s with |omega| <= 2 n_max, so the K-point equispaced
rule is exact exactly when K >= 2 n_max + 1 and fails one point below.
On the truncated span this average equals the continuum resonant
extraction (the Gamma_0 sum), which `resonant_sum_oracle` computes the
slow way.
"""

from dataclasses import dataclass, field as dc_field

import numpy as np

from .errors import ThetaRuleError
from .field import SpectralField, _check_shared, propagate, project_level

__all__ = [
    "resonant_quadruples",
    "ThetaRule",
    "cubic_pointwise",
    "full_nonlinearity",
    "f_av",
    "resonant_sum_oracle",
    "partial_resonant",
    "fr_rhs",
]


def resonant_quadruples(n_max, omega=0):
    """All level quadruples (p, q, r, s) in [0, n_max]^4 with p-q+r-s = omega."""
    out = []
    for q in range(n_max + 1):
        for r in range(n_max + 1):
            for s in range(n_max + 1):
                p = omega + q - r + s
                if 0 <= p <= n_max:
                    out.append((p, q, r, s))
    return out


@dataclass(frozen=True)
class ThetaRule:
    """Equispaced rule for the x-rotation average: theta_m = 2 pi m / K."""

    k: int

    def __post_init__(self):
        if self.k < 1:
            raise ValueError(f"theta rule needs k >= 1, got {self.k}")

    @classmethod
    def exact(cls, n_max):
        """Minimal rule annihilating every reachable phase: K = 2 n_max + 1."""
        return cls(2 * n_max + 1)

    def is_exact_for(self, n_max):
        return self.k >= 2 * n_max + 1

    @property
    def angles(self):
        return 2.0 * np.pi * np.arange(self.k) / self.k


def _pad_z(coeffs, n_z):
    """Insert zeros between the two half-bands (FFT order), n_z -> 2 n_z."""
    half = n_z // 2
    out = np.zeros((coeffs.shape[0], 2 * n_z), dtype=complex)
    out[:, :half] = coeffs[:, :half]
    out[:, 2 * n_z - (n_z - half):] = coeffs[:, half:]
    return out


def _truncate_z(coeffs, n_z):
    half = n_z // 2
    out = np.empty((coeffs.shape[0], n_z), dtype=complex)
    out[:, :half] = coeffs[:, :half]
    out[:, half:] = coeffs[:, 2 * n_z - (n_z - half):]
    return out


def _parity(n):
    k = np.rint(np.fft.fftfreq(n) * n).astype(int)
    return np.where(k % 2 == 0, 1.0, -1.0)


def _padded_samples(f):
    """Samples on (product x-grid, 2x fine z-grid)."""
    ws, zg = f.workspace, f.zgrid
    vals_x = ws.prod_synthesis.T @ f.coeffs
    padded = _pad_z(vals_x, zg.n_z)
    n2 = 2 * zg.n_z
    return (n2 / np.sqrt(zg.l_z)) * np.fft.ifft(padded * _parity(n2)[None, :], axis=1)


def _project_padded(samples, workspace, zgrid):
    n2 = 2 * zgrid.n_z
    coeffs_z = (np.sqrt(zgrid.l_z) / n2) * _parity(n2)[None, :] * np.fft.fft(samples, axis=1)
    coeffs_z = _truncate_z(coeffs_z, zgrid.n_z)
    coeffs = (workspace.prod_synthesis.conj() * workspace.prod_weights) @ coeffs_z
    return SpectralField(workspace, zgrid, coeffs)


def cubic_pointwise(f, g, h):
    """Galerkin projection of F * conj(G) * H (conjugation on the middle slot)."""
    _check_shared(f, g)
    _check_shared(f, h)
    prod = _padded_samples(f) * np.conj(_padded_samples(g)) * _padded_samples(h)
    return _project_padded(prod, f.workspace, f.zgrid)


def full_nonlinearity(f, g, h, t, eps, generator="d_eps"):
    """The oscillatory trilinear form N^{t,eps}[F, G, H].

    Propagates each argument by exp(-i t D) with D = d_eps (or d0_eps,
    which gives the same result: the two differ by a rotation that
    pointwise products commute with), applies `cubic_pointwise` (whose
    middle-slot conjugation conjugates that flow), and propagates back.
    """
    if eps is None or not eps > 0:
        raise ValueError(f"full_nonlinearity requires eps > 0, got {eps}")
    if generator not in ("d_eps", "d0_eps"):
        raise ValueError(f"generator must be d_eps or d0_eps, got {generator!r}")
    back = propagate(
        cubic_pointwise(
            propagate(f, -t, generator, eps),
            propagate(g, -t, generator, eps),
            propagate(h, -t, generator, eps),
        ),
        t, generator, eps,
    )
    return back


def _theta_average(trilinear, f, g, h, rule):
    """(1/K) sum_m e^{+i theta_m n} T(e^{-i theta_m n} F, ..., ...).

    Level-graded rotation phases; fixed-order accumulation for bitwise
    reproducibility.
    """
    lev = f.workspace.levels.astype(float)[:, None]
    acc = np.zeros_like(f.coeffs)
    for theta in rule.angles:
        down = np.exp(-1j * theta * lev)
        up = np.exp(1j * theta * lev)
        out = trilinear(f.with_coeffs(f.coeffs * down),
                        g.with_coeffs(g.coeffs * down),
                        h.with_coeffs(h.coeffs * down))
        acc += up * out.coeffs
    return f.with_coeffs(acc / rule.k)


def f_av(f, g, h, rule=None, allow_inexact=False):
    """Averaged trilinear form F_av: the resonant part of the cubic term.

    With the default rule (K = 2 n_max + 1) the discrete average equals
    the continuum average on the truncated span identically; a rule below
    threshold raises unless `allow_inexact` (diagnostics only).
    """
    _check_shared(f, g)
    _check_shared(f, h)
    n_max = f.workspace.n_max
    if rule is None:
        rule = ThetaRule.exact(n_max)
    if not rule.is_exact_for(n_max) and not allow_inexact:
        raise ThetaRuleError(
            f"K={rule.k} below the exactness threshold {2 * n_max + 1} "
            f"for n_max={n_max}")
    return _theta_average(cubic_pointwise, f, g, h, rule)


def resonant_sum_oracle(f, g, h, override=False):
    """Direct Gamma_0 sum: sum over p-q+r-s=0 of Pi_p N[F_q, G_r, H_s] at t=0.

    Brute-force reference for `f_av`; O(n_max^3) cubic evaluations, so it
    refuses n_max > 8 unless `override` is set.
    """
    _check_shared(f, g)
    _check_shared(f, h)
    n_max = f.workspace.n_max
    if n_max > 8 and not override:
        raise ValueError(
            f"resonant_sum_oracle is intended for n_max <= 8 (got {n_max}); "
            f"pass override=True to force")
    acc = SpectralField.zeros(f.workspace, f.zgrid)
    for (p, q, r, s) in resonant_quadruples(n_max, omega=0):
        term = cubic_pointwise(project_level(f, q), project_level(g, r),
                               project_level(h, s))
        acc = acc + project_level(term, p)
    return acc


def partial_resonant(f, g, h, t):
    """N_0^t: F_av conjugated by the exact free-z flow.

    e^{-i t dz^2/2} F_av(e^{i t dz^2/2} F, e^{i t dz^2/2} G, e^{i t dz^2/2} H);
    at t = 0 this is `f_av`.
    """
    fz = propagate(f, t, "free_z")
    gz = propagate(g, t, "free_z")
    hz = propagate(h, t, "free_z")
    return propagate(f_av(fz, gz, hz), -t, "free_z")


def _cubic_slicewise(f, g, h):
    """Per-zeta-slice product in x only; no coupling across z-frequencies."""
    ws = f.workspace
    vf = ws.prod_synthesis.T @ f.coeffs
    vg = ws.prod_synthesis.T @ g.coeffs
    vh = ws.prod_synthesis.T @ h.coeffs
    prod = vf * np.conj(vg) * vh
    coeffs = (ws.prod_synthesis.conj() * ws.prod_weights) @ prod
    return SpectralField(ws, f.zgrid, coeffs)


def fr_rhs(g, rule=None):
    """R[G, G, G]: the averaged form applied to each zeta slice independently.

    The z-Fourier coefficients are the slices in this representation, so
    the full-resonant right-hand side is F_av slice by slice.
    """
    n_max = g.workspace.n_max
    if rule is None:
        rule = ThetaRule.exact(n_max)
    if not rule.is_exact_for(n_max):
        raise ThetaRuleError(
            f"K={rule.k} below the exactness threshold {2 * n_max + 1} "
            f"for n_max={n_max}")
    return _theta_average(_cubic_slicewise, g, g, g, rule)
