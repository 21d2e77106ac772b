"""Joint eigenbasis of the 2D Landau Hamiltonian in symmetric gauge.

The operator split used everywhere in this package is

    H = H0 + L,    H0 = -(1/2) Lap + |x|^2 / 8,    L = -(i/2) x_perp . grad,

where ``x_perp = (-x2, x1)``.  H0 is an isotropic harmonic oscillator with
frequency 1/2 (all grid scalings below derive from that single number),
and L is half the angular derivative, ``L = -(i/2) d/dphi``.  The joint
eigenfunctions are Laguerre-Gauss modes indexed by ``(n1, n2)``:

    H  h_{n1,n2} = (n1 + 1/2)          h_{n1,n2}
    H0 h_{n1,n2} = (n1 + n2 + 1) / 2   h_{n1,n2}
    L  h_{n1,n2} = (n1 - n2) / 2       h_{n1,n2}

With ``k = min(n1, n2)`` and ``m = n1 - n2``, in polar coordinates

    h_{n1,n2}(r, phi) = C e^{i m phi} (r^2/2)^{|m|/2} L_k^{(|m|)}(r^2/2) e^{-r^2/4},

a polynomial of total degree ``n1 + n2`` times ``exp(-|x|^2/4)``.  Phase
convention: the ground state is positive and modes carry no extra phase.
Normalization constants are fixed by quadrature (Gram normalization), not
by the closed form, which is used only as a first guess.

Quadrature.  Two tensor Gauss-Hermite rules are carried, both with
``m_quad`` nodes per axis:

* the *pair* grid, nodes scaled for the weight ``exp(-|x|^2/2)``: exact for
  products of two basis functions (Gram matrix, analysis of fields);
* the *product* grid, nodes scaled for ``exp(-|x|^2)``: exact for products
  of four basis functions (Galerkin projection of cubic terms), which is
  what ``m_quad >= 2*n_max + 2`` buys (degree 4*n_max vs 2*m_quad - 1).

A single Gauss rule cannot be polynomial-exact for both Gaussian weight
classes, hence the two scalings; they share the mode table and the
normalization constants.
"""

from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial.hermite import hermgauss
from scipy.special import eval_genlaguerre, gammaln

__all__ = [
    "BasisWorkspace",
    "build_basis",
    "eigen_phase",
    "analyze_x",
    "synthesize_x",
]


def mode_table(n_max):
    """All (n1, n2) with n1 + n2 <= n_max, ordered by level then n1."""
    return [(n1, n - n1) for n in range(n_max + 1) for n1 in range(n + 1)]


def _mode_values(n1, n2, x1, x2):
    """Values of the (n1, n2) Laguerre-Gauss mode at points (x1, x2).

    Closed-form normalization; the workspace rescales by quadrature norms
    afterwards so the Gram condition, not this constant, is the contract.
    """
    k = min(n1, n2)
    m = n1 - n2
    am = abs(m)
    r2h = 0.5 * (x1 * x1 + x2 * x2)  # r^2 / 2
    phi = np.arctan2(x2, x1)
    log_c = 0.5 * (gammaln(k + 1) - gammaln(k + am + 1) - np.log(2.0 * np.pi))
    radial = np.where(am == 0, 1.0, r2h ** (0.5 * am)) * eval_genlaguerre(k, am, r2h)
    return np.exp(log_c) * np.exp(1j * m * phi) * radial * np.exp(-0.5 * r2h)


def _tensor_rule(m_quad, scale):
    """Plain-dx tensor quadrature from Gauss-Hermite nodes.

    ``scale * t_i`` nodes with weights ``scale * w_i * exp(t_i^2)`` give a
    rule exact for  poly * exp(-x^2/scale^2)  up to degree 2*m_quad - 1
    per axis.  scale = sqrt(2): pair class; scale = 1: product class.
    """
    t, w = hermgauss(m_quad)
    nodes = scale * t
    weights = scale * w * np.exp(t * t)
    x1 = np.repeat(nodes, m_quad)
    x2 = np.tile(nodes, m_quad)
    ww = np.outer(weights, weights).ravel()
    return x1, x2, ww


@dataclass(frozen=True)
class BasisWorkspace:
    """Precomputed Landau-level tables and quadrature grids.

    Immutable after construction; safe to share across workers.
    Reproducible from (n_max, m_quad) alone and never serialized.
    """

    n_max: int
    m_quad: int
    modes: tuple                 # ((n1, n2), ...) ordered by level, then n1
    levels: np.ndarray           # int, n1 + n2 per mode
    eig_h: np.ndarray            # n1 + 1/2
    eig_h0: np.ndarray           # (n1 + n2 + 1) / 2
    eig_l: np.ndarray            # (n1 - n2) / 2
    quad_nodes: np.ndarray       # pair grid, shape (2, m_quad^2)
    quad_weights: np.ndarray     # pair grid plain-dx weights, (m_quad^2,)
    synthesis_matrix: np.ndarray  # mode values on the pair grid, (n_modes, m_quad^2)
    prod_nodes: np.ndarray       # product grid, shape (2, m_quad^2)
    prod_weights: np.ndarray
    prod_synthesis: np.ndarray   # mode values on the product grid
    gram_error: float = field(compare=False, default=0.0)
    _mode_index: dict = field(compare=False, default=None, repr=False)
    _norm_scale: np.ndarray = field(compare=False, default=None, repr=False)

    @property
    def n_modes(self):
        return len(self.modes)

    def mode_index(self, mode):
        try:
            return self._mode_index[tuple(mode)]
        except KeyError:
            raise KeyError(f"mode {mode} not retained (n_max={self.n_max})")

    def level_mask(self, n):
        return self.levels == n

    def evaluate_modes(self, x1, x2):
        """Mode values at arbitrary points, Gram-normalized; (n_modes, npts)."""
        x1 = np.asarray(x1, dtype=float).ravel()
        x2 = np.asarray(x2, dtype=float).ravel()
        out = np.empty((self.n_modes, x1.size), dtype=complex)
        for i, (n1, n2) in enumerate(self.modes):
            out[i] = self._norm_scale[i] * _mode_values(n1, n2, x1, x2)
        return out


def build_basis(n_max, m_quad):
    """Construct the workspace for all levels n1 + n2 <= n_max.

    Parameters
    ----------
    n_max : int
        Highest retained H0 level (>= 0).
    m_quad : int
        Gauss-Hermite nodes per axis; must be >= 2*n_max + 2 so that the
        product grid integrates quartic mode products exactly.
    """
    n_max = int(n_max)
    m_quad = int(m_quad)
    if n_max < 0:
        raise ValueError(f"n_max must be >= 0, got {n_max}")
    if m_quad < 2 * n_max + 2:
        raise ValueError(
            f"m_quad={m_quad} below exactness threshold {2 * n_max + 2} "
            f"for n_max={n_max}: cubic Galerkin projection would alias"
        )

    modes = mode_table(n_max)
    n1 = np.array([m[0] for m in modes])
    n2 = np.array([m[1] for m in modes])

    px1, px2, pw = _tensor_rule(m_quad, np.sqrt(2.0))
    qx1, qx2, qw = _tensor_rule(m_quad, 1.0)

    raw_pair = np.empty((len(modes), px1.size), dtype=complex)
    raw_prod = np.empty((len(modes), qx1.size), dtype=complex)
    for i, (a, b) in enumerate(modes):
        raw_pair[i] = _mode_values(a, b, px1, px2)
        raw_prod[i] = _mode_values(a, b, qx1, qx2)

    # Gram normalization: the pair rule is exact on |h|^2, so dividing by
    # the quadrature norm makes the diagonal exactly 1.
    norms = np.sqrt(np.real(np.sum(pw * np.abs(raw_pair) ** 2, axis=1)))
    scale = 1.0 / norms
    synth_pair = raw_pair * scale[:, None]
    synth_prod = raw_prod * scale[:, None]

    gram = (synth_pair * pw) @ synth_pair.conj().T
    gram_err = float(np.max(np.abs(gram - np.eye(len(modes)))))

    ws = BasisWorkspace(
        n_max=n_max,
        m_quad=m_quad,
        modes=tuple(modes),
        levels=(n1 + n2).astype(int),
        eig_h=n1 + 0.5,
        eig_h0=0.5 * (n1 + n2 + 1.0),
        eig_l=0.5 * (n1 - n2).astype(float),
        quad_nodes=np.vstack([px1, px2]),
        quad_weights=pw,
        synthesis_matrix=synth_pair,
        prod_nodes=np.vstack([qx1, qx2]),
        prod_weights=qw,
        prod_synthesis=synth_prod,
        gram_error=gram_err,
        _mode_index={m: i for i, m in enumerate(modes)},
        _norm_scale=scale,
    )
    for arr in (ws.levels, ws.eig_h, ws.eig_h0, ws.eig_l, ws.quad_nodes,
                ws.quad_weights, ws.synthesis_matrix, ws.prod_nodes,
                ws.prod_weights, ws.prod_synthesis):
        arr.setflags(write=False)
    return ws


_OPERATOR_EIGS = {"H": "eig_h", "H0": "eig_h0", "L": "eig_l",
                  "h": "eig_h", "h0": "eig_h0", "l": "eig_l"}


def eigen_phase(workspace, mode, theta, operator):
    """exp(i * theta * eig) for the requested operator on one mode.

    The result has unit modulus exactly; `operator` is one of H, H0, L.
    """
    idx = workspace.mode_index(mode)
    try:
        eig = getattr(workspace, _OPERATOR_EIGS[operator])[idx]
    except KeyError:
        raise KeyError(f"unknown operator {operator!r}; expected H, H0 or L")
    return complex(np.exp(1j * theta * eig))


def analyze_x(workspace, values):
    """Quadrature inner products <values, h_a> on the pair grid.

    The adjoint of `synthesize_x`; on the truncated span the round trip is
    the identity, otherwise this is the L2-orthogonal projection.
    """
    values = np.asarray(values, dtype=complex)
    if values.shape[0] != workspace.quad_weights.size:
        raise ValueError(
            f"expected {workspace.quad_weights.size} grid values, got {values.shape[0]}"
        )
    return (workspace.synthesis_matrix.conj() * workspace.quad_weights) @ values


def synthesize_x(workspace, coefficients):
    """Values of sum_a c_a h_a at the pair-grid nodes."""
    coefficients = np.asarray(coefficients, dtype=complex)
    if coefficients.shape[0] != workspace.n_modes:
        raise ValueError(
            f"expected {workspace.n_modes} coefficients, got {coefficients.shape[0]}"
        )
    return workspace.synthesis_matrix.T @ coefficients
