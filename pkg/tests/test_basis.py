import numpy as np
import pytest

from mnls import build_basis, eigen_phase, analyze_x, synthesize_x


def test_minimal_workspace_single_mode():
    ws = build_basis(0, 2)
    assert ws.modes == ((0, 0),)
    assert ws.eig_h[0] == 0.5


def test_eigenvalue_table_mode_20():
    ws = build_basis(4, 10)
    i = ws.mode_index((2, 0))
    assert ws.eig_h0[i] == 1.5
    assert ws.eig_l[i] == 1.0
    assert ws.eig_h[i] == 2.5


def test_eigen_additivity_exact():
    ws = build_basis(8, 18)
    assert np.all(ws.eig_h == ws.eig_h0 + ws.eig_l)


@pytest.mark.parametrize("n_max,m_quad", [(2, 6), (6, 14), (12, 26)])
def test_gram_orthonormality(n_max, m_quad):
    ws = build_basis(n_max, m_quad)
    gram = (ws.synthesis_matrix * ws.quad_weights) @ ws.synthesis_matrix.conj().T
    assert np.max(np.abs(gram - np.eye(ws.n_modes))) <= 1e-10
    assert ws.gram_error <= 1e-10


def test_ground_state_quartic_integral():
    # closed-form 2D Gaussian integral: int |h00|^4 dx = 1/(4 pi)
    ws = build_basis(0, 4)
    val = np.sum(ws.prod_weights * np.abs(ws.prod_synthesis[0]) ** 4)
    assert abs(val - 1.0 / (4.0 * np.pi)) <= 1e-12


def test_build_rejects_bad_arguments():
    with pytest.raises(ValueError):
        build_basis(-1, 10)
    with pytest.raises(ValueError):
        build_basis(4, 9)  # threshold is 2*4 + 2 = 10


def test_eigen_phase_examples():
    ws = build_basis(4, 10)
    assert eigen_phase(ws, (0, 0), 2 * np.pi, "H") == pytest.approx(-1.0)
    assert eigen_phase(ws, (1, 1), 0.7321, "L") == pytest.approx(1.0)
    assert eigen_phase(ws, (3, 0), np.pi, "H0") == pytest.approx(1.0)
    assert abs(eigen_phase(ws, (2, 1), 13.7, "H")) == pytest.approx(1.0)
    with pytest.raises(KeyError):
        eigen_phase(ws, (9, 9), 1.0, "H")
    with pytest.raises(KeyError):
        eigen_phase(ws, (0, 0), 1.0, "bogus")


def test_analyze_synthesize_round_trip():
    ws = build_basis(5, 12)
    rng = np.random.default_rng(7)
    c = rng.standard_normal(ws.n_modes) + 1j * rng.standard_normal(ws.n_modes)
    back = analyze_x(ws, synthesize_x(ws, c))
    assert np.linalg.norm(back - c) <= 1e-12 * np.linalg.norm(c)


def test_unit_vector_round_trip_and_linearity():
    ws = build_basis(3, 8)
    e = np.zeros(ws.n_modes, dtype=complex)
    e[ws.mode_index((1, 0))] = 1.0
    assert np.linalg.norm(analyze_x(ws, synthesize_x(ws, e)) - e) <= 1e-12

    vals = 3j * ws.synthesis_matrix[ws.mode_index((0, 0))]
    c = analyze_x(ws, vals)
    expected = np.zeros_like(e)
    expected[ws.mode_index((0, 0))] = 3j
    assert np.linalg.norm(c - expected) <= 1e-12


def test_synthesize_analyze_is_projection():
    # sampled values outside the span project orthogonally: applying the
    # round trip twice equals applying it once
    ws = build_basis(2, 6)
    x1, x2 = ws.quad_nodes
    vals = np.exp(-0.3 * (x1**2 + 2 * x2**2)) * (1.0 + 0.2j * x1)
    c1 = analyze_x(ws, vals)
    c2 = analyze_x(ws, synthesize_x(ws, c1))
    assert np.linalg.norm(c2 - c1) <= 1e-12 * np.linalg.norm(c1)


def test_product_analysis_matches_dense_reference():
    # coefficients of h10 * h01 (degree-2 polynomial times the squared
    # Gaussian) from the working rule match a 4x-node reference rule
    n_max, m_quad = 2, 12
    ws = build_basis(n_max, m_quad)
    ref = build_basis(n_max, 4 * m_quad)

    def product_coeffs(w):
        vals = (w.synthesis_matrix[w.mode_index((1, 0))]
                * w.synthesis_matrix[w.mode_index((0, 1))])
        return analyze_x(w, vals)

    assert np.linalg.norm(product_coeffs(ws) - product_coeffs(ref)) <= 1e-10


def test_rotation_identity_half_angle():
    # exp(i theta L) rotates coordinates by theta/2: synthesizing the
    # phase-multiplied coefficients at points x equals synthesizing the
    # original coefficients at A_{theta/2} x  (L is half the angular
    # derivative, so the rotation angle is half the flow time)
    ws = build_basis(4, 10)
    rng = np.random.default_rng(3)
    c = rng.standard_normal(ws.n_modes) + 1j * rng.standard_normal(ws.n_modes)
    theta = 0.83
    pts = rng.uniform(-2.5, 2.5, size=(2, 40))
    rotated = c * np.exp(1j * theta * ws.eig_l)
    lhs = rotated @ ws.evaluate_modes(pts[0], pts[1])
    a = 0.5 * theta
    rx = np.cos(a) * pts[0] - np.sin(a) * pts[1]
    ry = np.sin(a) * pts[0] + np.cos(a) * pts[1]
    rhs = c @ ws.evaluate_modes(rx, ry)
    assert np.max(np.abs(lhs - rhs)) <= 1e-8
