import numpy as np
import pytest
from hypothesis import given, strategies as st

from tensorschrod.basis1d import assemble_sem, eval_cellwise, eval_matrix, gll_rule, interp_matrix, legendre
from tensorschrod.errors import ParameterError


def test_gll_small_rules():
    r = gll_rule(1)
    assert np.allclose(r.nodes, [-1, 1]) and np.allclose(r.weights, [1, 1])
    r = gll_rule(2)
    assert np.allclose(r.nodes, [-1, 0, 1], atol=1e-15)
    assert np.allclose(r.weights, [1 / 3, 4 / 3, 1 / 3], atol=1e-15)


def test_gll_k4_interior_roots():
    x = gll_rule(4).nodes
    assert np.any(np.isclose(x, np.sqrt(3 / 7), atol=1e-12))
    assert np.any(np.isclose(x, -np.sqrt(3 / 7), atol=1e-12))
    # brute force: interior nodes are the zeros of (1 - x^2) P4'(x)
    p4 = np.polynomial.legendre.Legendre.basis(4).deriv()
    assert np.allclose(np.sort(p4.roots()), x[1:-1], atol=1e-13)


@pytest.mark.parametrize("k", [1, 2, 3, 4, 6, 10, 20, 40])
def test_gll_exactness(k):
    r = gll_rule(k)
    for deg in range(2 * k):
        exact = 0.0 if deg % 2 else 2.0 / (deg + 1)
        assert abs(r.weights @ r.nodes**deg - exact) < 1e-12
    assert abs(r.weights.sum() - 2) < 1e-13


@pytest.mark.parametrize("k", [2, 5, 12])
def test_gll_nodes_match_reference(k):
    # leggauss is only a cross-check route: GLL interior = zeros of P_k'
    ref = np.polynomial.legendre.Legendre.basis(k).deriv().roots()
    assert np.allclose(np.sort(ref.real), gll_rule(k).nodes[1:-1], atol=1e-12)


@pytest.mark.parametrize("k", [2, 4, 7])
def test_diff_matrix_exact_on_polynomials(k):
    r = gll_rule(k)
    for deg in range(k + 1):
        assert np.allclose(r.diff_matrix @ r.nodes**deg, deg * r.nodes ** max(deg - 1, 0) * (deg > 0), atol=1e-11)


def test_gll_rejects_bad_degree():
    for k in (0, 41, 2.5, -1):
        with pytest.raises(ParameterError):
            gll_rule(k)


def test_legendre_values():
    x = np.linspace(-1, 1, 7)
    p3, p2 = legendre(3, x)
    assert np.allclose(p3, 0.5 * (5 * x**3 - 3 * x))
    assert np.allclose(p2, 0.5 * (3 * x**2 - 1))


def test_q1_is_finite_differences():
    b = assemble_sem(1.0, 4, 1)
    h = 0.5
    assert b.n == 3
    ref = (2 * np.eye(3) - np.eye(3, k=1) - np.eye(3, k=-1)) / h**2
    assert np.allclose(b.kinetic, ref, atol=1e-12)


def test_dirichlet_laplacian_lowest_eigenvalue():
    b = assemble_sem(np.pi / 2, 8, 6)
    lam = np.sort(np.linalg.eigvals(b.kinetic).real)
    assert abs(lam[0] - 1.0) < 1e-10


def test_stiffness_matches_galerkin_integrals():
    L, n_cell, k = 1.0, 2, 3
    b = assemble_sem(L, n_cell, k)
    xq, wq = np.polynomial.legendre.leggauss(50)
    x_full = b.full_nodes
    h = 2 * L / n_cell
    nf = x_full.size
    S = np.zeros((nf, nf))
    for c in range(n_cell):
        idx = np.arange(c * k, c * k + k + 1)
        nodes = x_full[idx]
        a = -L + c * h
        xs = a + (xq + 1) * h / 2
        ws = wq * h / 2
        # derivatives of Lagrange basis at quadrature points via polyfit on nodes
        V = np.vander(nodes, k + 1)
        coefs = np.linalg.solve(V, np.eye(k + 1))
        dphi = np.array([np.polyval(np.polyder(coefs[:, j]), xs) for j in range(k + 1)])
        S[np.ix_(idx, idx)] += (dphi * ws) @ dphi.T
    assert np.allclose(b.stiffness, S[1:-1, 1:-1], atol=1e-10)


def test_mass_is_lumped_quadrature():
    b = assemble_sem(1.0, 3, 2)
    assert abs(b.mass_diag.sum() - (2 - 2 * (1 / 3) * (1 / 3))) < 1e-14


@pytest.mark.parametrize("k", [1, 2, 3])
def test_poisson_rate(k):
    errs = []
    for n_cell in (8, 16):
        b = assemble_sem(1.0, n_cell, k)
        x = b.nodes
        u = np.linalg.solve(b.kinetic, np.pi**2 * np.sin(np.pi * x))
        errs.append(np.sqrt(np.sum(b.mass_diag * (u - np.sin(np.pi * x)) ** 2)))
    # Q^1 with lumped mass is the three-point difference scheme, second order
    assert np.log2(errs[0] / errs[1]) >= (1.9 if k == 1 else k + 1.5)


def test_interp_identity_and_unit_rows():
    c = assemble_sem(2.0, 3, 4)
    assert np.allclose(interp_matrix(c, c), np.eye(c.n))
    f = assemble_sem(2.0, 6, 4)
    P = interp_matrix(c, f)
    for i, x in enumerate(f.nodes):
        hit = np.isclose(c.nodes, x, atol=1e-14)
        if hit.any():
            assert np.allclose(P[i], hit.astype(float))


def test_interp_reproduces_linear():
    c = assemble_sem(1.0, 4, 3)
    f = assemble_sem(1.0, 7, 5)
    P = interp_matrix(c, f)
    # interior nodes only: x vanishes nowhere at the ends, so check away from the boundary cells
    inside = (f.nodes > c.full_nodes[1]) & (f.nodes < c.full_nodes[-2])
    assert np.allclose((P @ c.nodes)[inside], f.nodes[inside], atol=1e-14)
    ones = P @ np.ones(c.n)
    assert np.allclose(ones[inside], 1.0, atol=1e-14)
    assert np.all(ones[~inside] < 1.0)


def test_interp_domain_mismatch():
    with pytest.raises(ParameterError):
        interp_matrix(assemble_sem(1.0, 2, 2), assemble_sem(2.0, 2, 2))


def test_eval_at_nodes_and_polynomials():
    b = assemble_sem(1.5, 3, 4)
    vals = np.cos(b.nodes)
    assert np.allclose(eval_cellwise(b, vals, b.nodes), vals, atol=0)
    full = 0.3 * b.full_nodes**4 - b.full_nodes + 2
    t = np.linspace(-1.5, 1.5, 37)
    assert np.allclose(eval_cellwise(b, full, t), 0.3 * t**4 - t + 2, atol=1e-12)


def test_eval_sin_spectral():
    b = assemble_sem(1.0, 4, 10)
    v = eval_cellwise(b, np.sin(np.pi * b.nodes), [0.123])
    assert abs(v[0] - np.sin(np.pi * 0.123)) < 1e-9


def test_eval_rejects_outside():
    b = assemble_sem(1.0, 2, 2)
    with pytest.raises(ParameterError):
        eval_matrix(b, [1.01])
    with pytest.raises(ParameterError):
        eval_cellwise(b, np.zeros(b.n + 1), [0.0])


@given(st.integers(1, 8), st.integers(1, 6), st.floats(0.3, 9.0))
def test_assembly_properties(n_cell, k, L):
    b = assemble_sem(L, n_cell, k)
    assert b.n == n_cell * k - 1
    assert np.all(b.mass_diag > 0)
    if b.n:
        assert np.allclose(b.stiffness, b.stiffness.T)
        assert np.linalg.eigvalsh(b.stiffness)[0] > 0
        assert np.all(np.diff(b.nodes) > 0)
