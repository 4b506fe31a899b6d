import numpy as np
import pytest
from hypothesis import given, strategies as st

from tensorschrod.errors import CapabilityError, ParameterError
from tensorschrod.hermite import hermite_basis, hermite_eval_matrix, hermite_functions, hermite_operator


def test_small_node_sets():
    assert np.allclose(hermite_basis(2).nodes, [-1 / np.sqrt(2), 1 / np.sqrt(2)], atol=1e-15)
    assert np.allclose(hermite_basis(3).nodes, [-np.sqrt(1.5), 0, np.sqrt(1.5)], atol=1e-14)


def test_functions_orthonormal():
    x, w = np.polynomial.hermite.hermgauss(80)
    psi = hermite_functions(10, x) * np.exp(x**2 / 2)
    assert np.allclose((psi * w) @ psi.T, np.eye(11), atol=1e-12)


@pytest.mark.parametrize("n", [8, 20, 60])
def test_derivative_of_gaussian(n):
    b = hermite_basis(n)
    psi0 = hermite_functions(0, b.nodes)[0]
    assert np.allclose(b.diff_matrix @ psi0, -b.nodes * psi0, atol=1e-8)


def test_oscillator_spectrum():
    A, _ = hermite_operator(hermite_basis(60), lambda x: x**2)
    lam = np.linalg.eigvalsh(A)
    assert np.allclose(lam[:5], [1, 3, 5, 7, 9], atol=1e-9)


def test_free_operator_psd():
    A, _ = hermite_operator(hermite_basis(40))
    assert np.linalg.eigvalsh(A)[0] >= -1e-8


def test_self_convergence():
    l20 = np.linalg.eigvalsh(hermite_operator(hermite_basis(20), lambda x: x**2)[0])[0]
    l40 = np.linalg.eigvalsh(hermite_operator(hermite_basis(40), lambda x: x**2)[0])[0]
    assert abs(l20 - l40) < 1e-10


@pytest.mark.parametrize("n", [10, 100, 300])
def test_symmetrized_is_symmetric(n):
    b = hermite_basis(n)
    p = 1 / b.psi_last
    A = p[:, None] * b.kinetic / p[None, :]
    assert np.max(np.abs(A - A.T)) <= 1e-8 * np.max(np.abs(A))


def test_weights_integrate_hermite_products():
    b = hermite_basis(30)
    psi = hermite_functions(29, b.nodes)
    G = (psi * b.mass_diag) @ psi.T
    assert np.allclose(G, np.eye(30), atol=1e-11)


def test_eval_matrix_interpolates():
    b = hermite_basis(24)
    coef = np.random.default_rng(3).normal(size=24)
    t = np.linspace(-4, 4, 41)
    f_nodes = coef @ hermite_functions(23, b.nodes)
    f_t = coef @ hermite_functions(23, t)
    assert np.allclose(hermite_eval_matrix(b, t) @ f_nodes, f_t, atol=1e-11)
    assert np.allclose(hermite_eval_matrix(b, b.nodes), np.eye(24))


def test_limits():
    with pytest.raises(ParameterError):
        hermite_basis(1)
    with pytest.raises(CapabilityError):
        hermite_basis(800)


@given(st.integers(2, 120))
def test_nodes_symmetric_and_sorted(n):
    x = hermite_basis(n).nodes
    assert np.all(np.diff(x) > 0)
    assert np.allclose(x, -x[::-1], atol=0)
