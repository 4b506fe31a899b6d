import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from tensorschrod.axis_eigen import build_axis
from tensorschrod.basis1d import assemble_sem
from tensorschrod.errors import ParameterError
from tensorschrod.operator import SeparableOperator
from tensorschrod.splitting import (
    YOSHIDA, Manufactured, SplitSpec, Stepper, convergence_table, evolve, fit_rate, gauss_legendre, qhop_step,
    quadrature, step_sequence, strang_step, yoshida_step,
)


def setup(n_cell=3, k=6, L=4.0):
    b = assemble_sem(L, n_cell, k)
    f = lambda x: x**2
    A = SeparableOperator([build_axis(b)] * 2)
    full = SeparableOperator([build_axis(b, f)] * 2)
    X, Y = np.meshgrid(b.nodes, b.nodes, indexing="ij")
    B = X**2 + Y**2
    psi = np.sin(np.pi * (X + L) / (2 * L)) * np.sin(np.pi * (Y + L) / (2 * L)) + 0j
    return A, B, full, psi


def test_gauss_legendre_small():
    x, w = gauss_legendre(1)
    assert np.allclose(x, [0]) and np.allclose(w, [2])
    x, w = gauss_legendre(2)
    assert np.allclose(x, [-1 / np.sqrt(3), 1 / np.sqrt(3)]) and np.allclose(w, [1, 1])
    x, w = gauss_legendre(3)
    assert np.allclose(x, [-np.sqrt(0.6), 0, np.sqrt(0.6)], atol=1e-15)
    assert np.allclose(w, [5 / 9, 8 / 9, 5 / 9])


@pytest.mark.parametrize("M", range(1, 17))
def test_gauss_legendre_vs_reference(M):
    x, w = gauss_legendre(M)
    xr, wr = np.polynomial.legendre.leggauss(M)
    assert np.allclose(x, xr, atol=1e-14) and np.allclose(w, wr, atol=1e-14)
    c, eta = quadrature(M)
    assert np.all((c > 0) & (c < 1)) and eta.sum() == pytest.approx(1)


def test_gauss_legendre_limits():
    with pytest.raises(ParameterError):
        gauss_legendre(17)
    with pytest.raises(ParameterError):
        gauss_legendre(0)


def test_yoshida_coefficients():
    g1, g2 = YOSHIDA
    assert 2 * g1 + g2 == pytest.approx(1)
    assert 2 * g1**3 + g2**3 == pytest.approx(0, abs=1e-14)


def test_qhop_m1_is_strang(rng):
    A, B, _, psi = setup()
    assert np.allclose(qhop_step(A, B, psi, 0.01, 1), strang_step(A, B, psi, 0.01), atol=1e-12)


@pytest.mark.parametrize("M", [1, 3, 4])
def test_zero_potential(M):
    A, B, _, psi = setup()
    Z = np.zeros_like(B)
    ref = A.propagate(psi, 0.07)
    assert np.allclose(qhop_step(A, Z, psi, 0.07, M), ref, atol=1e-12)
    assert np.allclose(yoshida_step(A, Z, psi, 0.07, M), ref, atol=1e-11)


@pytest.mark.parametrize("M", [1, 2, 3])
def test_time_reversal(M):
    A, B, _, psi = setup()
    assert np.allclose(qhop_step(A, B, qhop_step(A, B, psi, 0.02, M), -0.02, M), psi, atol=1e-10)
    assert np.allclose(yoshida_step(A, B, yoshida_step(A, B, psi, 0.02, M), -0.02, M), psi, atol=1e-10)


def test_negative_step_node_order():
    seq = step_sequence(-0.1, 3)
    # first substep covers s_1, which is closest to 0 along the direction of h
    assert seq[0][0] == "A" and -0.1 < seq[0][1] < 0 and abs(seq[0][1]) < 0.05


def test_propagation_counts():
    A, B, _, psi = setup()
    st_ = Stepper(A, B)
    st_.apply(psi, step_sequence(0.01, 3))
    assert st_.a_props == 4 and st_.b_mults == 3
    m = Stepper(A, B, merge=True)
    out = psi
    for _ in range(5):
        out = m.apply(out, step_sequence(0.01, 3))
    m.flush(out)
    assert m.a_props == 5 * 3 + 1


@pytest.mark.parametrize("comp", ["qhop", "yoshida"])
def test_merge_agrees(comp):
    A, B, full, psi = setup()
    a = evolve(SplitSpec(0.01, 0.1, 3, comp), A, B, psi, full)
    b = evolve(SplitSpec(0.01, 0.1, 3, comp, merge=True), A, B, psi, full)
    assert np.allclose(a.psi, b.psi, atol=1e-12)
    assert b.a_propagations < a.a_propagations


def test_zero_potential_evolve():
    A, B, _, psi = setup()
    r = evolve(SplitSpec(0.1, 0.1), A, np.zeros_like(B), psi, A)
    assert r.error <= 1e-11 and r.steps == 1


def test_stationary_reference():
    A, B, full, _ = setup()
    u = full.eigenvector()
    lam = full.lambda_min
    u = u / np.linalg.norm(u)
    psi_t = full.propagate(u + 0j, 0.3)
    assert np.linalg.norm(np.abs(psi_t) ** 2 - u**2) <= 1e-9
    r = evolve(SplitSpec(0.01, 0.1), A, B, None, Manufactured(lam, u))
    r2 = evolve(SplitSpec(0.01, 0.1), A, B, u, full)
    assert r.error == pytest.approx(r2.error, rel=1e-8)


def test_norm_preserved_in_mass_norm():
    A, B, full, psi = setup()
    r = evolve(SplitSpec(0.001, 1.0, 3), A, B, psi, full)
    assert r.steps == 1000 and r.norm_drift <= 1e-8
    assert "norm_drift_l2" in r.extra


def test_error_constant_decreases_with_M():
    A, B, full, psi = setup(4, 8)
    errs = [evolve(SplitSpec(0.005, 0.1, M), A, B, psi, full).error for M in (1, 3, 5)]
    assert errs[0] > errs[1] > errs[2]


def test_convergence_table_and_rate():
    A, B, full, psi = setup()
    rows = convergence_table([0.02, 0.01], lambda dt: evolve(SplitSpec(dt, 0.1), A, B, psi, full))
    assert np.isnan(rows[0]["rate"]) and 1.8 < rows[1]["rate"] < 2.2
    assert fit_rate([1, 2, 4], [1, 4, 16]) == pytest.approx(2)
    with pytest.raises(ParameterError):
        fit_rate([1], [1])


def test_spec_validation():
    with pytest.raises(ParameterError):
        SplitSpec(0.03, 0.1).steps
    for kw in ({"dt": -1, "T": 1}, {"dt": 0.1, "T": 1, "composition": "suzuki"}, {"dt": 0.1, "T": 1, "split": "x"}):
        with pytest.raises(ParameterError):
            SplitSpec(**kw)
    with pytest.raises(ParameterError):
        Stepper(setup()[0], np.zeros(3))


@settings(max_examples=15)
@given(st.floats(-0.05, 0.05), st.integers(1, 5))
def test_step_is_mass_unitary(h, M):
    A, B, _, psi = setup(2, 5)
    m = A.mass
    out = yoshida_step(A, B, psi, h, M)
    assert np.sum(m * np.abs(out) ** 2) == pytest.approx(np.sum(m * np.abs(psi) ** 2), rel=1e-12)
