import numpy as np
import pytest

from tensorschrod.errors import ParameterError
from tensorschrod.potentials import KINDS, PotentialSpec, axis_functions, build_potential, evaluate
from tensorschrod.basis1d import assemble_sem
from tensorschrod.tensor import outer_sum


def test_stirrer_peak():
    spec = PotentialSpec("stirrer")
    grid = [np.array([1.0]), np.array([0.0]), np.array([-2.0, 0.0, 3.0])]
    _, v2 = build_potential(spec, [type("B", (), {"nodes": g})() for g in grid])
    assert np.allclose(v2, 8.0)
    assert spec.v2_max() == 8.0


def test_quartic_origin():
    z = [np.array([0.0])] * 3
    assert evaluate(PotentialSpec("quartic"), z)[0, 0, 0] == 0.0


def test_coulomb_diagonal():
    spec = PotentialSpec("soft-coulomb-2body-2d", {"delta": 0.01})
    x = [np.array([0.3]), np.array([-1.0]), np.array([0.3]), np.array([-1.0])]
    full = evaluate(spec, x)
    trap = 2 * (0.09 + 1.0)
    assert full.ravel()[0] == pytest.approx(trap + 100.0, rel=1e-14)
    assert spec.v2_max() == pytest.approx(100.0)


@pytest.mark.parametrize("kind,d", [(k, {"quartic": 3, "stirrer": 3}.get(k, None)) for k in KINDS])
def test_recomposition(kind, d):
    spec = PotentialSpec(kind)
    d = d or spec.dims_allowed()[0] if kind.startswith("soft") else (d or 2)
    n = 4 if d <= 4 else 3
    b = assemble_sem(3.0, 1, n + 1)
    bases = [b] * d
    funcs, v2 = build_potential(spec, bases)
    v = outer_sum([f(b.nodes) * np.ones(b.n) for f in funcs])
    if v2 is not None:
        v = v + v2
    ref = evaluate(spec, [b.nodes] * d)
    assert np.allclose(v, ref, rtol=1e-12, atol=1e-12)


def test_exchange_symmetry():
    spec = PotentialSpec("soft-coulomb-3body-3d")
    b = assemble_sem(3.0, 1, 3)
    _, v2 = build_potential(spec, [b] * 9)
    swapped = np.moveaxis(v2, [0, 1, 2, 3, 4, 5], [3, 4, 5, 0, 1, 2])
    # three pair terms are summed in a different order after the swap
    assert np.allclose(v2, swapped, rtol=1e-14, atol=0)
    _, w2 = build_potential(PotentialSpec("soft-coulomb-2body-2d"), [b] * 4)
    assert np.array_equal(w2, np.moveaxis(w2, [0, 1], [2, 3]))


def test_stirrer_1d_and_2d():
    b = assemble_sem(8.0, 4, 3)
    for d in (1, 2):
        funcs, v2 = build_potential(PotentialSpec("stirrer"), [b] * d)
        assert len(funcs) == d and v2.shape == (b.n,) * d
    f, = axis_functions(PotentialSpec("stirrer"), 1)
    assert f(np.array([2.0]))[0] == pytest.approx(4.0)


def test_validation():
    with pytest.raises(ParameterError):
        PotentialSpec("gaussian")
    with pytest.raises(ParameterError):
        PotentialSpec("quartic", {"w0": 1.0})
    with pytest.raises(ParameterError):
        PotentialSpec("quartic").check_dim(2)
    with pytest.raises(ParameterError):
        PotentialSpec("soft-coulomb-2body-3d").check_dim(4)


def test_separable_weights():
    spec = PotentialSpec("separable-oscillatory", {"amplitude": 1600.0, "weights": (1.0, 2.0, 3.0)})
    v = evaluate(spec, [np.array([1.0])] * 3)
    assert v.ravel()[0] == pytest.approx(3 * 1600 * 0.5 + 6.0)
    assert PotentialSpec("separable-oscillatory").v2_max() is None
