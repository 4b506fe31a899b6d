import numpy as np
import pytest

from tensorschrod.basis1d import assemble_sem
from tensorschrod.errors import ParameterError
from tensorschrod.operator import build_operator
from tensorschrod.problems import factors, manufactured, rational_sin_factor, sin_factor


@pytest.mark.parametrize("fac", [sin_factor(3, 2.0), rational_sin_factor(2)])
def test_second_derivatives(fac):
    g, g2 = fac
    x = np.linspace(-1.9, 1.9, 13)
    e = 1e-4
    fd = (g(x + e) - 2 * g(x) + g(x - e)) / e**2
    assert np.allclose(g2(x), fd, atol=1e-5 * max(1, np.abs(g2(x)).max()))


def test_manufactured_consistent_with_operator():
    b = assemble_sem(1.0, 4, 10)
    op = build_operator([b, b], [lambda x: x**2, np.cos])
    u, f = manufactured(op)
    assert np.linalg.norm(op.apply(u) - f) < 1e-6 * np.linalg.norm(f)
    with pytest.raises(ParameterError):
        factors("gauss", 2)
