"""Manufactured solutions u* = prod_a g_a(x_a) with right-hand side f = (-Δ + V) u*."""
from __future__ import annotations

import numpy as np

from .errors import ParameterError
from .tensor import outer_product, outer_sum


def sin_factor(freq, L):
    """g(x) = sin(freq pi x / L), zero at +-L for integer freq."""
    w = freq * np.pi / L
    return (lambda x: np.sin(w * x)), (lambda x: -(w**2) * np.sin(w * x))


def rational_sin_factor(freq):
    """g(x) = sin(freq pi (x+1) / 2) / (1 + x^2), decaying on the whole line."""
    w = freq * np.pi / 2

    def g(x):
        return np.sin(w * (x + 1)) / (1 + x**2)

    def g2(x):
        s, c = np.sin(w * (x + 1)), np.cos(w * (x + 1))
        q = 1 / (1 + x**2)
        return -(w**2) * s * q + 2 * w * c * (-2 * x * q**2) + s * (6 * x**2 - 2) * q**3

    return g, g2


EXACT = ("sin-product", "rational-sin")


def factors(kind, d, L=1.0):
    if kind == "sin-product":
        return [sin_factor(a + 1, L) for a in range(d)]
    if kind == "rational-sin":
        return [rational_sin_factor(a + 1) for a in range(d)]
    raise ParameterError(f"unknown manufactured solution {kind!r}; choose from {EXACT}")


def nodal_potential(op):
    """V1 + V2 sampled at the grid nodes of a FullOperator."""
    v = outer_sum([ax.f_values for ax in op.sep.axes])
    return v if op.v2 is None else v + op.v2


def manufactured(op, kind="sin-product"):
    """(u*, f) at the grid nodes of `op`."""
    axes = op.sep.axes
    L = getattr(axes[0].basis, "L", 1.0)
    fac = factors(kind, len(axes), L)
    gs = [g(ax.nodes) for (g, _), ax in zip(fac, axes)]
    u = outer_product(gs)
    lap = np.zeros_like(u)
    for a, ((_, g2), ax) in enumerate(zip(fac, axes)):
        vecs = list(gs)
        vecs[a] = -g2(ax.nodes)
        lap += outer_product(vecs)
    return u, lap + nodal_potential(op) * u
