"""Potential library, each split as V = V1 (separable per axis) + V2 (nodal field)."""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import partial

import numpy as np

from .errors import ParameterError

_DEFAULTS = {
    "separable-oscillatory": {"amplitude": 100.0, "weights": None},
    "harmonic-trap": {},
    "quartic": {"gamma": (1.0, 1.0, 3.0), "alpha": 1.4, "kappa": 0.3},
    "stirrer": {"gamma": (1.0, 1.0, 2.0), "w0": 4.0, "delta": 1.0, "r0": 1.0},
    "soft-coulomb-2body-2d": {"c": 1.0, "delta": 0.1},
    "soft-coulomb-2body-3d": {"c": 1.0, "delta": 0.1},
    "soft-coulomb-3body-3d": {"c": 1.0, "delta": 0.1},
}

# (particles, coordinates per particle) for the multi-body kinds
_BODIES = {
    "soft-coulomb-2body-2d": (2, 2),
    "soft-coulomb-2body-3d": (2, 3),
    "soft-coulomb-3body-3d": (3, 3),
}

KINDS = tuple(_DEFAULTS)


@dataclass(frozen=True)
class PotentialSpec:
    kind: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in _DEFAULTS:
            raise ParameterError(f"unknown potential kind {self.kind!r}; choose from {', '.join(KINDS)}")
        unknown = set(self.params) - set(_DEFAULTS[self.kind])
        if unknown:
            raise ParameterError(f"unknown parameters for {self.kind}: {', '.join(sorted(unknown))}")
        merged = dict(_DEFAULTS[self.kind])
        merged.update(self.params)
        object.__setattr__(self, "params", merged)

    def __getitem__(self, key):
        return self.params[key]

    def dims_allowed(self):
        if self.kind in _BODIES:
            p, c = _BODIES[self.kind]
            return (p * c,)
        if self.kind == "quartic":
            return (3,)
        if self.kind == "stirrer":
            return (1, 2, 3)
        return tuple(range(1, 10))

    def check_dim(self, d):
        if d not in self.dims_allowed():
            raise ParameterError(f"potential {self.kind} needs dimension in {self.dims_allowed()}, got {d}")

    def v2_max(self):
        """Upper bound of V2 (None when unbounded or absent)."""
        p = self.params
        if self.kind == "stirrer":
            return 2 * p["w0"]
        if self.kind in _BODIES:
            n = _BODIES[self.kind][0]
            return n * (n - 1) / 2 * p["c"] / p["delta"]
        return None


def _osc(x, a, w):
    return w * x**2 + a * np.sin(np.pi * x / 4) ** 2


def _quad(x, g):
    return g * x**2


def axis_functions(spec: PotentialSpec, d: int):
    """Per-axis callables f_a with V1(x) = sum_a f_a(x_a)."""
    spec.check_dim(d)
    p = spec.params
    if spec.kind == "separable-oscillatory":
        w = p["weights"]
        w = [1.0] * d if w is None else [float(v) for v in w]
        if len(w) != d:
            raise ParameterError(f"weights has {len(w)} entries for dimension {d}")
        return [partial(_osc, a=float(p["amplitude"]), w=wk) for wk in w]
    if spec.kind == "quartic":
        return [partial(_quad, g=float(g)) for g in p["gamma"]]
    if spec.kind == "stirrer":
        return [partial(_quad, g=float(g) ** 2) for g in p["gamma"][:d]]
    return [partial(_quad, g=1.0) for _ in range(d)]


def _grid(coords, a, d):
    shape = [1] * d
    shape[a] = -1
    return np.asarray(coords[a], dtype=float).reshape(shape)


def _v2(spec, coords):
    """Non-separable part on the broadcast grid of per-axis coordinate vectors."""
    d = len(coords)
    p = spec.params
    X = [_grid(coords, a, d) for a in range(d)]
    full = tuple(len(c) for c in coords)
    if spec.kind == "quartic":
        gx, gy, _ = (float(g) for g in p["gamma"])
        r2 = X[0] ** 2 + X[1] ** 2
        out = (2 * (1 - p["alpha"]) - 1) * (gx * X[0] ** 2 + gy * X[1] ** 2) + p["kappa"] / 2 * r2**2
    elif spec.kind == "stirrer":
        arg = (X[0] - p["r0"]) ** 2
        if d >= 2:
            arg = arg + X[1] ** 2
        out = 2 * p["w0"] * np.exp(-p["delta"] * arg)
    elif spec.kind in _BODIES:
        n_p, n_c = _BODIES[spec.kind]
        out = 0.0
        for j in range(n_p):
            for k in range(j + 1, n_p):
                r2 = sum((X[j * n_c + a] - X[k * n_c + a]) ** 2 for a in range(n_c))
                out = out + p["c"] / np.sqrt(r2 + p["delta"] ** 2)
    else:
        return None
    return np.broadcast_to(out, full).astype(float)


def build_potential(spec: PotentialSpec, bases):
    """(per-axis V1 callables, V2 nodal field or None) on the grid of `bases`."""
    d = len(bases)
    funcs = axis_functions(spec, d)
    v2 = _v2(spec, [b.nodes for b in bases])
    return funcs, v2


def evaluate(spec: PotentialSpec, coords):
    """Full potential from its closed form, on the grid spanned by per-axis `coords`."""
    d = len(coords)
    spec.check_dim(d)
    p = spec.params
    X = [_grid(coords, a, d) for a in range(d)]
    full = tuple(len(c) for c in coords)
    if spec.kind == "separable-oscillatory":
        w = p["weights"] or [1.0] * d
        out = sum(w[a] * X[a] ** 2 + p["amplitude"] * np.sin(np.pi * X[a] / 4) ** 2 for a in range(d))
    elif spec.kind == "harmonic-trap":
        out = sum(x**2 for x in X)
    elif spec.kind == "quartic":
        gx, gy, gz = p["gamma"]
        r2 = X[0] ** 2 + X[1] ** 2
        out = 2 * (1 - p["alpha"]) * (gx * X[0] ** 2 + gy * X[1] ** 2) + p["kappa"] / 2 * r2**2 + gz * X[2] ** 2
    elif spec.kind == "stirrer":
        g = p["gamma"]
        out = sum(g[a] ** 2 * X[a] ** 2 for a in range(d))
        arg = (X[0] - p["r0"]) ** 2 + (X[1] ** 2 if d >= 2 else 0.0)
        out = out + 2 * p["w0"] * np.exp(-p["delta"] * arg)
    else:
        n_p, n_c = _BODIES[spec.kind]
        out = sum(x**2 for x in X)
        for j in range(n_p):
            for k in range(j + 1, n_p):
                dist2 = sum((X[j * n_c + a] - X[k * n_c + a]) ** 2 for a in range(n_c))
                out = out + p["c"] / np.sqrt(dist2 + p["delta"] ** 2)
    return np.broadcast_to(out, full).astype(float)
