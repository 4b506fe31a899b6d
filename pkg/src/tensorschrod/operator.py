"""Schrödinger operator sum_d H_d + diag(V2) - sigma on a tensor-product grid."""
from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .axis_eigen import build_axis
from .errors import ParameterError, SingularShiftError
from .tensor import kron_apply, lambda_grid, outer_product

_SINGULAR_TOL = 1e-14


@dataclass(frozen=True, eq=False)
class SeparableOperator:
    """Kronecker-sum operator with per-axis factorizations, minus shift*I."""

    axes: tuple
    shift: float = 0.0
    lam: np.ndarray = field(default=None, repr=False)
    _phases: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "axes", tuple(self.axes))
        if self.lam is None:
            object.__setattr__(self, "lam", lambda_grid(self.axes))

    @property
    def shape(self):
        return self.lam.shape

    @property
    def ndim(self):
        return self.lam.ndim

    @property
    def bases(self):
        return [ax.basis for ax in self.axes]

    @property
    def mass(self):
        m = self.__dict__.get("_mass")
        if m is None:
            m = outer_product([ax.mass_diag for ax in self.axes])
            object.__setattr__(self, "_mass", m)
        return m

    @property
    def lambda_min(self) -> float:
        """Smallest eigenvalue of the unshifted operator."""
        return float(sum(ax.eigenvalues[0] for ax in self.axes))

    def shifted(self, sigma: float) -> SeparableOperator:
        return replace(self, shift=float(sigma), _phases={})

    def forward(self, u):
        return kron_apply(u, [ax.T_inv for ax in self.axes])

    def backward(self, c):
        return kron_apply(c, [ax.T for ax in self.axes])

    def _check(self, u):
        if np.shape(u) != self.shape:
            raise ParameterError(f"field shape {np.shape(u)} does not match operator shape {self.shape}")

    def apply(self, u):
        self._check(u)
        return self.backward((self.lam - self.shift) * self.forward(u))

    def solve(self, b):
        self._check(b)
        denom = self.lam - self.shift
        if np.min(np.abs(denom)) < _SINGULAR_TOL * np.max(np.abs(self.lam)):
            raise SingularShiftError(
                f"shift {self.shift} makes the operator singular (min |lambda - shift| = {np.min(np.abs(denom)):.3e})"
            )
        return self.backward(self.forward(b) / denom)

    def phase(self, dt):
        ph = self._phases.get(dt)
        if ph is None:
            ph = np.exp(-1j * (self.lam - self.shift) * dt)
            if len(self._phases) > 16:
                self._phases.clear()
            self._phases[dt] = ph
        return ph

    def propagate(self, psi, dt):
        """exp(-i (A - shift) dt) psi; unitary for any real dt."""
        self._check(psi)
        if dt == 0:
            return np.array(psi, dtype=complex)
        return self.backward(self.phase(dt) * self.forward(psi))

    def eigenvector(self, index=None):
        """Separable eigenfunction for a multi-index (default: ground state)."""
        if index is None:
            index = (0,) * self.ndim
        vecs = [ax.T[:, i] for ax, i in zip(self.axes, index)]
        return outer_product(vecs)


@dataclass(frozen=True, eq=False)
class FullOperator:
    """Separable part plus an optional non-separable nodal potential V2."""

    sep: SeparableOperator
    v2: np.ndarray | None = None

    def __post_init__(self):
        if self.v2 is not None:
            v2 = np.asarray(self.v2, dtype=float)
            if v2.shape != self.sep.shape:
                raise ParameterError(f"V2 shape {v2.shape} does not match grid shape {self.sep.shape}")
            object.__setattr__(self, "v2", v2)

    @property
    def shape(self):
        return self.sep.shape

    @property
    def mass(self):
        return self.sep.mass

    @property
    def shift(self):
        return self.sep.shift

    @property
    def is_separable(self):
        return self.v2 is None

    def shifted(self, sigma) -> FullOperator:
        return FullOperator(self.sep.shifted(sigma), self.v2)

    def with_v2(self, v2) -> FullOperator:
        return FullOperator(self.sep, v2)

    def apply(self, u):
        out = self.sep.apply(u)
        if self.v2 is not None:
            out = out + self.v2 * u
        return out


def build_operator(bases, axis_funcs=None, v2=None) -> FullOperator:
    """Factorize each axis; repeated (basis, function) objects are factorized once."""
    if axis_funcs is None:
        axis_funcs = [None] * len(bases)
    if len(axis_funcs) != len(bases):
        raise ParameterError(f"{len(axis_funcs)} axis potentials for {len(bases)} axes")
    cache = {}
    axes = []
    for b, f in zip(bases, axis_funcs):
        key = (id(b), id(f))
        if key not in cache:
            cache[key] = build_axis(b, f)
        axes.append(cache[key])
    return FullOperator(SeparableOperator(axes), v2)
