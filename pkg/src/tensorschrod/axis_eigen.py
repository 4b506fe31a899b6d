"""Per-axis eigendecomposition H_d = T diag(lam) T^-1 (the offline setup step)."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .basis1d import Basis1D
from .errors import NumericalError, ParameterError
from .hermite import HermiteBasis, hermite_operator

_SYM_TOL = 1e-8


def fix_signs(Q):
    """Flip columns so the largest-magnitude entry of each is positive.

    Entries within a relative 1e-8 of the column maximum count as tied and the
    first one decides, so mirror-symmetric eigenvectors get a stable sign.
    """
    A = np.abs(Q)
    idx = np.argmax(A >= A.max(axis=0) * (1 - 1e-8), axis=0)
    signs = np.sign(Q[idx, np.arange(Q.shape[1])])
    signs[signs == 0] = 1.0
    return Q * signs


def sym_eig(A):
    """Ascending eigenvalues and sign-fixed orthonormal eigenvectors of symmetric A."""
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ParameterError(f"sym_eig needs a square matrix, got shape {A.shape}")
    scale = np.max(np.abs(A)) if A.size else 0.0
    if np.max(np.abs(A - A.T), initial=0.0) > _SYM_TOL * scale:
        raise ParameterError("sym_eig input is not symmetric")
    try:
        lam, Q = np.linalg.eigh(0.5 * (A + A.T))
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"symmetric eigensolver did not converge: {exc}") from exc
    return lam, fix_signs(Q)


@dataclass(frozen=True, eq=False)
class AxisEigens:
    """Factorization of one axis operator H = K + diag(f(x))."""

    basis: Basis1D | HermiteBasis
    eigenvalues: np.ndarray
    T: np.ndarray
    T_inv: np.ndarray
    matrix: np.ndarray
    f_values: np.ndarray

    @property
    def n(self) -> int:
        return self.eigenvalues.size

    @property
    def mass_diag(self) -> np.ndarray:
        return self.basis.mass_diag

    @property
    def nodes(self) -> np.ndarray:
        return self.basis.nodes


def _sample(f, x):
    if f is None:
        return np.zeros_like(x)
    fx = np.asarray(f(x), dtype=float) * np.ones_like(x)
    if not np.all(np.isfinite(fx)):
        raise ParameterError("axis potential is not finite at every node")
    return fx


def build_axis(basis, f=None) -> AxisEigens:
    """Eigendecompose the axis operator for a separable potential term f."""
    fx = _sample(f, basis.nodes)
    if isinstance(basis, HermiteBasis):
        A, p = hermite_operator(basis, lambda x: fx)
        lam, Q = sym_eig(A)
        T = Q / p[:, None]
        T_inv = Q.T * p[None, :]
    elif isinstance(basis, Basis1D):
        r = 1.0 / np.sqrt(basis.mass_diag)
        A = r[:, None] * basis.stiffness * r[None, :] + np.diag(fx)
        lam, Q = sym_eig(A)
        T = Q * r[:, None]
        T_inv = Q.T / r[None, :]
    else:
        raise ParameterError(f"unsupported basis type {type(basis).__name__}")
    return AxisEigens(
        basis=basis,
        eigenvalues=lam,
        T=T,
        T_inv=T_inv,
        matrix=basis.kinetic + np.diag(fx),
        f_values=fx,
    )
