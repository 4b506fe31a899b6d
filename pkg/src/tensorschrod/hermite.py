"""Hermite-function collocation on the whole real line."""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .errors import CapabilityError, NumericalError, ParameterError

MAX_HERMITE_N = 745
_ASYM_TOL = 1e-8


def hermite_functions(n_max, x):
    """Normalized Hermite functions psi_0..psi_{n_max} at x, shape (n_max+1, len(x))."""
    x = np.asarray(x, dtype=float)
    out = np.empty((n_max + 1,) + x.shape)
    out[0] = np.pi**-0.25 * np.exp(-0.5 * x**2)
    if n_max >= 1:
        out[1] = np.sqrt(2.0) * x * out[0]
    for j in range(1, n_max):
        out[j + 1] = x * np.sqrt(2.0 / (j + 1)) * out[j] - np.sqrt(j / (j + 1)) * out[j - 1]
    return out


@dataclass(frozen=True, eq=False)
class HermiteBasis:
    """n Hermite-Gauss nodes with the Hermite-function derivative matrix.

    `mass_diag` holds the Hermite-function quadrature weights
    1 / (n psi_{n-1}(x_j)^2), which integrate products psi_a psi_b exactly
    for a + b <= 2n - 1.
    """

    nodes: np.ndarray
    psi_last: np.ndarray
    diff_matrix: np.ndarray

    L = np.inf

    @property
    def n(self) -> int:
        return self.nodes.size

    @cached_property
    def mass_diag(self) -> np.ndarray:
        return 1.0 / (self.n * self.psi_last**2)

    @cached_property
    def kinetic(self) -> np.ndarray:
        """Dense -D^2 (not symmetric; self-adjoint in the mass_diag inner product)."""
        return -self.diff_matrix @ self.diff_matrix

    def __repr__(self):
        return f"HermiteBasis(n={self.n})"


def hermite_basis(n: int) -> HermiteBasis:
    if int(n) != n or n < 2:
        raise ParameterError(f"Hermite basis needs an integer n >= 2, got {n!r}")
    n = int(n)
    if n > MAX_HERMITE_N:
        raise CapabilityError(
            f"n={n} exceeds {MAX_HERMITE_N}: the Hermite recurrence underflows in float64 at the outer nodes"
        )
    off = np.sqrt(np.arange(1, n) / 2.0)
    x = eigh_tridiagonal(np.zeros(n), off, eigvals_only=True)
    x = np.sort(x)
    x = 0.5 * (x - x[::-1])
    psi = hermite_functions(n - 1, x)[-1]
    if np.any(psi == 0.0) or not np.all(np.isfinite(psi)):
        raise CapabilityError(f"psi_{n - 1} underflows at a node for n={n}")
    diff = x[:, None] - x[None, :]
    np.fill_diagonal(diff, 1.0)
    D = (psi[:, None] / psi[None, :]) / diff
    np.fill_diagonal(D, 0.0)
    return HermiteBasis(nodes=x, psi_last=psi, diff_matrix=D)


def hermite_operator(basis: HermiteBasis, f=None):
    """Symmetrized 1D operator and its diagonal similarity.

    Returns (A_sym, p) with p the diagonal of P = diag(1 / psi_{n-1}(x_j)):
    A_sym = P (-D^2) P^-1 + diag(f(x_j)), averaged with its transpose.
    """
    p = 1.0 / basis.psi_last
    A = p[:, None] * basis.kinetic / p[None, :]
    if f is not None:
        fx = np.asarray(f(basis.nodes), dtype=float) * np.ones(basis.n)
        if not np.all(np.isfinite(fx)):
            raise ParameterError("potential is not finite at every Hermite node")
        A = A + np.diag(fx)
    scale = np.max(np.abs(A))
    asym = np.max(np.abs(A - A.T))
    if asym > _ASYM_TOL * scale:
        raise NumericalError(
            f"Hermite operator lost symmetry at n={basis.n}: asymmetry {asym:.3e} vs scale {scale:.3e}"
        )
    return 0.5 * (A + A.T), p


def hermite_eval_matrix(basis: HermiteBasis, targets) -> np.ndarray:
    """Rows evaluate the interpolant in span{psi_0..psi_{n-1}} at `targets`.

    The cardinal functions are psi_n(x) / (sqrt(2n) psi_{n-1}(x_j) (x - x_j)),
    since the nodes are the zeros of psi_n.
    """
    t = np.atleast_1d(np.asarray(targets, dtype=float))
    n = basis.n
    psi_n = hermite_functions(n, t)[-1]
    diff = t[:, None] - basis.nodes[None, :]
    hit = diff == 0.0
    with np.errstate(divide="ignore", invalid="ignore"):
        out = psi_n[:, None] / (np.sqrt(2.0 * n) * basis.psi_last[None, :] * diff)
    rows = hit.any(axis=1)
    out[rows] = hit[rows].astype(float)
    return out
