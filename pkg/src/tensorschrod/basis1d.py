"""One-dimensional Q^k spectral-element axes on [-L, L] with Dirichlet ends.

Nodes are Gauss-Lobatto-Legendre (GLL) points per cell, the mass matrix is
the lumped (quadrature) mass, so it is diagonal.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.optimize import brentq

from .errors import NumericalError, ParameterError

MAX_GLL_DEGREE = 40
_NEWTON_TOL = 1e-14
_NEWTON_MAXITER = 100


def legendre(k, x):
    """Return (P_k(x), P_{k-1}(x)) by the three-term recurrence."""
    x = np.asarray(x, dtype=float)
    p_prev = np.ones_like(x)
    if k == 0:
        return p_prev, np.zeros_like(x)
    p = x.copy()
    for j in range(1, k):
        p_prev, p = p, ((2 * j + 1) * x * p - j * p_prev) / (j + 1)
    return p, p_prev


def legendre_deriv(k, x):
    """P_k'(x), valid for |x| < 1 and at the endpoints."""
    x = np.asarray(x, dtype=float)
    p, p_prev = legendre(k, x)
    out = np.empty_like(x)
    inner = np.abs(x) < 1.0
    out[inner] = k * (p_prev[inner] - x[inner] * p[inner]) / (1.0 - x[inner] ** 2)
    edge = ~inner
    out[edge] = np.sign(x[edge]) ** (k + 1) * k * (k + 1) / 2.0
    return out


@dataclass(frozen=True)
class GllRule:
    degree: int
    nodes: np.ndarray
    weights: np.ndarray
    diff_matrix: np.ndarray


def _gll_nodes_newton(k):
    x = -np.cos(np.pi * np.arange(k + 1) / k)
    for _ in range(_NEWTON_MAXITER):
        p, p_prev = legendre(k, x)
        dx = (x * p - p_prev) / ((k + 1) * p)
        x = x - dx
        if np.max(np.abs(dx)) < _NEWTON_TOL:
            return x
    return None


def _gll_nodes_bisection(k):
    # interior GLL nodes are the roots of P_k'; bracket sign changes on a fine grid
    grid = -np.cos(np.pi * np.linspace(0.0, 1.0, 200 * k + 1))[1:-1]
    vals = legendre_deriv(k, grid)
    roots = []
    for a, b, fa, fb in zip(grid[:-1], grid[1:], vals[:-1], vals[1:]):
        if fa == 0.0:
            roots.append(a)
        elif fa * fb < 0.0:
            roots.append(brentq(lambda t: float(legendre_deriv(k, np.array([t]))[0]), a, b, xtol=1e-15))
    if len(roots) != k - 1:
        raise NumericalError(f"GLL root finding failed for k={k}")
    return np.concatenate([[-1.0], roots, [1.0]])


def gll_rule(k: int) -> GllRule:
    """(k+1)-point Gauss-Lobatto-Legendre nodes, weights and derivative matrix."""
    if not isinstance(k, (int, np.integer)) or not 1 <= k <= MAX_GLL_DEGREE:
        raise ParameterError(f"GLL degree must be an integer in [1, {MAX_GLL_DEGREE}], got {k!r}")
    k = int(k)
    x = _gll_nodes_newton(k)
    if x is None:
        x = _gll_nodes_bisection(k)
    x = 0.5 * (x - x[::-1])
    x[0], x[-1] = -1.0, 1.0
    p, _ = legendre(k, x)
    w = 2.0 / (k * (k + 1) * p**2)
    w = 0.5 * (w + w[::-1])

    diff = x[:, None] - x[None, :]
    np.fill_diagonal(diff, 1.0)
    D = (p[:, None] / p[None, :]) / diff
    np.fill_diagonal(D, 0.0)
    np.fill_diagonal(D, -D.sum(axis=1))
    return GllRule(k, x, w, D)


@dataclass(frozen=True, eq=False)
class Basis1D:
    """Assembled Dirichlet Q^k SEM axis. Arrays cover interior nodes only."""

    L: float
    n_cell: int
    k: int
    rule: GllRule
    full_nodes: np.ndarray
    nodes: np.ndarray
    mass_diag: np.ndarray
    stiffness: np.ndarray
    boundary_condition: str = "dirichlet"

    @property
    def n(self) -> int:
        return self.nodes.size

    @property
    def h(self) -> float:
        return 2.0 * self.L / self.n_cell

    @cached_property
    def kinetic(self) -> np.ndarray:
        """Dense discrete -d^2/dx^2, i.e. M^-1 S."""
        return self.stiffness / self.mass_diag[:, None]

    def __repr__(self):
        return f"Basis1D(L={self.L}, n_cell={self.n_cell}, k={self.k}, n={self.n})"


def assemble_sem(L: float, n_cell: int, k: int) -> Basis1D:
    if not L > 0:
        raise ParameterError(f"domain half-width must be positive, got {L}")
    if int(n_cell) != n_cell or n_cell < 1:
        raise ParameterError(f"cell count must be a positive integer, got {n_cell}")
    rule = gll_rule(k)
    n_cell = int(n_cell)
    h = 2.0 * L / n_cell
    n_full = n_cell * k + 1

    m_loc = rule.weights * h / 2.0
    s_loc = (2.0 / h) * (rule.diff_matrix.T * rule.weights) @ rule.diff_matrix

    x_full = np.empty(n_full)
    mass = np.zeros(n_full)
    stiff = np.zeros((n_full, n_full))
    for c in range(n_cell):
        sl = slice(c * k, c * k + k + 1)
        a = -L + c * h
        x_full[sl] = a + (rule.nodes + 1.0) * h / 2.0
        mass[sl] += m_loc
        stiff[sl, sl] += s_loc
    x_full[0], x_full[-1] = -L, L
    stiff = 0.5 * (stiff + stiff.T)

    inner = slice(1, n_full - 1)
    return Basis1D(
        L=float(L),
        n_cell=n_cell,
        k=int(k),
        rule=rule,
        full_nodes=x_full,
        nodes=x_full[inner].copy(),
        mass_diag=mass[inner].copy(),
        stiffness=stiff[inner, inner].copy(),
    )


def interp_matrix(coarse: Basis1D, fine: Basis1D) -> np.ndarray:
    """Piecewise-linear prolongation of interior nodal values, zero at +-L."""
    if not np.isclose(coarse.L, fine.L, rtol=1e-14, atol=0.0):
        raise ParameterError(f"interp_matrix needs a common domain, got L={coarse.L} and L={fine.L}")
    xc = coarse.full_nodes
    xf = fine.nodes
    j = np.clip(np.searchsorted(xc, xf, side="right") - 1, 0, xc.size - 2)
    t = (xf - xc[j]) / (xc[j + 1] - xc[j])
    full = np.zeros((xf.size, xc.size))
    rows = np.arange(xf.size)
    full[rows, j] = 1.0 - t
    full[rows, j + 1] += t
    return full[:, 1:-1]


def _barycentric_weights(x):
    diff = x[:, None] - x[None, :]
    np.fill_diagonal(diff, 1.0)
    return 1.0 / diff.prod(axis=1)


def eval_matrix(basis: Basis1D, targets) -> np.ndarray:
    """Rows evaluate the cell-local degree-k interpolant at each target.

    Columns index the full node set (boundary nodes included).
    """
    t = np.atleast_1d(np.asarray(targets, dtype=float))
    L, k = basis.L, basis.k
    tol = 1e-12 * L
    if np.any(t < -L - tol) or np.any(t > L + tol):
        raise ParameterError(f"evaluation targets must lie in [{-L}, {L}]")
    cell = np.clip(np.floor((t + L) / basis.h).astype(int), 0, basis.n_cell - 1)
    # cells share a scaled copy of the same reference nodes, so weights differ by a constant
    bw = _barycentric_weights(basis.rule.nodes)
    idx = cell[:, None] * k + np.arange(k + 1)[None, :]
    diff = t[:, None] - basis.full_nodes[idx]
    hit = diff == 0.0
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = bw[None, :] / diff
        local = terms / terms.sum(axis=1, keepdims=True)
    rows_hit = hit.any(axis=1)
    local[rows_hit] = hit[rows_hit].astype(float)
    out = np.zeros((t.size, basis.full_nodes.size))
    np.put_along_axis(out, idx, local, axis=1)
    return out


def eval_cellwise(basis: Basis1D, nodal_values, targets) -> np.ndarray:
    """Evaluate a nodal field at arbitrary points by cell-local interpolation.

    `nodal_values` holds either all interior values (length n) or the full
    node set including the Dirichlet end values (length n + 2).
    """
    v = np.asarray(nodal_values)
    if v.shape[0] == basis.n:
        v = np.concatenate([np.zeros((1,) + v.shape[1:], v.dtype), v, np.zeros((1,) + v.shape[1:], v.dtype)])
    elif v.shape[0] != basis.full_nodes.size:
        raise ParameterError(f"expected {basis.n} or {basis.n + 2} nodal values, got {v.shape[0]}")
    return eval_matrix(basis, targets) @ v
