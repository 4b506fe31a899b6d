"""Dense brute-force references for small grids."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .axis_eigen import sym_eig
from .errors import CapabilityError, NumericalError, ParameterError
from .operator import FullOperator, SeparableOperator

MAX_ASSEMBLE = 20000
MAX_EXPM = 4000
MAX_CLUSTER = 5000


def kron_sum(mats):
    """sum_a I ⊗ .. ⊗ K_a ⊗ .. ⊗ I with axis 1 the rightmost factor."""
    sizes = [m.shape[0] for m in mats]
    N = int(np.prod(sizes))
    out = np.zeros((N, N))
    for a, K in enumerate(mats):
        left = int(np.prod(sizes[a + 1:]))
        right = int(np.prod(sizes[:a]))
        out += np.kron(np.eye(left), np.kron(K, np.eye(right)))
    return out


def dense_assemble(op) -> np.ndarray:
    """Explicit matrix of `op` acting on vec(u) (axis 1 fastest)."""
    if isinstance(op, SeparableOperator):
        op = FullOperator(op)
    N = int(np.prod(op.shape))
    if N > MAX_ASSEMBLE:
        raise CapabilityError(f"dense assembly limited to {MAX_ASSEMBLE} unknowns, got {N}")
    H = kron_sum([ax.matrix for ax in op.sep.axes])
    diag = -op.shift * np.ones(N)
    if op.v2 is not None:
        diag = diag + op.v2.ravel(order="F")
    return H + np.diag(diag)


def symmetric_form(op):
    """(Hs, s) with Hs = S H S^-1 symmetric, S = diag(s) the square root of the weights.

    For SEM axes s is sqrt(mass); for Hermite axes it is the diagonal similarity
    1/psi_{n-1}, which differs from sqrt(mass) by a constant factor.
    """
    if isinstance(op, SeparableOperator):
        op = FullOperator(op)
    H = dense_assemble(op)
    s = np.sqrt(op.mass).ravel(order="F")
    Hs = s[:, None] * H / s[None, :]
    asym = np.max(np.abs(Hs - Hs.T))
    if asym > 1e-8 * np.max(np.abs(Hs)):
        raise NumericalError(f"operator is not self-adjoint in the mass inner product (asymmetry {asym:.2e})")
    return 0.5 * (Hs + Hs.T), s


def dense_expm_hermitian(H, t) -> np.ndarray:
    """exp(-i H t) for real symmetric or complex Hermitian H."""
    H = np.asarray(H)
    if H.ndim != 2 or H.shape[0] != H.shape[1]:
        raise ParameterError("need a square matrix")
    if H.shape[0] > MAX_EXPM:
        raise CapabilityError(f"dense exponential limited to {MAX_EXPM} unknowns")
    scale = max(np.max(np.abs(H)), 1e-300)
    if np.max(np.abs(H - H.conj().T)) > 1e-10 * scale:
        raise ParameterError("dense_expm_hermitian input is not Hermitian")
    lam, Q = np.linalg.eigh(0.5 * (H + H.conj().T))
    return (Q * np.exp(-1j * lam * t)) @ Q.conj().T


def dense_ground_state(op):
    """(lambda_1, u_1) from a dense eigensolve, u_1 mass-normalized and positive."""
    Hs, s = symmetric_form(op)
    lam, Q = sym_eig(Hs)
    u = Q[:, 0] / s
    m = op.mass.ravel(order="F")
    u = u / np.sqrt(np.sum(m * u * u))
    if u[np.argmax(np.abs(u))] < 0:
        u = -u
    return lam[0], u.reshape(op.shape, order="F")


@dataclass
class ClusteringReport:
    eigenvalues: np.ndarray
    outliers: int
    kappa: float
    epsilon: float


def clustering_report(sep: SeparableOperator, v2, eps=0.1) -> ClusteringReport:
    """Spectrum of I + A^-1/2 V2 A^-1/2, the A-symmetric form of A^-1 (A + V2)."""
    N = int(np.prod(sep.shape))
    if N > MAX_CLUSTER:
        raise CapabilityError(f"clustering analysis limited to {MAX_CLUSTER} unknowns, got {N}")
    v2 = np.asarray(v2, dtype=float)
    if v2.shape != sep.shape:
        raise ParameterError(f"V2 shape {v2.shape} does not match grid {sep.shape}")
    As, s = symmetric_form(sep)
    lam, Q = sym_eig(As)
    if lam[0] <= 0:
        raise NumericalError(f"A is not positive definite (lambda_min = {lam[0]:.3e})")
    # A^-1/2 in symmetric coordinates; V2 is diagonal so it is unchanged by S
    R = (Q / np.sqrt(lam)) @ Q.T
    K = np.eye(N) + R @ (v2.ravel(order="F")[:, None] * R)
    mu, _ = sym_eig(0.5 * (K + K.T))
    outliers = int(np.sum((mu <= 1 - eps) | (mu >= 1 + eps)))
    return ClusteringReport(mu, outliers, float(mu[-1] / mu[0]), eps)
