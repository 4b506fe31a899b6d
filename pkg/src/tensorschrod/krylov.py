"""Preconditioned conjugate gradient with residual telemetry."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .errors import BreakdownError, ParameterError

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class PcgConfig:
    rel_tol: float = 1e-12
    max_iter: int = 500
    record_history: bool = False
    # "l2": plain ||b - Ax||_2 / ||b||_2; "preconditioned": sqrt(r.Pr / b.Pb)
    stop_norm: str = "l2"

    def __post_init__(self):
        if not self.rel_tol > 0:
            raise ParameterError(f"rel_tol must be positive, got {self.rel_tol}")
        if self.max_iter < 1:
            raise ParameterError(f"max_iter must be >= 1, got {self.max_iter}")
        if self.stop_norm not in ("l2", "preconditioned"):
            raise ParameterError(f"unknown stop_norm {self.stop_norm!r}")


@dataclass
class PcgReport:
    iterations: int
    residual: float
    converged: bool
    history: list = field(default_factory=list)


def pcg(apply_a, precond, b, x0=None, cfg: PcgConfig | None = None, weights=None):
    """Solve A x = b for A self-adjoint positive definite.

    Inner products in the recurrence use `weights` (the mass tensor) when
    given, which is the inner product in which the collocated operator is
    symmetric. Returns ``(x, PcgReport)``; hitting `max_iter` returns the
    iterate with the smallest residual and ``converged=False``.
    """
    cfg = cfg or PcgConfig()
    b = np.asarray(b, dtype=float)
    w = 1.0 if weights is None else weights

    def dot(u, v):
        return float(np.sum(u * w * v))

    bnorm = float(np.linalg.norm(b))
    history = []
    if bnorm == 0.0:
        return np.zeros_like(b), PcgReport(0, 0.0, True, [0.0] if cfg.record_history else [])

    x = np.zeros_like(b) if x0 is None else np.array(x0, dtype=float)
    r = b - apply_a(x) if x0 is not None else b.copy()
    z = precond(r)
    rz = dot(r, z)
    bpb = dot(b, precond(b)) if cfg.stop_norm == "preconditioned" else None

    def measure(r, rz):
        if cfg.stop_norm == "l2":
            return float(np.linalg.norm(r)) / bnorm
        return float(np.sqrt(max(rz, 0.0) / bpb))

    res = measure(r, rz)
    if cfg.record_history:
        history.append(res)
    best_x, best_res = x.copy(), res
    if res <= cfg.rel_tol:
        return x, PcgReport(0, res, True, history)

    p = z.copy()
    for it in range(1, cfg.max_iter + 1):
        Ap = apply_a(p)
        pAp = dot(p, Ap)
        if not pAp > 0.0:
            raise BreakdownError("PCG met a non-positive curvature direction", it)
        alpha = rz / pAp
        x += alpha * p
        r -= alpha * Ap
        z = precond(r)
        rz_new = dot(r, z)
        res = measure(r, rz_new)
        if cfg.record_history:
            history.append(res)
        if res < best_res:
            best_res = res
            if res > cfg.rel_tol:
                best_x = x.copy()
        if res <= cfg.rel_tol:
            return x, PcgReport(it, res, True, history)
        p = z + (rz_new / rz) * p
        rz = rz_new

    log.warning("PCG stopped at max_iter=%d with relative residual %.3e", cfg.max_iter, best_res)
    return best_x, PcgReport(cfg.max_iter, best_res, False, history)


def scaled_preconditioner(solve, potential):
    """D^-1/2 solve D^-1/2 with D the diagonal `potential` (must be positive).

    With `solve` = (-Δ)^-1 and D = V this is the combined preconditioner
    V^-1/2 (-Δ)^-1 V^-1/2; with `solve` = (-Δ+V1)^-1 and D = V2 it is the
    V2-scaled variant.
    """
    potential = np.asarray(potential, dtype=float)
    if np.any(potential <= 0):
        raise ParameterError("scaled preconditioner needs a strictly positive diagonal")
    s = 1.0 / np.sqrt(potential)
    return lambda r: s * solve(s * r)
