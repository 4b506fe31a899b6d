"""Ground states by shifted inverse iteration, with multi-level continuation."""
from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field

import numpy as np

from .basis1d import Basis1D, interp_matrix
from .errors import ParameterError, ShiftError
from .krylov import PcgConfig, pcg
from .operator import FullOperator
from .tensor import kron_apply

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class ShiftPolicy:
    """How sigma is derived from lambda_min of the separable part.

    kind "fraction": sigma = value * lambda_min; "offset": lambda_min - value;
    "zero": sigma = 0.
    """

    kind: str = "fraction"
    value: float = 0.9

    def __post_init__(self):
        if self.kind not in ("fraction", "offset", "zero"):
            raise ParameterError(f"unknown shift policy {self.kind!r}")

    def sigma(self, lambda_min):
        if self.kind == "fraction":
            return self.value * lambda_min
        if self.kind == "offset":
            return lambda_min - self.value
        return 0.0


@dataclass(frozen=True)
class InverseIterConfig:
    shift: ShiftPolicy = field(default_factory=ShiftPolicy)
    eig_rel_tol: float = 1e-12
    max_outer: int = 100
    pcg: PcgConfig = field(default_factory=PcgConfig)
    # precondition with (A - sigma)^-1 instead of A^-1
    shifted_precond: bool = False

    def __post_init__(self):
        if not self.eig_rel_tol > 0:
            raise ParameterError("eig_rel_tol must be positive")
        if self.max_outer < 1:
            raise ParameterError("max_outer must be >= 1")


@dataclass
class EigenpairResult:
    eigenvalue: float
    u: np.ndarray
    outer_iterations: int
    inner_solves: int
    pcg_per_outer: list
    rel_change: float
    residual: float
    converged: bool
    sigma: float
    history: list = field(default_factory=list)
    levels: list = field(default_factory=list)


def normalize(u, mass):
    nrm = np.sqrt(np.sum(mass * u * u))
    if not nrm > 0:
        raise ParameterError("cannot normalize a zero field")
    u = u / nrm
    # ground states are positive; fix the sign at the largest-magnitude node
    if u.flat[np.argmax(np.abs(u))] < 0:
        u = -u
    return u


def rayleigh(op: FullOperator, u):
    m = op.mass
    return float(np.sum(m * u * op.apply(u)) / np.sum(m * u * u))


def inverse_iteration(op: FullOperator, cfg: InverseIterConfig | None = None, u0=None) -> EigenpairResult:
    """Power iteration on (H - sigma)^-1 with sigma from the shift policy."""
    cfg = cfg or InverseIterConfig()
    if op.shift != 0:
        raise ParameterError("pass the unshifted operator; the shift comes from the config")
    sep = op.sep
    m = op.mass
    sigma = cfg.shift.sigma(sep.lambda_min)
    shifted = op.shifted(sigma)
    sep_s = shifted.sep
    u = normalize(np.array(sep.eigenvector() if u0 is None else u0, dtype=float), m)
    lam = rayleigh(op, u)
    if sigma >= lam:
        raise ShiftError(f"shift {sigma:.6g} is not below the Rayleigh estimate {lam:.6g}")

    if op.is_separable:
        solve = sep_s.solve
    else:
        pre = sep_s.solve if cfg.shifted_precond else sep.solve

    history = [lam]
    pcg_counts = []
    inner = 0
    rel = np.inf
    converged = False
    it = 0
    for it in range(1, cfg.max_outer + 1):
        if op.is_separable:
            w = solve(u)
            inner += 1
        else:
            w, rep = pcg(shifted.apply, pre, u, x0=u / (lam - sigma), cfg=cfg.pcg, weights=m)
            pcg_counts.append(rep.iterations)
            inner += rep.iterations
            if not rep.converged:
                log.warning("inner PCG did not converge at outer step %d (residual %.2e)", it, rep.residual)
        u = normalize(w, m)
        lam_new = rayleigh(op, u)
        if sigma >= lam_new:
            raise ShiftError(f"shift {sigma:.6g} is not below the Rayleigh estimate {lam_new:.6g}")
        rel = abs(lam_new - lam) / abs(lam_new)
        lam = lam_new
        history.append(lam)
        log.debug("outer %d: lambda=%.15g rel=%.3e", it, lam, rel)
        if rel < cfg.eig_rel_tol:
            converged = True
            break

    r = op.apply(u) - lam * u
    res = float(np.sqrt(np.sum(m * r * r)))
    return EigenpairResult(
        eigenvalue=lam,
        u=u,
        outer_iterations=it,
        inner_solves=inner,
        pcg_per_outer=pcg_counts,
        rel_change=rel,
        residual=res,
        converged=converged,
        sigma=sigma,
        history=history,
    )


def prolong(u, coarse_bases, fine_bases):
    """Tensor-product piecewise-linear interpolation between SEM grids."""
    mats = []
    for c, f in zip(coarse_bases, fine_bases):
        if not (isinstance(c, Basis1D) and isinstance(f, Basis1D)):
            raise ParameterError("multi-level prolongation needs SEM axes")
        mats.append(interp_matrix(c, f))
    return kron_apply(u, mats)


def multilevel_ground_state(levels, build, cfg: InverseIterConfig | None = None) -> EigenpairResult:
    """Run inverse iteration on each level, prolonging the eigenvector upward.

    `build(level)` returns a FullOperator. The coarsest level starts from the
    ground state of the separable part. The result carries one row per level
    in `levels` with timings and iteration counts.
    """
    if not levels:
        raise ParameterError("need at least one level")
    cfg = cfg or InverseIterConfig()
    rows = []
    prev_op = prev_u = None
    res = None
    for level in levels:
        t0 = time.perf_counter()
        op = build(level)
        t_setup = time.perf_counter() - t0
        t0 = time.perf_counter()
        u0 = None
        if prev_op is not None:
            u0 = normalize(prolong(prev_u, prev_op.sep.bases, op.sep.bases), op.mass)
        t_interp = time.perf_counter() - t0
        t0 = time.perf_counter()
        res = inverse_iteration(op, cfg, u0)
        t_solve = time.perf_counter() - t0
        applications = res.inner_solves + len(res.pcg_per_outer) if res.pcg_per_outer else res.inner_solves
        rows.append({
            "n": "x".join(str(s) for s in op.shape),
            "setup_s": t_setup,
            "interp_s": t_interp,
            "solve_s": t_solve,
            "outer": res.outer_iterations,
            "pcg_min": min(res.pcg_per_outer) if res.pcg_per_outer else 0,
            "pcg_max": max(res.pcg_per_outer) if res.pcg_per_outer else 0,
            "precond_applications": applications,
            "eigenvalue": res.eigenvalue,
        })
        prev_op, prev_u = op, res.u
    res.levels = rows
    return res
