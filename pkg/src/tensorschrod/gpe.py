"""Defocusing Gross-Pitaevskii ground states by projected Sobolev gradient flows."""
from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .axis_eigen import build_axis
from .eigenpair import InverseIterConfig, inverse_iteration, normalize
from .errors import DivergenceError, ParameterError
from .krylov import PcgConfig, pcg
from .operator import FullOperator, SeparableOperator

log = logging.getLogger(__name__)

FLOWS = ("h1", "au")
INITS = ("constant", "eigenfunction", "supplied")


@dataclass(frozen=True, eq=False)
class GpeProblem:
    """-Δu + V u + beta u^3 = lambda u on the grid of `op`."""

    op: FullOperator
    beta: float

    def __post_init__(self):
        if self.beta < 0:
            raise ParameterError(f"beta must be >= 0 (defocusing), got {self.beta}")
        if self.op.shift != 0:
            raise ParameterError("GPE operator must be unshifted")

    @property
    def mass(self):
        return self.op.mass

    @cached_property
    def laplacian(self) -> SeparableOperator:
        """-Δ on the same axes (no potential)."""
        return SeparableOperator([build_axis(ax.basis) for ax in self.op.sep.axes])


@dataclass(frozen=True)
class FlowConfig:
    flow: str = "h1"
    tau: float | None = None  # None: 0.1 for h1, 1.0 for au
    alpha: float = 20.0
    energy_tol: float = 1e-12
    max_iter: int = 5000
    pcg: PcgConfig = field(default_factory=PcgConfig)
    init: str = "constant"
    record_history: bool = True

    def __post_init__(self):
        if self.flow not in FLOWS:
            raise ParameterError(f"unknown flow {self.flow!r}; choose from {FLOWS}")
        if self.init not in INITS:
            raise ParameterError(f"unknown init {self.init!r}; choose from {INITS}")
        if self.tau is None:
            object.__setattr__(self, "tau", 0.1 if self.flow == "h1" else 1.0)
        if not self.tau > 0:
            raise ParameterError("tau must be positive")
        if not self.alpha > 0:
            raise ParameterError("alpha must be positive")
        if not self.energy_tol > 0 or self.max_iter < 1:
            raise ParameterError("energy_tol must be positive and max_iter >= 1")


@dataclass
class FlowResult:
    u: np.ndarray
    energy: float
    eigenvalue: float
    iterations: int
    converged: bool
    linear_solves: int
    history: list


def gpe_energy(p: GpeProblem, u) -> float:
    m = p.mass
    quad = 0.5 * float(np.sum(m * u * p.op.apply(u)))
    return quad + 0.25 * p.beta * float(np.sum(m * u**4))


def gpe_eigenvalue(p: GpeProblem, u) -> float:
    m = p.mass
    return float(np.sum(m * u * p.op.apply(u)) + p.beta * np.sum(m * u**4))


def l2_gradient(p: GpeProblem, u):
    return p.op.apply(u) + p.beta * u**3


def h1_gradient(p: GpeProblem, u, alpha):
    """Riemannian gradient for g(w, z) = (∇w, ∇z) + alpha (w, z)."""
    m = p.mass
    solver = p.laplacian.shifted(-alpha)
    rt = solver.solve(l2_gradient(p, u))
    ut = solver.solve(u)
    return rt - (np.sum(m * rt * u) / np.sum(m * ut * u)) * ut


def au_gradient(p: GpeProblem, u, pcg_cfg, x0=None):
    """Riemannian gradient for the a_u metric; returns (grad, w, pcg report)."""
    m = p.mass
    u2 = p.beta * u**2

    def apply_a(x):
        return p.op.apply(x) + u2 * x

    w, rep = pcg(apply_a, p.op.sep.solve, u, x0=x0, cfg=pcg_cfg, weights=m)
    if not rep.converged:
        log.warning("a_u inner PCG stopped at residual %.2e", rep.residual)
    grad = u - (np.sum(m * u * u) / np.sum(m * w * u)) * w
    return grad, w, rep


def initial_guess(p: GpeProblem, kind, u0=None):
    m = p.mass
    if kind == "supplied":
        if u0 is None:
            raise ParameterError("init=supplied needs an initial field")
        return normalize(np.asarray(u0, dtype=float), m)
    if kind == "constant":
        return normalize(np.ones(p.op.shape), m)
    if p.op.is_separable:
        return normalize(p.op.sep.eigenvector(), m)
    return inverse_iteration(p.op, InverseIterConfig()).u


def gpe_gradient_flow(p: GpeProblem, cfg: FlowConfig | None = None, u0=None) -> FlowResult:
    cfg = cfg or FlowConfig()
    m = p.mass
    t_start = time.perf_counter()
    u = initial_guess(p, cfg.init, u0)
    E = gpe_energy(p, u)
    history = []
    solves = 0
    rises = 0
    w = None
    converged = False
    it = 0
    for it in range(1, cfg.max_iter + 1):
        if cfg.flow == "h1":
            grad = h1_gradient(p, u, cfg.alpha)
            solves += 2
        else:
            grad, w, rep = au_gradient(p, u, cfg.pcg, x0=w)
            solves += rep.iterations + 1
        u = normalize(u - cfg.tau * grad, m)
        E_new = gpe_energy(p, u)
        rel = abs(E_new - E) / abs(E_new)
        rises = rises + 1 if E_new > E * (1 + 1e-13) else 0
        E = E_new
        if cfg.record_history:
            history.append((it, E, rel, solves, time.perf_counter() - t_start))
        if not np.isfinite(E):
            raise DivergenceError(f"energy became {E} at iteration {it}; try a smaller tau")
        if rises > 10:
            raise DivergenceError(
                f"energy increased for {rises} consecutive steps at iteration {it}; try a smaller tau (now {cfg.tau})"
            )
        if rel < cfg.energy_tol:
            converged = True
            break
    if not converged:
        log.warning("%s flow hit max_iter=%d (last relative change %.2e)", cfg.flow, cfg.max_iter, rel)
    return FlowResult(u, E, gpe_eigenvalue(p, u), it, converged, solves, history)
