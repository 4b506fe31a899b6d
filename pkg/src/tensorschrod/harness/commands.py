"""Experiment drivers, one per `run.command`.

Each driver takes the resolved config and the output directory and returns
(results, outputs): a dict of headline numbers for the manifest and the list
of files written. CSV layouts:

solve              n, setup_s, solve_s, pcg_iterations, rel_error, max_error
convergence-table  n_cell, n, h, setup_s, solve_s, rel_error, max_error, rate
ground-state       levels.csv: n, setup_s, interp_s, solve_s, outer, pcg_min,
                   pcg_max, precond_applications, eigenvalue
                   history.csv (finest level): outer, eigenvalue, rel_change, pcg
gpe                history.csv: iteration, energy, rel_change, linear_solves, wall_s
                   result.csv: flow, init, beta, energy, eigenvalue, iterations,
                   converged, linear_solves, wall_s
propagate          dt, error, rate, steps, wall_s, error_mass, norm_drift,
                   a_propagations, b_multiplications
pcg-bench          pcg.csv: preconditioner, n, iterations, residual, converged, solve_s
                   history.csv: preconditioner, iteration, residual
clustering         clustering.csv: L, n_cell, n, outliers, kappa, mu_min, mu_max
                   spectrum.csv: L, n_cell, index, mu
"""
from __future__ import annotations

import math
import os
import time

import numpy as np

from ..axis_eigen import build_axis
from ..basis1d import assemble_sem
from ..eigenpair import InverseIterConfig, ShiftPolicy, inverse_iteration, multilevel_ground_state, normalize
from ..errors import ConfigError, ParameterError
from ..gpe import FlowConfig, GpeProblem, gpe_gradient_flow
from ..hermite import hermite_basis
from ..krylov import PcgConfig, pcg, scaled_preconditioner
from ..operator import SeparableOperator, build_operator
from ..oracle import clustering_report
from ..potentials import PotentialSpec, build_potential
from ..problems import factors, manufactured, nodal_potential
from ..splitting import Manufactured, SplitSpec, evolve
from ..tensor import dump_field, load_field, outer_product
from .io import check_size, export_slice, slice_rows, uniform_field, write_csv


class Context:
    def __init__(self, cfg, out_dir, allow_large=False):
        self.cfg = cfg
        self.out = out_dir
        self.allow_large = allow_large
        self.timings = cfg["output"]["timings"]
        self.outputs = []

    def csv(self, name, rows, columns=None):
        path = os.path.join(self.out, name)
        write_csv(path, rows, columns, timings=self.timings)
        self.outputs.append(name)
        return path

    def field(self, u, bases):
        """Checkpoint and slice export for a converged real field."""
        ck = self.cfg["output"]["checkpoint"]
        if ck:
            dump_field(os.path.join(self.out, ck), u)
            self.outputs.append(ck)
        sl = self.cfg["slice"]
        if sl["enabled"]:
            xa, xb, vals = export_slice(u, bases, tuple(sl["axes"]), sl["fixed"], sl["resolution"])
            self.csv("slice.csv", slice_rows(xa, xb, vals), ["x_a", "x_b", "value"])


# ---- problem assembly ------------------------------------------------------

def grid_shape(cfg, n_cell=None):
    g = cfg["grid"]
    if g["basis"] == "hermite":
        n = n_cell or g["n"]
    else:
        n = (n_cell or g["n_cell"]) * g["k"] - 1
    return (n,) * g["dim"]


def make_bases(cfg, n_cell=None, L=None):
    """One shared 1-D basis per grid, repeated over the axes."""
    g = cfg["grid"]
    if g["basis"] == "hermite":
        b = hermite_basis(n_cell or g["n"])
    else:
        b = assemble_sem(L or g["L"], n_cell or g["n_cell"], g["k"])
    return [b] * g["dim"]


def potential_spec(cfg):
    p = dict(cfg["potential"])
    kind = p.pop("kind")
    if kind == "none":
        if any(v is not None for v in p.values()):
            raise ConfigError("potential parameters given with kind = none")
        return None
    params = {k: (tuple(v) if isinstance(v, list) else v) for k, v in p.items() if v is not None}
    spec = PotentialSpec(kind, params)
    spec.check_dim(cfg["grid"]["dim"])
    return spec


def make_operator(cfg, bases):
    spec = potential_spec(cfg)
    if spec is None:
        return build_operator(bases)
    funcs, v2 = build_potential(spec, bases)
    return build_operator(bases, funcs, v2)


def pcg_config(cfg, history=False):
    p = cfg["pcg"]
    return PcgConfig(rel_tol=p["tol"], max_iter=p["max_iter"], stop_norm=p["stop_norm"], record_history=history)


def eigen_config(cfg):
    e = cfg["eigen"]
    return InverseIterConfig(
        shift=ShiftPolicy(e["shift"], e["shift_value"]),
        eig_rel_tol=e["tol"],
        max_outer=e["max_outer"],
        pcg=pcg_config(cfg),
    )


def validate(cfg, allow_large):
    """Checks that need no allocation: dimension, potential, size guard."""
    g = cfg["grid"]
    potential_spec(cfg)
    if g["basis"] == "sem" and g["k"] > 40:
        raise ConfigError("[grid] k must be <= 40")
    sizes = [None]
    cmd = cfg.command
    if cmd == "convergence-table" and cfg["solve"]["n_cells"]:
        sizes = cfg["solve"]["n_cells"]
    elif cmd == "ground-state" and cfg["eigen"]["levels"]:
        sizes = cfg["eigen"]["levels"]
    elif cmd == "clustering" and cfg["clustering"]["n_cells"]:
        sizes = cfg["clustering"]["n_cells"]
    for s in sizes:
        check_size(grid_shape(cfg, s), allow_large, complex_=(cmd == "propagate"))
    if cfg["slice"]["enabled"]:
        axes = cfg["slice"]["axes"]
        if len(axes) != 2:
            raise ConfigError("[slice] axes needs exactly two entries")


# ---- commands --------------------------------------------------------------

def _solve_once(cfg, n_cell=None):
    t0 = time.perf_counter()
    bases = make_bases(cfg, n_cell)
    op = make_operator(cfg, bases)
    u_star, f = manufactured(op, cfg["solve"]["exact"])
    t_setup = time.perf_counter() - t0
    t0 = time.perf_counter()
    its = 0
    if op.is_separable:
        u = op.sep.solve(f)
    else:
        u, rep = pcg(op.apply, op.sep.solve, f, cfg=pcg_config(cfg), weights=op.mass)
        its = rep.iterations
    t_solve = time.perf_counter() - t0
    row = {
        "n": op.shape[0],
        "setup_s": t_setup,
        "solve_s": t_solve,
        "pcg_iterations": its,
        "rel_error": float(np.linalg.norm(u - u_star) / np.linalg.norm(u_star)),
        "max_error": float(np.max(np.abs(u - u_star))),
    }
    return row, u, bases


def cmd_solve(ctx):
    row, u, bases = _solve_once(ctx.cfg)
    ctx.csv("solve.csv", [row], ["n", "setup_s", "solve_s", "pcg_iterations", "rel_error", "max_error"])
    ctx.field(u, bases)
    return {"rel_error": row["rel_error"], "max_error": row["max_error"]}


def cmd_convergence_table(ctx):
    cfg = ctx.cfg
    g = cfg["grid"]
    n_cells = cfg["solve"]["n_cells"] or [g["n"] if g["basis"] == "hermite" else g["n_cell"]]
    rows = []
    for nc in n_cells:
        row, _, _ = _solve_once(cfg, nc)
        row["n_cell"] = nc
        # mesh width for SEM; for Hermite the "cell" count is the mode count
        row["h"] = 2 * g["L"] / nc if g["basis"] == "sem" else 1.0 / nc
        row["rate"] = math.nan
        if rows:
            prev = rows[-1]
            row["rate"] = math.log(prev["rel_error"] / row["rel_error"]) / math.log(prev["h"] / row["h"])
        rows.append(row)
    ctx.csv("convergence.csv", rows, ["n_cell", "n", "h", "setup_s", "solve_s", "rel_error", "max_error", "rate"])
    return {"rel_errors": [r["rel_error"] for r in rows], "rates": [r["rate"] for r in rows[1:]]}


def cmd_ground_state(ctx):
    cfg = ctx.cfg
    e = cfg["eigen"]
    icfg = eigen_config(cfg)
    levels = e["levels"] or [cfg["grid"]["n"] if cfg["grid"]["basis"] == "hermite" else cfg["grid"]["n_cell"]]
    if cfg["grid"]["basis"] == "hermite" and len(levels) > 1:
        raise ConfigError("multi-level continuation needs SEM axes; give a single level for hermite")

    def build(level):
        return make_operator(cfg, make_bases(cfg, level))

    res = multilevel_ground_state(levels, build, icfg)
    ctx.csv("levels.csv", res.levels, list(res.levels[0]))
    hist = []
    for i, lam in enumerate(res.history):
        rel = abs(lam - res.history[i - 1]) / abs(lam) if i else math.nan
        pcg_its = res.pcg_per_outer[i - 1] if i and res.pcg_per_outer else 0
        hist.append({"outer": i, "eigenvalue": lam, "rel_change": rel, "pcg": pcg_its})
    ctx.csv("history.csv", hist, ["outer", "eigenvalue", "rel_change", "pcg"])
    results = {"eigenvalue": res.eigenvalue, "outer_iterations": res.outer_iterations, "converged": res.converged}
    if e["cold_compare"] and len(levels) > 1:
        t0 = time.perf_counter()
        cold = inverse_iteration(build(levels[-1]), icfg)
        ctx.csv("cold.csv", [{
            "n": "x".join(str(s) for s in cold.u.shape),
            "solve_s": time.perf_counter() - t0,
            "outer": cold.outer_iterations,
            "eigenvalue": cold.eigenvalue,
        }], ["n", "solve_s", "outer", "eigenvalue"])
        results["cold_outer_iterations"] = cold.outer_iterations
        results["cold_eigenvalue"] = cold.eigenvalue
    ctx.field(res.u, make_bases(cfg, levels[-1]))
    return results


def cmd_gpe(ctx):
    cfg = ctx.cfg
    g = cfg["gpe"]
    bases = make_bases(cfg)
    op = make_operator(cfg, bases)
    init, u0 = g["init"], None
    if init == "checkpoint":
        if not g["init_file"]:
            raise ConfigError("[gpe] init = checkpoint needs init_file")
        u0 = load_field(g["init_file"])
        if u0.shape != op.shape:
            raise ConfigError(f"checkpoint shape {u0.shape} does not match grid {op.shape}")
        init = "supplied"
    fcfg = FlowConfig(flow=g["flow"], tau=g["tau"], alpha=g["alpha"], energy_tol=g["tol"],
                      max_iter=g["max_iter"], pcg=pcg_config(cfg), init=init)
    t0 = time.perf_counter()
    res = gpe_gradient_flow(GpeProblem(op, g["beta"]), fcfg, u0)
    wall = time.perf_counter() - t0
    ctx.csv("history.csv", [dict(zip(("iteration", "energy", "rel_change", "linear_solves", "wall_s"), h))
                            for h in res.history])
    ctx.csv("result.csv", [{
        "flow": g["flow"], "init": g["init"], "beta": g["beta"], "energy": res.energy,
        "eigenvalue": res.eigenvalue, "iterations": res.iterations, "converged": res.converged,
        "linear_solves": res.linear_solves, "wall_s": wall,
    }])
    ctx.field(res.u, bases)
    return {"energy": res.energy, "eigenvalue": res.eigenvalue, "iterations": res.iterations,
            "converged": res.converged}


def split_operators(op, split):
    """(A, B) for the two splittings; B is a nodal field or None."""
    if split == "separable":
        return op.sep, op.v2
    lap = SeparableOperator([build_axis(ax.basis) for ax in op.sep.axes])
    return lap, nodal_potential(op)


def cmd_propagate(ctx):
    cfg = ctx.cfg
    p = cfg["propagate"]
    bases = make_bases(cfg)
    op = make_operator(cfg, bases)
    A, B = split_operators(op, p["split"])
    ref = p["reference"]
    if ref == "auto":
        ref = "exact" if op.is_separable else "manufactured"
    if ref == "exact" and not op.is_separable:
        raise ConfigError("[propagate] reference = exact needs a separable potential")
    psi0 = None
    if ref == "manufactured" or p["initial"] == "ground-state":
        if op.is_separable:
            lam, u = op.sep.lambda_min, op.sep.eigenvector()
        else:
            r = inverse_iteration(op, eigen_config(cfg))
            lam, u = r.eigenvalue, r.u
        psi0 = normalize(u, op.mass)
        reference = Manufactured(lam, psi0) if ref == "manufactured" else op.sep
    else:
        reference = op.sep
    if psi0 is None or p["initial"] == "sin-product":
        L = getattr(bases[0], "L", 1.0)
        psi0 = outer_product([g(b.nodes) for (g, _), b in zip(factors("sin-product", len(bases), L), bases)])
    rows = []
    for dt in p["dt"]:
        spec = SplitSpec(dt=dt, T=p["T"], M=p["M"], composition=p["composition"], split=p["split"], merge=p["merge"])
        r = evolve(spec, A, B, psi0, reference)
        rate = math.nan
        if rows:
            rate = math.log(rows[-1]["error"] / r.error) / math.log(rows[-1]["dt"] / dt)
        rows.append({
            "dt": dt, "error": r.error, "rate": rate, "steps": r.steps, "wall_s": r.seconds,
            "error_mass": r.error_mass, "norm_drift": r.norm_drift,
            "a_propagations": r.a_propagations, "b_multiplications": r.b_multiplications,
        })
    ctx.csv("convergence.csv", rows)
    return {"errors": [r["error"] for r in rows], "rates": [r["rate"] for r in rows[1:]],
            "max_norm_drift": max(r["norm_drift"] for r in rows), "reference": ref}


def preconditioners(op, names):
    lap = SeparableOperator([build_axis(ax.basis) for ax in op.sep.axes])
    out = {}
    for name in names:
        if name == "tensor":
            out[name] = op.sep.solve
        elif name == "laplacian":
            out[name] = lap.solve
        elif name == "combined":
            out[name] = scaled_preconditioner(lap.solve, nodal_potential(op))
        else:
            if op.v2 is None:
                raise ConfigError("v2-scaled preconditioner needs a non-separable potential")
            out[name] = scaled_preconditioner(op.sep.solve, op.v2)
    return out


def cmd_pcg_bench(ctx):
    cfg = ctx.cfg
    bases = make_bases(cfg)
    op = make_operator(cfg, bases)
    b = uniform_field(cfg["run"]["seed"], op.shape)
    pc = pcg_config(cfg, history=True)
    rows, hist = [], []
    for name, solve in preconditioners(op, cfg["pcg"]["preconditioners"]).items():
        t0 = time.perf_counter()
        _, rep = pcg(op.apply, solve, b, cfg=pc, weights=op.mass)
        rows.append({"preconditioner": name, "n": op.shape[0], "iterations": rep.iterations,
                     "residual": rep.residual, "converged": rep.converged, "solve_s": time.perf_counter() - t0})
        hist += [{"preconditioner": name, "iteration": i, "residual": r} for i, r in enumerate(rep.history)]
    ctx.csv("pcg.csv", rows)
    ctx.csv("history.csv", hist, ["preconditioner", "iteration", "residual"])
    return {r["preconditioner"]: r["iterations"] for r in rows}


def cmd_clustering(ctx):
    cfg = ctx.cfg
    c = cfg["clustering"]
    g = cfg["grid"]
    Ls = c["L_values"] or [g["L"]]
    ncs = c["n_cells"] or [g["n"] if g["basis"] == "hermite" else g["n_cell"]]
    if g["basis"] == "hermite" and c["L_values"]:
        raise ConfigError("[clustering] L_values applies to SEM grids only")
    rows, spec_rows = [], []
    for L in Ls:
        for nc in ncs:
            op = make_operator(cfg, make_bases(cfg, nc, L))
            if op.v2 is None:
                raise ConfigError("clustering needs a potential with a non-separable part")
            rep = clustering_report(op.sep, op.v2, c["eps"])
            rows.append({"L": L, "n_cell": nc, "n": op.shape[0], "outliers": rep.outliers, "kappa": rep.kappa,
                         "mu_min": float(rep.eigenvalues[0]), "mu_max": float(rep.eigenvalues[-1])})
            if c["spectrum"]:
                spec_rows += [{"L": L, "n_cell": nc, "index": i, "mu": m} for i, m in enumerate(rep.eigenvalues)]
    ctx.csv("clustering.csv", rows)
    if c["spectrum"]:
        ctx.csv("spectrum.csv", spec_rows, ["L", "n_cell", "index", "mu"])
    return {"outliers": [r["outliers"] for r in rows], "kappa": [r["kappa"] for r in rows]}


COMMANDS = {
    "solve": cmd_solve,
    "convergence-table": cmd_convergence_table,
    "ground-state": cmd_ground_state,
    "gpe": cmd_gpe,
    "propagate": cmd_propagate,
    "pcg-bench": cmd_pcg_bench,
    "clustering": cmd_clustering,
}


def execute(cfg, out_dir, allow_large=False):
    if cfg.command not in COMMANDS:
        raise ParameterError(f"unknown command {cfg.command!r}")
    ctx = Context(cfg, out_dir, allow_large)
    results = COMMANDS[cfg.command](ctx)
    return results, ctx.outputs
