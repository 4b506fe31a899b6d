"""CSV tables, run manifests, seeded random fields, size guards and slices."""
from __future__ import annotations

import csv
import json
import math
import os
import platform
import sys

import numpy as np

from ..basis1d import Basis1D, eval_matrix
from ..errors import CapabilityError, ParameterError
from ..hermite import HermiteBasis, hermite_eval_matrix
from ..tensor import kron_apply

MAX_SCALARS = 2e8
WORKING_SET = 6

_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)


def splitmix64(seed, count):
    """`count` outputs of the splitmix64 generator started at state `seed`.

    Output i mixes state seed + (i+1) * 0x9E3779B97F4A7C15 (mod 2^64) with
    z ^= z >> 30; z *= 0xBF58476D1CE4E5B9; z ^= z >> 27; z *= 0x94D049BB133111EB;
    z ^= z >> 31.
    """
    with np.errstate(over="ignore"):
        z = np.uint64(seed % 2**64) + _GAMMA * np.arange(1, count + 1, dtype=np.uint64)
        z = (z ^ (z >> np.uint64(30))) * _M1
        z = (z ^ (z >> np.uint64(27))) * _M2
        return z ^ (z >> np.uint64(31))


def uniform_field(seed, shape):
    """Uniform [-1, 1) field; draws fill the grid with axis 1 fastest.

    Each draw is 2 * (x >> 11) * 2^-53 - 1 for a splitmix64 output x.
    """
    n = int(np.prod(shape))
    u = (splitmix64(seed, n) >> np.uint64(11)).astype(np.float64) * 2.0**-53
    return (2.0 * u - 1.0).reshape(shape, order="F")


def check_size(shape, allow_large=False, complex_=False):
    """Refuse grids beyond desk scale before allocating anything."""
    n = math.prod(shape)
    if n > MAX_SCALARS and not allow_large:
        raise CapabilityError(f"grid has {n:.3g} unknowns, above the {MAX_SCALARS:.0e} guard; pass --allow-large")
    need = (16 if complex_ else 8) * n * WORKING_SET
    try:
        avail = os.sysconf("SC_PAGE_SIZE") * os.sysconf("SC_PHYS_PAGES")
    except (ValueError, OSError, AttributeError):
        avail = None
    if avail and need > avail:
        raise CapabilityError(f"estimated working set {need / 2**30:.1f} GiB exceeds physical memory {avail / 2**30:.1f} GiB")
    return need


def fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return "nan" if math.isnan(v) else f"{float(v):.15e}"
    if v is None:
        return ""
    return str(v)


def write_csv(path, rows, columns=None, timings=True):
    """Write dict rows; columns ending in `_s` are wall times and blanked when timings is off."""
    rows = list(rows)
    if columns is None:
        columns = list(rows[0]) if rows else []
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for r in rows:
            w.writerow(["" if (c.endswith("_s") and not timings) else fmt(r.get(c)) for c in columns])
    return path


def read_csv(path):
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


def versions():
    import scipy

    from .. import __version__

    return {
        "tensorschrod": __version__,
        "python": sys.version.split()[0],
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "platform": platform.platform(),
    }


def write_manifest(path, config, outputs, results=None, timings=None):
    doc = {
        "config": config,
        "versions": versions(),
        "outputs": outputs,
        "results": results or {},
        "timings": timings or {},
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True, default=_jsonable)
        fh.write("\n")
    return path


def _jsonable(v):
    if isinstance(v, np.generic):
        return v.item()
    if isinstance(v, np.ndarray):
        return v.tolist()
    return str(v)


def _axis_eval(basis, targets):
    """Matrix from interior nodal values to values at `targets`."""
    if isinstance(basis, Basis1D):
        return eval_matrix(basis, targets)[:, 1:-1]
    if isinstance(basis, HermiteBasis):
        return hermite_eval_matrix(basis, targets)
    raise ParameterError(f"cannot evaluate on {type(basis).__name__}")


def _extent(basis):
    if isinstance(basis, Basis1D):
        return -basis.L, basis.L
    return float(basis.nodes[0]), float(basis.nodes[-1])


def export_slice(u, bases, axes=(0, 1), fixed=None, resolution=100):
    """Evaluate u on an R x R grid over two free axes, other axes held fixed.

    Returns (xa, xb, values) with values[i, j] at (xa[i], xb[j]). SEM axes use
    cell-local Q^k interpolation; Hermite axes use the Hermite interpolant
    over the node range.
    """
    d = len(bases)
    a, b = axes
    if a == b or not (0 <= a < d and 0 <= b < d):
        raise ParameterError(f"slice axes {axes} invalid for a {d}-d field")
    others = [i for i in range(d) if i not in (a, b)]
    fixed = [0.0] * len(others) if fixed is None else list(fixed)
    if len(fixed) != len(others):
        raise ParameterError(f"need {len(others)} fixed coordinates, got {len(fixed)}")
    if resolution < 1:
        raise ParameterError("resolution must be >= 1")
    mats = [None] * d
    coords = {}
    for ax in (a, b):
        lo, hi = _extent(bases[ax])
        coords[ax] = np.array([0.5 * (lo + hi)]) if resolution == 1 else np.linspace(lo, hi, resolution)
        mats[ax] = _axis_eval(bases[ax], coords[ax])
    for ax, val in zip(others, fixed):
        lo, hi = _extent(bases[ax])
        if not lo - 1e-12 <= val <= hi + 1e-12:
            raise ParameterError(f"fixed coordinate {val} outside axis {ax} range [{lo}, {hi}]")
        mats[ax] = _axis_eval(bases[ax], [val])
    vals = kron_apply(np.asarray(u), mats)
    vals = vals.reshape(vals.shape[a], vals.shape[b]) if a < b else vals.reshape(vals.shape[b], vals.shape[a]).T
    return coords[a], coords[b], vals


def slice_rows(xa, xb, vals):
    for i, x in enumerate(xa):
        for j, y in enumerate(xb):
            yield {"x_a": x, "x_b": y, "value": vals[i, j]}
