"""Command line: `tensorschrod run <config> [--allow-large]`."""
from __future__ import annotations

import argparse
import logging
import os
import sys
import time
from contextlib import nullcontext

from ..errors import CapabilityError, ConfigError, NumericalError, ParameterError
from .commands import execute, validate
from .config import load_config
from .io import write_manifest

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL, EXIT_CAPABILITY = 0, 2, 3, 4

log = logging.getLogger("tensorschrod")


def _threads(n):
    if n <= 0:
        return nullcontext()
    try:
        from threadpoolctl import threadpool_limits
    except ImportError:
        log.warning("threadpoolctl not installed; ignoring [run] threads = %d", n)
        return nullcontext()
    return threadpool_limits(limits=n)


def run(config_path, allow_large=False, out_dir=None):
    """Run one experiment; returns an exit code. Errors are reported on stderr."""
    try:
        cfg = load_config(config_path)
        validate(cfg, allow_large)
    except CapabilityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAPABILITY
    except ConfigError as exc:
        print(f"error: {config_path}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ParameterError as exc:
        print(f"error: {config_path}: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    out = out_dir or cfg["output"]["dir"]
    if not os.path.isabs(out) and out_dir is None:
        out = os.path.join(os.path.dirname(os.path.abspath(config_path)), out)
    os.makedirs(out, exist_ok=True)
    t0 = time.perf_counter()
    try:
        with _threads(cfg["run"]["threads"]):
            results, outputs = execute(cfg, out, allow_large)
    except CapabilityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAPABILITY
    except MemoryError:
        print("error: out of memory", file=sys.stderr)
        return EXIT_CAPABILITY
    except NumericalError as exc:
        print(f"error: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except ParameterError as exc:
        print(f"error: {config_path}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    wall = time.perf_counter() - t0
    timings = {"total_s": wall} if cfg["output"]["timings"] else {}
    write_manifest(os.path.join(out, "manifest.json"), dict(cfg), outputs + ["manifest.json"], results, timings)
    print(f"{cfg.command}: wrote {', '.join(outputs)} to {out}")
    return EXIT_OK


def main(argv=None):
    ap = argparse.ArgumentParser(prog="tensorschrod", description="Tensor-product Schrodinger solvers")
    sub = ap.add_subparsers(dest="action", required=True)
    r = sub.add_parser("run", help="run the experiment described by a config file")
    r.add_argument("config")
    r.add_argument("--allow-large", action="store_true", help="lift the 2e8-unknown guard")
    r.add_argument("--out", help="output directory (overrides [output] dir)")
    r.add_argument("-v", "--verbose", action="store_true")
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    return run(args.config, args.allow_large, args.out)
