"""Run configuration: INI-style `[section]` / `key = value` text with `#` comments.

Every key has a type and a default in SCHEMA; unknown sections or keys are
rejected with the offending line number. Lists are comma separated and
booleans are `true` / `false`.
"""
from __future__ import annotations

import configparser
import re

from ..errors import ConfigError
from ..potentials import KINDS

COMMANDS = ("solve", "ground-state", "gpe", "propagate", "pcg-bench", "clustering", "convergence-table")
REQUIRED = object()


def _bool(s):
    v = s.strip().lower()
    if v not in ("true", "false"):
        raise ValueError(f"expected true or false, got {s!r}")
    return v == "true"


def _list(conv):
    def parse(s):
        items = [x.strip() for x in s.split(",") if x.strip()]
        if not items:
            raise ValueError("empty list")
        return [conv(x) for x in items]

    parse.__name__ = f"list of {conv.__name__}"
    return parse


def _choice(*options):
    def parse(s):
        if s not in options:
            raise ValueError(f"expected one of {', '.join(options)}, got {s!r}")
        return s

    parse.__name__ = "choice"
    return parse


def _pos(conv):
    def parse(s):
        v = conv(s)
        if v <= 0:
            raise ValueError(f"must be positive, got {s}")
        return v

    parse.__name__ = f"positive {conv.__name__}"
    return parse


floats = _list(float)
ints = _list(int)

# section -> key -> (parser, default); None means "not set"
SCHEMA = {
    "run": {
        "command": (_choice(*COMMANDS), REQUIRED),
        "seed": (int, 1),
        "threads": (int, 0),
        "precision": (_choice("f64"), "f64"),
    },
    "grid": {
        "basis": (_choice("sem", "hermite"), "sem"),
        "dim": (_pos(int), 3),
        "L": (_pos(float), 1.0),
        "n_cell": (_pos(int), 8),
        "k": (_pos(int), 2),
        "n": (_pos(int), 40),
    },
    "potential": {
        "kind": (_choice("none", *KINDS), "none"),
        "amplitude": (float, None),
        "weights": (floats, None),
        "gamma": (floats, None),
        "alpha": (float, None),
        "kappa": (float, None),
        "w0": (float, None),
        "delta": (float, None),
        "r0": (float, None),
        "c": (float, None),
    },
    "solve": {
        "exact": (_choice("sin-product", "rational-sin"), "sin-product"),
        "n_cells": (ints, None),
    },
    "eigen": {
        "shift": (_choice("fraction", "offset", "zero"), "fraction"),
        "shift_value": (float, 0.9),
        "tol": (_pos(float), 1e-12),
        "max_outer": (_pos(int), 100),
        "levels": (ints, None),
        "cold_compare": (_bool, False),
    },
    "pcg": {
        "tol": (_pos(float), 1e-12),
        "max_iter": (_pos(int), 500),
        "stop_norm": (_choice("l2", "preconditioned"), "l2"),
        "preconditioners": (_list(_choice("tensor", "laplacian", "combined", "v2-scaled")), ["tensor"]),
    },
    "gpe": {
        "beta": (float, 10.0),
        "flow": (_choice("h1", "au"), "h1"),
        "tau": (_pos(float), None),
        "alpha": (_pos(float), 20.0),
        "tol": (_pos(float), 1e-12),
        "max_iter": (_pos(int), 5000),
        "init": (_choice("constant", "eigenfunction", "checkpoint"), "constant"),
        "init_file": (str, None),
    },
    "propagate": {
        "split": (_choice("laplacian", "separable"), "laplacian"),
        "M": (_pos(int), 1),
        "composition": (_choice("qhop", "yoshida"), "qhop"),
        "T": (_pos(float), 0.1),
        "dt": (_list(_pos(float)), [0.01]),
        "reference": (_choice("auto", "exact", "manufactured"), "auto"),
        "initial": (_choice("sin-product", "ground-state"), "sin-product"),
        "merge": (_bool, False),
    },
    "clustering": {
        "eps": (_pos(float), 0.1),
        "L_values": (_list(_pos(float)), None),
        "n_cells": (ints, None),
        "spectrum": (_bool, True),
    },
    "output": {
        "dir": (str, "out"),
        "timings": (_bool, True),
        "checkpoint": (str, None),
    },
    "slice": {
        "enabled": (_bool, False),
        "axes": (ints, [0, 1]),
        "fixed": (floats, None),
        "resolution": (_pos(int), 100),
    },
}

_KEY_RE = re.compile(r"^\s*([^=#\s][^=]*?)\s*=")
_SEC_RE = re.compile(r"^\s*\[([^\]]+)\]")


def _locate(text):
    """Map (section, key) and section names to 1-based line numbers."""
    where = {}
    section = None
    for i, line in enumerate(text.splitlines(), 1):
        m = _SEC_RE.match(line)
        if m:
            section = m.group(1).strip()
            where.setdefault((section, None), i)
            continue
        m = _KEY_RE.match(line)
        if m and section is not None:
            where.setdefault((section, m.group(1).strip()), i)
    return where


class RunConfig(dict):
    """Nested dict section -> key -> value with every default filled in."""

    @property
    def command(self):
        return self["run"]["command"]

    def section(self, name):
        return self[name]


def parse_config(text, source="<config>") -> RunConfig:
    cp = configparser.ConfigParser(
        interpolation=None,
        comment_prefixes=("#",),
        inline_comment_prefixes=("#",),
        strict=True,
        empty_lines_in_values=False,
    )
    cp.optionxform = str
    try:
        cp.read_string(text, source=source)
    except configparser.MissingSectionHeaderError as exc:
        raise ConfigError("expected a [section] header before the first key", exc.lineno) from exc
    except configparser.DuplicateOptionError as exc:
        raise ConfigError(f"duplicate key {exc.option!r} in [{exc.section}]", exc.lineno) from exc
    except configparser.DuplicateSectionError as exc:
        raise ConfigError(f"duplicate section [{exc.section}]", exc.lineno) from exc
    except configparser.ParsingError as exc:
        lineno, line = exc.errors[0]
        raise ConfigError(f"cannot parse {line.strip()!r}; expected key = value", lineno) from exc

    where = _locate(text)
    cfg = RunConfig()
    for sec in cp.sections():
        if sec not in SCHEMA:
            raise ConfigError(f"unknown section [{sec}]", where.get((sec, None)))
    for sec, keys in SCHEMA.items():
        out = {}
        given = cp[sec] if cp.has_section(sec) else {}
        for key in given:
            if key not in keys:
                raise ConfigError(f"unknown key {key!r} in [{sec}]", where.get((sec, key)))
        for key, (conv, default) in keys.items():
            if key in given:
                raw = given[key].strip()
                if "\n" in raw:
                    line = where.get((sec, key))
                    raise ConfigError(f"indented continuation line after {key!r}", line and line + 1)
                try:
                    out[key] = conv(raw)
                except ValueError as exc:
                    raise ConfigError(f"[{sec}] {key}: {exc}", where.get((sec, key))) from exc
            elif default is REQUIRED:
                raise ConfigError(f"missing required key {key!r} in [{sec}]", where.get((sec, None)))
            else:
                out[key] = list(default) if isinstance(default, list) else default
        cfg[sec] = out
    return cfg


def load_config(path) -> RunConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from exc
    return parse_config(text, source=str(path))
