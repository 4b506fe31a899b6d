"""Splitting integrators for i dψ/dt = (A + B)ψ with A separable and B diagonal.

A step of the quadrature product formula with nodes s_1 < ... < s_M in (0, h)
is applied in merged form:

    e^{-iA(h - s_M)} e^{-i w_M h B} ... e^{-iA(s_2 - s_1)} e^{-i w_1 h B} e^{-iA s_1}

M = 1 is Strang splitting. Composing three such steps with the Yoshida
coefficients gives a fourth-order method.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from .basis1d import legendre
from .errors import NumericalError, ParameterError
from .operator import SeparableOperator

MAX_GL = 16
_CBRT2 = 2.0 ** (1.0 / 3.0)
YOSHIDA = (1.0 / (2.0 - _CBRT2), -_CBRT2 / (2.0 - _CBRT2))


def gauss_legendre(M: int):
    """M-point Gauss-Legendre nodes (ascending) and weights on [-1, 1]."""
    if int(M) != M or not 1 <= M <= MAX_GL:
        raise ParameterError(f"Gauss-Legendre order must be in [1, {MAX_GL}], got {M!r}")
    M = int(M)
    x = -np.cos(np.pi * (np.arange(M) + 0.75) / (M + 0.5))
    for _ in range(100):
        p, p_prev = legendre(M, x)
        dp = M * (p_prev - x * p) / (1.0 - x**2)
        dx = p / dp
        x = x - dx
        if np.max(np.abs(dx)) < 1e-15:
            break
    else:
        raise NumericalError(f"Gauss-Legendre Newton iteration did not converge for M={M}")
    p, p_prev = legendre(M, x)
    dp = M * (p_prev - x * p) / (1.0 - x**2)
    w = 2.0 / ((1.0 - x**2) * dp**2)
    x = 0.5 * (x - x[::-1])
    w = 0.5 * (w + w[::-1])
    return x, w


def quadrature(M):
    """Normalized nodes c_k = (1 + xi_k)/2 in (0, 1) and weights summing to 1."""
    xi, eta = gauss_legendre(M)
    return (1.0 + xi) / 2.0, eta / 2.0


def step_sequence(h, M, composition="qhop"):
    """One step as a list of ("A", t) / ("B", c) factors, rightmost first."""
    c, w = quadrature(M)
    hs = [YOSHIDA[0] * h, YOSHIDA[1] * h, YOSHIDA[0] * h] if composition == "yoshida" else [h]
    seq = []
    for hh in hs:
        s = np.append(c * hh, hh)
        seq.append(("A", s[0]))
        for k in range(M):
            seq.append(("B", w[k] * hh))
            seq.append(("A", s[k + 1] - s[k]))
    return seq


class Stepper:
    """Applies factor sequences with cached phase tensors.

    With `merge` the A-propagations separated by no B factor (across step and
    Yoshida sub-step boundaries) are fused into one.
    """

    def __init__(self, A: SeparableOperator, B, merge=False):
        self.A = A
        self.B = None if B is None else np.asarray(B, dtype=float)
        if self.B is not None and self.B.shape != A.shape:
            raise ParameterError(f"B shape {self.B.shape} does not match grid {A.shape}")
        self.merge = merge
        self.a_props = 0
        self.b_mults = 0
        self._pa = {}
        self._pb = {}
        self.pending = 0.0

    def _a(self, psi, t):
        if t == 0.0:
            return psi
        ph = self._pa.get(t)
        if ph is None:
            ph = self._pa[t] = np.exp(-1j * (self.A.lam - self.A.shift) * t)
        self.a_props += 1
        return self.A.backward(ph * self.A.forward(psi))

    def _b(self, psi, c):
        if self.B is None:
            return psi
        ph = self._pb.get(c)
        if ph is None:
            ph = self._pb[c] = np.exp(-1j * c * self.B)
        self.b_mults += 1
        return ph * psi

    def apply(self, psi, seq):
        for kind, t in seq:
            if kind == "A":
                if self.merge:
                    self.pending += t
                else:
                    psi = self._a(psi, t)
            else:
                if self.merge and self.B is not None:
                    psi = self._a(psi, self.pending)
                    self.pending = 0.0
                psi = self._b(psi, t)
        return psi

    def flush(self, psi):
        psi = self._a(psi, self.pending)
        self.pending = 0.0
        return psi


def qhop_step(A: SeparableOperator, B, psi, h, M=1):
    """One quadrature product-formula step; exactly M+1 A-propagations."""
    st = Stepper(A, B)
    return st.apply(np.asarray(psi, dtype=complex), step_sequence(h, M))


def yoshida_step(A: SeparableOperator, B, psi, h, M=1):
    """qhop(g1 h) qhop(g2 h) qhop(g1 h); M=1 is plain Yoshida, M>=3 approximates Magnus-2."""
    st = Stepper(A, B)
    return st.apply(np.asarray(psi, dtype=complex), step_sequence(h, M, "yoshida"))


def strang_step(A: SeparableOperator, B, psi, h):
    psi = A.propagate(psi, h / 2)
    psi = np.exp(-1j * h * np.asarray(B)) * psi
    return A.propagate(psi, h / 2)


@dataclass(frozen=True)
class SplitSpec:
    dt: float
    T: float
    M: int = 1
    composition: str = "qhop"
    # "laplacian": A = -Δ, B = V1 + V2; "separable": A = -Δ + V1, B = V2
    split: str = "laplacian"
    merge: bool = False

    def __post_init__(self):
        if not self.dt > 0 or not self.T > 0:
            raise ParameterError("dt and T must be positive")
        if self.composition not in ("qhop", "yoshida"):
            raise ParameterError(f"unknown composition {self.composition!r}")
        if self.split not in ("laplacian", "separable"):
            raise ParameterError(f"unknown split {self.split!r}")
        quadrature(self.M)

    @property
    def steps(self) -> int:
        n = self.T / self.dt
        if abs(n - round(n)) > 1e-9 * max(1.0, n):
            raise ParameterError(f"T/dt = {n} is not an integer")
        return int(round(n))

    @property
    def nodes(self):
        return quadrature(self.M)[0] * self.dt

    @property
    def weights(self):
        return quadrature(self.M)[1]


@dataclass(frozen=True, eq=False)
class Manufactured:
    """Stationary reference e^{-i lambda t} u."""

    eigenvalue: float
    u: np.ndarray


@dataclass
class EvolveResult:
    psi: np.ndarray
    error: float
    error_mass: float
    steps: int
    norm_drift: float
    seconds: float
    a_propagations: int
    b_multiplications: int
    extra: dict = field(default_factory=dict)


def evolve(spec: SplitSpec, A: SeparableOperator, B, psi0, reference) -> EvolveResult:
    """Step to time T and compare with `reference`.

    `reference` is either a SeparableOperator for A + B (exact propagator) or a
    Manufactured stationary state, in which case `psi0` is ignored and the
    state's vector is used. psi0 is scaled to unit plain l2 norm first.
    """
    n = spec.steps
    if isinstance(reference, Manufactured):
        psi0 = reference.u
    psi = np.array(psi0, dtype=complex)
    psi /= np.linalg.norm(psi)
    m = A.mass
    n0 = np.linalg.norm(psi)
    n0_mass = np.sqrt(np.sum(m * np.abs(psi) ** 2))
    st = Stepper(A, B, merge=spec.merge)
    seq = step_sequence(spec.dt, spec.M, spec.composition)
    t0 = time.perf_counter()
    for _ in range(n):
        psi = st.apply(psi, seq)
    psi = st.flush(psi)
    secs = time.perf_counter() - t0
    if isinstance(reference, Manufactured):
        u = np.asarray(reference.u, dtype=float)
        exact = np.exp(-1j * reference.eigenvalue * spec.T) * (u / np.linalg.norm(u))
    elif isinstance(reference, SeparableOperator):
        psi_start = np.array(psi0, dtype=complex)
        exact = reference.propagate(psi_start / np.linalg.norm(psi_start), spec.T)
    else:
        raise ParameterError("reference must be a SeparableOperator or Manufactured")
    diff = psi - exact
    # the propagators are unitary in the mass inner product, so drift is measured there
    n_mass = np.sqrt(np.sum(m * np.abs(psi) ** 2))
    return EvolveResult(
        psi=psi,
        error=float(np.linalg.norm(diff)),
        error_mass=float(np.sqrt(np.sum(m * np.abs(diff) ** 2))),
        steps=n,
        norm_drift=float(abs(n_mass - n0_mass) / n0_mass),
        seconds=secs,
        a_propagations=st.a_props,
        b_multiplications=st.b_mults,
        extra={"norm_drift_l2": float(abs(np.linalg.norm(psi) - n0))},
    )


def fit_rate(dts, errors):
    """Least-squares slope of log(error) against log(dt)."""
    x = np.log(np.asarray(dts, dtype=float))
    y = np.log(np.asarray(errors, dtype=float))
    if x.size < 2:
        raise ParameterError("need at least two step sizes to fit a rate")
    return float(np.polyfit(x, y, 1)[0])


def convergence_table(dts, run):
    """Rows (dt, error, rate, steps, seconds); `run(dt)` returns an EvolveResult.

    Rate is the pairwise rate against the previous row (nan on the first).
    """
    rows = []
    for i, dt in enumerate(dts):
        r = run(dt)
        rate = math.nan
        if i > 0:
            rate = math.log(rows[-1]["error"] / r.error) / math.log(rows[-1]["dt"] / dt)
        rows.append({"dt": dt, "error": r.error, "rate": rate, "steps": r.steps, "seconds": r.seconds})
    return rows
