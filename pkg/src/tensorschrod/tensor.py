"""Dense d-dimensional nodal fields and mode-k products.

A field is a numpy array indexed ``u[i_1, ..., i_d]``. Its flat vector
``vec(u)`` runs axis 1 fastest (numpy Fortran order), so applying matrix
A_k along axis k equals ``(I ⊗ ... ⊗ A_k ⊗ ... ⊗ I) vec(u)`` with axis 1 the
rightmost Kronecker factor.
"""
from __future__ import annotations

import struct

import numpy as np

from .errors import ParameterError

MAX_DIM = 9


def vec(u):
    return np.asarray(u).ravel(order="F")


def unvec(v, shape):
    return np.asarray(v).reshape(shape, order="F")


def _mode_product_real(X, A, axis):
    n = X.shape[axis]
    pre = int(np.prod(X.shape[:axis], dtype=np.int64))
    post = int(np.prod(X.shape[axis + 1:], dtype=np.int64))
    m = A.shape[0]
    if post == 1:
        Y = X.reshape(pre, n) @ A.T
    elif pre == 1:
        Y = A @ X.reshape(n, post)
    else:
        Y = np.matmul(A, X.reshape(pre, n, post))
    return Y.reshape(X.shape[:axis] + (m,) + X.shape[axis + 1:])


def mode_product(X, A, axis):
    """Apply matrix A (m x n_k) along `axis` of X."""
    X = np.asarray(X)
    A = np.asarray(A)
    if not 0 <= axis < X.ndim:
        raise ParameterError(f"axis {axis} out of range for a {X.ndim}-d field")
    if A.ndim != 2 or A.shape[1] != X.shape[axis]:
        raise ParameterError(f"matrix of shape {A.shape} does not act on axis {axis} of length {X.shape[axis]}")
    if np.iscomplexobj(X) and not np.iscomplexobj(A):
        if axis < X.ndim - 1:
            # interleaved (re, im) pairs sit in the last axis, so a real product covers both
            Xr = np.ascontiguousarray(X).view(np.float64).reshape(X.shape[:-1] + (2 * X.shape[-1],))
            Yr = _mode_product_real(Xr, A, axis)
            return np.ascontiguousarray(Yr).view(np.complex128).reshape(
                X.shape[:axis] + (A.shape[0],) + X.shape[axis + 1:]
            )
        return _mode_product_real(np.ascontiguousarray(X.real), A, axis) + 1j * _mode_product_real(
            np.ascontiguousarray(X.imag), A, axis
        )
    return _mode_product_real(np.ascontiguousarray(X), A, axis)


def kron_apply(X, mats):
    """Apply one matrix per axis; ``None`` entries act as the identity."""
    X = np.asarray(X)
    if len(mats) != X.ndim:
        raise ParameterError(f"need {X.ndim} axis matrices, got {len(mats)}")
    for axis, A in enumerate(mats):
        if A is not None:
            X = mode_product(X, A, axis)
    return X


def outer_sum(vectors):
    """Tensor with entry (i_1..i_d) = sum_a vectors[a][i_a]."""
    d = len(vectors)
    out = np.zeros(tuple(len(v) for v in vectors))
    for a, v in enumerate(vectors):
        shape = [1] * d
        shape[a] = len(v)
        out = out + np.asarray(v, dtype=float).reshape(shape)
    return out


def outer_product(vectors):
    d = len(vectors)
    out = np.ones(tuple(len(v) for v in vectors))
    for a, v in enumerate(vectors):
        shape = [1] * d
        shape[a] = len(v)
        out = out * np.asarray(v).reshape(shape)
    return out


def lambda_grid(axes):
    """Eigenvalue-sum tensor for a list of AxisEigens."""
    return outer_sum([ax.eigenvalues for ax in axes])


def inner(u, v, weights=None):
    """<u, v>, conjugate-linear in u; `weights` is a mass tensor or None."""
    u = np.asarray(u)
    v = np.asarray(v)
    if u.shape != v.shape:
        raise ParameterError(f"shape mismatch {u.shape} vs {v.shape}")
    if weights is None:
        return np.vdot(u, v)
    if np.shape(weights) != u.shape:
        raise ParameterError(f"weight shape {np.shape(weights)} does not match field shape {u.shape}")
    return np.vdot(u, weights * v)


def norm(u, weights=None):
    val = inner(u, u, weights)
    return float(np.sqrt(abs(val)))


_MAGIC = b"TSFIELD\x00"
_VERSION = 1
_KINDS = {0: np.dtype("<f8"), 1: np.dtype("<c16")}


def dump_field(path, u):
    """Write a field: magic, u32 version, u32 d, u64 shape[d], u8 kind, raw LE data (axis 1 fastest)."""
    u = np.asarray(u)
    if not 1 <= u.ndim <= MAX_DIM:
        raise ParameterError(f"field dimension must be in [1, {MAX_DIM}]")
    kind = 1 if np.iscomplexobj(u) else 0
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(struct.pack("<II", _VERSION, u.ndim))
        fh.write(struct.pack(f"<{u.ndim}Q", *u.shape))
        fh.write(struct.pack("<B", kind))
        fh.write(np.asarray(u, dtype=_KINDS[kind]).tobytes(order="F"))


def load_field(path):
    with open(path, "rb") as fh:
        if fh.read(len(_MAGIC)) != _MAGIC:
            raise ParameterError(f"{path} is not a field checkpoint")
        version, d = struct.unpack("<II", fh.read(8))
        if version != _VERSION:
            raise ParameterError(f"unsupported checkpoint version {version}")
        shape = struct.unpack(f"<{d}Q", fh.read(8 * d))
        (kind,) = struct.unpack("<B", fh.read(1))
        if kind not in _KINDS:
            raise ParameterError(f"unknown scalar kind {kind}")
        data = np.frombuffer(fh.read(), dtype=_KINDS[kind])
    if data.size != int(np.prod(shape)):
        raise ParameterError(f"checkpoint {path} is truncated")
    return data.reshape(shape, order="F").astype(_KINDS[kind].newbyteorder("="))
