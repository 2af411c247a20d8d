"""Finite-difference stencils and local polynomial interpolation on uniform grids."""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from .errors import InsufficientSamples, NonUniformGrid

# 8th-order central first-derivative weights for offsets -4..4
_FD8 = np.array([1 / 280, -4 / 105, 1 / 5, -4 / 5, 0.0, 4 / 5, -1 / 5, 4 / 105, -1 / 280])
_FD8_OFFSETS = np.arange(-4, 5)


@lru_cache(maxsize=None)
def fornberg_weights(offsets: tuple, order: int) -> np.ndarray:
    """Weights ``w`` with ``f^(order)(0) ~ sum_k w_k f(offsets[k])`` for unit spacing
    (Fornberg's recursion)."""
    x = np.asarray(offsets, dtype=float)
    n = len(x)
    c = np.zeros((n, order + 1))
    c1 = 1.0
    c4 = x[0]
    c[0, 0] = 1.0
    for i in range(1, n):
        mn = min(i, order)
        c2 = 1.0
        c5 = c4
        c4 = x[i]
        for j in range(i):
            c3 = x[i] - x[j]
            c2 *= c3
            if j == i - 1:
                for k in range(mn, 0, -1):
                    c[i, k] = c1 * (k * c[i - 1, k - 1] - c5 * c[i - 1, k]) / c2
                c[i, 0] = -c1 * c5 * c[i - 1, 0] / c2
            for k in range(mn, 0, -1):
                c[j, k] = (c4 * c[j, k] - k * c[j, k - 1]) / c3
            c[j, 0] = c4 * c[j, 0] / c3
        c1 = c2
    return c[:, order].copy()


def check_uniform(t, rtol: float = 1e-8) -> float:
    """Return the spacing of a uniform, strictly increasing grid."""
    t = np.asarray(t, dtype=float)
    if t.ndim != 1 or len(t) < 2:
        raise InsufficientSamples("need at least two nodes")
    dt = np.diff(t)
    h = (t[-1] - t[0]) / (len(t) - 1)
    if h <= 0 or np.any(dt <= 0):
        raise NonUniformGrid("nodes must be strictly increasing")
    if np.max(np.abs(dt - h)) > rtol * max(abs(t[-1] - t[0]), 1.0):
        raise NonUniformGrid("nodes are not uniformly spaced")
    return float(h)


def fd_uniform(values, h: float, order: int = 1, accuracy: int = 4) -> np.ndarray:
    """Derivative of samples on a uniform grid along axis 0.

    Interior nodes use the central stencil of the requested accuracy; the
    first and last few nodes use one-sided stencils of the same accuracy, so
    the truncation error is ``O(h**accuracy)`` at every node.
    """
    if order not in (1, 2, 3, 4):
        raise ValueError("derivative order must be 1..4")
    if accuracy not in (2, 4, 6, 8):
        raise ValueError("accuracy must be 2, 4, 6 or 8")
    f = np.asarray(values, dtype=float)
    n = f.shape[0]
    half = (order + 1) // 2 - 1 + accuracy // 2
    width_c = 2 * half + 1
    width_b = order + accuracy
    need = max(width_c, width_b)
    if n < need:
        raise InsufficientSamples(f"need at least {need} samples, got {n}")
    out = np.empty_like(f)
    wc = fornberg_weights(tuple(range(-half, half + 1)), order)
    interior = slice(half, n - half)
    acc = np.zeros_like(f[interior])
    for k, w in enumerate(wc):
        if w != 0.0:
            acc = acc + w * f[k : n - 2 * half + k]
    out[interior] = acc
    for i in list(range(half)) + list(range(n - half, n)):
        start = 0 if i < half else n - width_b
        offs = tuple(j - i for j in range(start, start + width_b))
        w = fornberg_weights(offs, order)
        out[i] = np.tensordot(w, f[start : start + width_b], axes=(0, 0))
    return out / h**order


def fd_callable(f, t, h: float = 2e-3):
    """First derivative of a vectorized callable by an 8th-order central stencil."""
    t = np.asarray(t, dtype=float)
    acc = 0.0
    for k, w in zip(_FD8_OFFSETS, _FD8):
        if w != 0.0:
            acc = acc + w * np.asarray(f(t + k * h))
    return acc / h


def lagrange_eval(t0: float, h: float, values, t, degree: int = 5):
    """Evaluate the local degree-``degree`` Lagrange interpolant of uniform samples.

    Exact at the nodes; windows are centred on the query and clipped at the
    ends of the table.
    """
    values = np.asarray(values, dtype=float)
    n = values.shape[0]
    p = min(degree + 1, n)
    t = np.asarray(t, dtype=float)
    scalar = t.ndim == 0
    tq = np.atleast_1d(t)
    u = (tq - t0) / h
    start = np.clip(np.floor(u).astype(int) - (p - 1) // 2, 0, n - p)
    local = u - start
    result = np.zeros((len(tq),) + values.shape[1:])
    for k in range(p):
        basis = np.ones_like(local)
        for i in range(p):
            if i != k:
                basis = basis * (local - i) / (k - i)
        result += basis.reshape((-1,) + (1,) * (values.ndim - 1)) * values[start + k]
    # snap exact node hits to the stored values
    ui = np.rint(u)
    on_node = (np.abs(u - ui) < 1e-9) & (ui >= 0) & (ui <= n - 1)
    if np.any(on_node):
        result[on_node] = values[ui[on_node].astype(int)]
    return result[0] if scalar else result
