"""Fixed-step classical Runge-Kutta integration.

Every system the constructions integrate is linear, ``y' = A(t) y + b(t)``.
For such fields :func:`rk4_solve` evaluates ``A`` and ``b`` at all stage
times at once, turns each RK4 step into an affine map, and composes the maps
of the sub-steps inside each grid interval by pairwise products.  The result
is the same RK4 scheme as a step-by-step loop (up to rounding) at a fraction
of the interpreter overhead.  General fields use the plain loop.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import config
from .curvekit import SampleGrid
from .errors import NonFiniteState


@dataclass(frozen=True)
class VectorField:
    """``y' = rhs(t, y)`` with ``y`` of length ``dimension``."""

    dimension: int
    rhs: Callable


class LinearField(VectorField):
    """``y' = A(t) y + b(t)``.

    ``matrix`` and ``forcing`` are vectorized: given a 1-d array of times they
    return arrays of shape ``(K, d, d)`` and ``(K, d)``.  ``forcing`` may be
    ``None`` for homogeneous systems.
    """

    def __init__(self, dimension: int, matrix: Callable, forcing: Callable | None = None):
        self.matrix = matrix
        self.forcing = forcing

        def rhs(t, y):
            tt = np.array([t], dtype=float)
            out = self.matrix(tt)[0] @ y
            if self.forcing is not None:
                out = out + self.forcing(tt)[0]
            return out

        object.__setattr__(self, "dimension", dimension)
        object.__setattr__(self, "rhs", rhs)

    def coefficients(self, tt: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        d = self.dimension
        a = np.asarray(self.matrix(tt), dtype=float).reshape(len(tt), d, d)
        if self.forcing is None:
            b = np.zeros((len(tt), d))
        else:
            b = np.asarray(self.forcing(tt), dtype=float).reshape(len(tt), d)
        return a, b


@dataclass(frozen=True)
class Trajectory:
    grid: SampleGrid
    states: np.ndarray  # (count, dimension)

    def __post_init__(self):
        if self.states.shape[0] != self.grid.count:
            raise ValueError("one state per grid node is required")

    @property
    def t(self) -> np.ndarray:
        return self.grid.nodes

    def component(self, k: int) -> np.ndarray:
        return self.states[:, k]


def default_substeps(grid: SampleGrid, steps_per_unit: int | None = None) -> int:
    steps_per_unit = config.get().steps_per_unit if steps_per_unit is None else steps_per_unit
    return max(1, math.ceil(grid.h * steps_per_unit - 1e-9))


def rk4_solve(field: VectorField, y0, grid: SampleGrid, substeps: int | None = None,
              project: Callable | None = None) -> Trajectory:
    """Integrate ``field`` from ``y0`` at ``grid.t0`` and record every node.

    ``substeps`` RK4 steps are taken inside each grid interval (default: the
    configured steps per unit length).  ``project`` maps a state back onto a
    constraint manifold; it is applied at every node for linear fields and
    after every step otherwise.
    """
    y0 = np.atleast_1d(np.asarray(y0, dtype=float))
    if y0.shape != (field.dimension,):
        raise ValueError(f"initial state must have length {field.dimension}")
    if not np.all(np.isfinite(y0)):
        raise NonFiniteState("initial state", grid.t0)
    m = default_substeps(grid) if substeps is None else int(substeps)
    if m < 1:
        raise ValueError("substeps must be >= 1")
    if isinstance(field, LinearField):
        states = _solve_linear(field, y0, grid, m, project)
    else:
        states = _solve_loop(field, y0, grid, m, project)
    return Trajectory(grid, states)


def _solve_loop(field, y0, grid, m, project):
    nodes = grid.nodes
    states = np.empty((len(nodes), field.dimension))
    states[0] = y0
    y = y0.copy()
    h = grid.h / m
    for i in range(len(nodes) - 1):
        t = nodes[i]
        for j in range(m):
            tj = t + j * h
            k1 = np.asarray(field.rhs(tj, y), dtype=float)
            k2 = np.asarray(field.rhs(tj + h / 2, y + h / 2 * k1), dtype=float)
            k3 = np.asarray(field.rhs(tj + h / 2, y + h / 2 * k2), dtype=float)
            k4 = np.asarray(field.rhs(tj + h, y + h * k3), dtype=float)
            y = y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
            if not np.all(np.isfinite(y)):
                raise NonFiniteState("RK4 stage produced a non-finite value", float(tj))
            if project is not None:
                y = project(y)
        states[i + 1] = y
    return states


def _step_maps(field: LinearField, starts: np.ndarray, h: float) -> np.ndarray:
    """Augmented ``(d+1, d+1)`` affine maps of one RK4 step from each start time."""
    d = field.dimension
    k = len(starts)
    a0, b0 = field.coefficients(starts)
    am, bm = field.coefficients(starts + h / 2)
    a1, b1 = field.coefficients(starts + h)
    for arr in (a0, am, a1, b0, bm, b1):
        if not np.all(np.isfinite(arr)):
            bad = ~np.isfinite(arr).reshape(k, -1).all(axis=1)
            raise NonFiniteState("vector field is not finite", float(starts[np.argmax(bad)]))
    eye = np.eye(d)
    k1, c1 = a0, b0
    k2 = am @ (eye + h / 2 * k1)
    c2 = np.einsum("kij,kj->ki", am, h / 2 * c1) + bm
    k3 = am @ (eye + h / 2 * k2)
    c3 = np.einsum("kij,kj->ki", am, h / 2 * c2) + bm
    k4 = a1 @ (eye + h * k3)
    c4 = np.einsum("kij,kj->ki", a1, h * c3) + b1
    out = np.zeros((k, d + 1, d + 1))
    out[:, :d, :d] = eye + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
    out[:, :d, d] = h / 6 * (c1 + 2 * c2 + 2 * c3 + c4)
    out[:, d, d] = 1.0
    return out


def _compose(maps: np.ndarray) -> np.ndarray:
    """``maps`` of shape (B, m, D, D) -> products ``M_m ... M_1`` of shape (B, D, D)."""
    while maps.shape[1] > 1:
        if maps.shape[1] % 2:
            pad = np.broadcast_to(np.eye(maps.shape[-1]), (maps.shape[0], 1) + maps.shape[2:])
            maps = np.concatenate([maps, pad], axis=1)
        maps = maps[:, 1::2] @ maps[:, 0::2]
    return maps[:, 0]


def transfer_maps(field: LinearField, grid: SampleGrid, substeps: int | None = None,
                  chunk_steps: int = 200_000):
    """Yield ``(i0, maps)`` where ``maps[k]`` is the augmented affine RK4 map
    carrying the state from node ``i0 + k`` to node ``i0 + k + 1``."""
    m = default_substeps(grid) if substeps is None else int(substeps)
    nodes = grid.nodes
    n_int = len(nodes) - 1
    d = field.dimension
    h = grid.h / m
    per_chunk = max(1, chunk_steps // m)
    for lo in range(0, n_int, per_chunk):
        hi = min(n_int, lo + per_chunk)
        starts = (nodes[lo:hi, None] + h * np.arange(m)[None, :]).ravel()
        maps = _step_maps(field, starts, h).reshape(hi - lo, m, d + 1, d + 1)
        yield lo, _compose(maps)


def _solve_linear(field, y0, grid, m, project):
    nodes = grid.nodes
    d = field.dimension
    states = np.empty((len(nodes), d))
    states[0] = y0
    y = np.append(y0, 1.0)
    for lo, transfer in transfer_maps(field, grid, m):
        for i in range(len(transfer)):
            y = transfer[i] @ y
            if project is not None:
                y[:d] = project(y[:d])
            if not np.all(np.isfinite(y)):
                raise NonFiniteState("RK4 stage produced a non-finite value", float(nodes[lo + i]))
            states[lo + i + 1] = y[:d]
    return states


def convergence_order(field: VectorField, y0, grid: SampleGrid, refinements: int = 3,
                      base_substeps: int = 8) -> float | None:
    """Observed order of accuracy of :func:`rk4_solve` on ``field``.

    Solutions with ``base_substeps * 2**k`` steps per interval
    (``k = 0 .. refinements-1``) are compared at the grid nodes against a
    reference computed with the finest step halved twice more; the order is
    the least-squares slope of ``log2(error)`` against ``log2(step)``.
    Returns ``None`` when every error is exactly zero (order not applicable).
    """
    if refinements < 2:
        raise ValueError("refinements must be >= 2")
    ref = rk4_solve(field, y0, grid, substeps=base_substeps * 2 ** (refinements + 1)).states
    steps, errors = [], []
    for k in range(refinements):
        m = base_substeps * 2**k
        err = np.max(np.abs(rk4_solve(field, y0, grid, substeps=m).states - ref))
        steps.append(grid.h / m)
        errors.append(err)
    errors = np.asarray(errors)
    if np.all(errors == 0.0):
        return None
    errors = np.maximum(errors, np.finfo(float).tiny)
    slope = np.polyfit(np.log2(steps), np.log2(errors), 1)[0]
    return float(slope)
