"""Curve sources, parameter grids, jets and arclength.

Two kinds of source are provided:

* :class:`AnalyticCurve` -- a trigonometric polynomial in ``t`` whose
  derivatives of every order are exact.  The named catalog entries are all of
  this form.
* :class:`SampledCurve` -- a table of positions on a uniform grid; jets come
  from 4th-order finite differences at the nodes and local polynomial
  interpolation in between.

Jets carry derivatives up to order four.  The fourth derivative is required
by the evolute construction, whose Bertrand-type admissibility function
involves the derivative of ``kappa'/(|gamma'| kappa^2 tau)``.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.interpolate import CubicSpline

from . import config
from .errors import InsufficientSamples, NonUniformGrid, OutOfDomain, SingularPoint
from .geom3 import norm
from .stencils import check_uniform, fd_uniform, lagrange_eval


# --------------------------------------------------------------------------
# grids and jets
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class SampleGrid:
    """Uniform nodes ``t_i = t0 + i (t1 - t0) / (count - 1)``."""

    t0: float
    t1: float
    count: int

    def __post_init__(self):
        if not (math.isfinite(self.t0) and math.isfinite(self.t1)):
            raise ValueError("grid end points must be finite")
        if self.t1 <= self.t0:
            raise ValueError("grid requires t1 > t0")
        if int(self.count) != self.count or self.count < 2:
            raise ValueError("grid requires count >= 2")

    @property
    def nodes(self) -> np.ndarray:
        return np.linspace(self.t0, self.t1, int(self.count))

    @property
    def h(self) -> float:
        return (self.t1 - self.t0) / (self.count - 1)

    @property
    def length(self) -> float:
        return self.t1 - self.t0

    def refined(self, factor: int = 2) -> "SampleGrid":
        return SampleGrid(self.t0, self.t1, (self.count - 1) * factor + 1)

    @classmethod
    def parse(cls, text: str) -> "SampleGrid":
        """Parse the ``t0:t1:count`` syntax."""
        parts = text.split(":")
        if len(parts) != 3:
            raise ValueError(f"grid must look like t0:t1:count, got {text!r}")
        return cls(float(parts[0]), float(parts[1]), int(parts[2]))

    @classmethod
    def periodic(cls, t0: float, period: float, count: int) -> "SampleGrid":
        """``count`` nodes covering the half-open interval ``[t0, t0 + period)``."""
        return cls(t0, t0 + period * (count - 1) / count, count)


@dataclass(frozen=True)
class CurveJet:
    """Position and derivatives at ``t`` (scalar or batched along axis 0)."""

    t: np.ndarray
    d0: np.ndarray
    d1: np.ndarray
    d2: np.ndarray
    d3: np.ndarray
    d4: np.ndarray | None = None

    def __post_init__(self):
        for name in ("d0", "d1", "d2", "d3", "d4"):
            v = getattr(self, name)
            if v is not None and not np.all(np.isfinite(v)):
                raise ValueError(f"jet component {name} is not finite")

    def __getitem__(self, index) -> "CurveJet":
        return CurveJet(
            np.asarray(self.t)[index], self.d0[index], self.d1[index], self.d2[index],
            self.d3[index], None if self.d4 is None else self.d4[index],
        )


# --------------------------------------------------------------------------
# analytic sources
# --------------------------------------------------------------------------


_TRIG_CYCLE = [(1.0, np.cos), (-1.0, np.sin), (-1.0, np.cos), (1.0, np.sin)]


class TermField:
    """Vector-valued trigonometric polynomial ``sum_k c_k phi_k(t)``.

    Each term is ``(kind, p, coef)`` with kind ``"poly"`` (``phi = t**p``),
    ``"cos"`` (``phi = cos(p t)``) or ``"sin"`` (``phi = sin(p t)``), and
    ``coef`` a 3-vector.  Derivatives of any order are exact.
    """

    def __init__(self, terms: Sequence[tuple]):
        self.terms = [(kind, float(p), np.asarray(c, dtype=float)) for kind, p, c in terms]
        for kind, p, c in self.terms:
            if kind not in ("poly", "cos", "sin") or c.shape != (3,):
                raise ValueError(f"bad term {(kind, p, c)!r}")
            if kind == "poly" and (p < 0 or p != int(p)):
                raise ValueError("polynomial powers must be non-negative integers")

    def __call__(self, t, order: int = 0) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        phis, coefs = [], []
        for kind, p, c in self.terms:
            if kind == "poly":
                k = int(p)
                if order > k:
                    continue
                phi = math.perm(k, order) * t ** (k - order)
            else:
                # d/dt cycles cos -> -sin -> -cos -> sin (and sin -> cos -> -sin -> -cos)
                step = order + (0 if kind == "cos" else 3)
                sign, base = _TRIG_CYCLE[step % 4]
                phi = sign * p**order * base(p * t)
            phis.append(np.broadcast_to(phi, t.shape))
            coefs.append(c)
        if not phis:
            return np.zeros(t.shape + (3,))
        return np.stack(phis, axis=-1) @ np.stack(coefs)

    def scaled(self, factor: float) -> "TermField":
        return TermField([(k, p, factor * c) for k, p, c in self.terms])


class CurveSource:
    """Base class: a space curve parameterized on ``domain``."""

    name: str = "curve"
    domain: tuple[float, float] = (-math.inf, math.inf)

    def check_domain(self, t) -> None:
        t = np.asarray(t, dtype=float)
        lo, hi = self.domain
        slack = 1e-12 * max(1.0, abs(lo) if math.isfinite(lo) else 1.0, abs(hi) if math.isfinite(hi) else 1.0)
        bad = (t < lo - slack) | (t > hi + slack)
        if np.any(bad):
            raise OutOfDomain(f"{self.name}: parameter outside {self.domain}", float(np.atleast_1d(t)[np.argmax(np.atleast_1d(bad))]))

    def jet(self, t) -> CurveJet:  # pragma: no cover - interface
        raise NotImplementedError

    def positions(self, t) -> np.ndarray:
        return self.jet(t).d0


class AnalyticCurve(CurveSource):
    """Curve with exact jets from a :class:`TermField`."""

    def __init__(self, field_: TermField, name: str = "analytic", params: dict | None = None,
                 domain=(-math.inf, math.inf)):
        self.field = field_
        self.name = name
        self.params = dict(params or {})
        self.domain = domain

    def jet(self, t) -> CurveJet:
        self.check_domain(t)
        t = np.asarray(t, dtype=float)
        d = [self.field(t, k) for k in range(5)]
        return CurveJet(t, *d)

    def positions(self, t) -> np.ndarray:
        self.check_domain(t)
        return self.field(np.asarray(t, dtype=float))

    def __repr__(self):
        return f"AnalyticCurve({self.name!r}, {self.params!r})"


class SampledCurve(CurveSource):
    """Positions on a uniform grid with finite-difference jets.

    Node derivatives ``d1 .. d4`` come from stencils of the given accuracy
    order (central inside, one-sided of the same order at the ends).  Between
    nodes every jet component is interpolated by local degree-5 polynomials.
    """

    def __init__(self, t, points, name: str = "sampled", accuracy: int = 4):
        t = np.asarray(t, dtype=float)
        points = np.asarray(points, dtype=float)
        if t.ndim != 1 or points.shape != (len(t), 3):
            raise ValueError("expected t of shape (N,) and points of shape (N, 3)")
        if len(t) < 4 + accuracy:
            raise InsufficientSamples(
                f"order-{accuracy} stencils need at least {4 + accuracy} samples, got {len(t)}")
        if not np.all(np.isfinite(points)) or not np.all(np.isfinite(t)):
            raise ValueError("samples must be finite")
        self.h = check_uniform(t)
        self.t = t
        self.points = points
        self.name = name
        self.accuracy = accuracy
        self.domain = (float(t[0]), float(t[-1]))
        derivs = [fd_uniform(points, self.h, k, accuracy) for k in (1, 2, 3, 4)]
        self._table = np.stack([points, *derivs], axis=1)  # (N, 5, 3)

    def jet(self, t) -> CurveJet:
        self.check_domain(t)
        t = np.asarray(t, dtype=float)
        tab = lagrange_eval(self.t[0], self.h, self._table, t)
        d = [tab[..., k, :] for k in range(5)]
        return CurveJet(t, *d)

    def node_jets(self) -> CurveJet:
        return CurveJet(self.t, *[self._table[:, k, :] for k in range(5)])


# --------------------------------------------------------------------------
# catalog
# --------------------------------------------------------------------------

E1, E2, E3 = np.eye(3)


def line(direction=(1.0, 0.0, 0.0)) -> AnalyticCurve:
    return AnalyticCurve(TermField([("poly", 1, direction)]), "line", {"direction": list(direction)})


def circle(r: float = 1.0) -> AnalyticCurve:
    return AnalyticCurve(TermField([("cos", 1, r * E1), ("sin", 1, r * E2)]), "circle", {"r": r})


def helix(a: float = 1.0, b: float = 1.0) -> AnalyticCurve:
    """``(a cos t, a sin t, b t)``; ``b < 0`` gives the mirrored (left-handed) helix."""
    return AnalyticCurve(
        TermField([("cos", 1, a * E1), ("sin", 1, a * E2), ("poly", 1, b * E3)]),
        "helix", {"a": a, "b": b},
    )


def elliptic_helix(a: float = 2.0, b: float = 1.0, c: float = 1.0) -> AnalyticCurve:
    """``(a cos t, b sin t, c t)``: curvature and torsion both vary."""
    return AnalyticCurve(
        TermField([("cos", 1, a * E1), ("sin", 1, b * E2), ("poly", 1, c * E3)]),
        "elliptic-helix", {"a": a, "b": b, "c": c},
    )


def twisted_cubic() -> AnalyticCurve:
    return AnalyticCurve(TermField([("poly", 1, E1), ("poly", 2, E2), ("poly", 3, E3)]), "twisted-cubic")


def cusp() -> AnalyticCurve:
    """Planar ``(t^2, t^3, 0)``, singular at ``t = 0``."""
    return AnalyticCurve(TermField([("poly", 2, E1), ("poly", 3, E2)]), "cusp")


def astroid() -> AnalyticCurve:
    """Space astroid ``(cos^3 t, sin^3 t, cos 2t)`` (singular at multiples of pi/2)."""
    return AnalyticCurve(
        TermField([
            ("cos", 1, 0.75 * E1), ("cos", 3, 0.25 * E1),
            ("sin", 1, 0.75 * E2), ("sin", 3, -0.25 * E2),
            ("cos", 2, E3),
        ]),
        "astroid",
    )


def trig_poly(terms) -> AnalyticCurve:
    """Generic trigonometric-polynomial curve from ``[(kind, p, [cx, cy, cz]), ...]``."""
    return AnalyticCurve(TermField([tuple(t) for t in terms]), "trig-poly", {"terms": [list(t) for t in terms]})


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    factory: object
    params: dict = field(default_factory=dict)
    description: str = ""
    default_grid: tuple = (0.0, 2 * math.pi, 2001)


CURVE_CATALOG: dict[str, CatalogEntry] = {
    e.name: e
    for e in [
        CatalogEntry("line", lambda: line(), {}, "straight line (t, 0, 0)", (0.0, 1.0, 101)),
        CatalogEntry("circle", circle, {"r": 1.0}, "circle of radius r in the xy-plane"),
        CatalogEntry("helix", helix, {"a": 1.0, "b": 1.0}, "circular helix (a cos t, a sin t, b t)"),
        CatalogEntry("elliptic-helix", elliptic_helix, {"a": 2.0, "b": 1.0, "c": 1.0},
                     "elliptic helix (a cos t, b sin t, c t)"),
        CatalogEntry("twisted-cubic", twisted_cubic, {}, "twisted cubic (t, t^2, t^3)", (-1.0, 1.0, 2001)),
        CatalogEntry("cusp", cusp, {}, "planar cusp (t^2, t^3, 0)", (-1.0, 1.0, 201)),
        CatalogEntry("astroid", astroid, {}, "space astroid (cos^3 t, sin^3 t, cos 2t)"),
    ]
}


def make_curve(name: str, **params) -> AnalyticCurve:
    """Instantiate a catalog curve; unknown parameters are rejected."""
    try:
        entry = CURVE_CATALOG[name]
    except KeyError:
        raise KeyError(f"unknown curve {name!r}; known: {sorted(CURVE_CATALOG)}") from None
    unknown = set(params) - set(entry.params)
    if unknown:
        raise ValueError(f"curve {name!r} does not take parameters {sorted(unknown)}")
    merged = {**entry.params, **params}
    return entry.factory(**merged)


# --------------------------------------------------------------------------
# operations
# --------------------------------------------------------------------------


def jet(curve: CurveSource, t) -> CurveJet:
    """Position and derivatives of ``curve`` at ``t`` (scalar or array)."""
    return curve.jet(t)


def sample(curve: CurveSource, grid: SampleGrid) -> np.ndarray:
    return curve.positions(grid.nodes)


def _speed_table(curve: CurveSource, grid: SampleGrid) -> tuple[np.ndarray, np.ndarray]:
    t = grid.nodes
    speed = norm(curve.jet(t).d1)
    eps = config.get().eps_unit
    bad = speed <= eps
    if np.any(bad):
        raise SingularPoint(f"{getattr(curve, 'name', 'curve')}: |gamma'| vanishes", float(t[np.argmax(bad)]))
    return t, speed


def cumulative_integral(t, values) -> np.ndarray:
    """Running integral from ``t[0]`` at every node (4th order).

    The integrand is replaced by its not-a-knot cubic spline, whose
    antiderivative is exact.  Unlike cumulative Simpson, which must treat odd
    nodes with a half-step formula, the error is smooth from node to node, so
    the result can be differentiated again without an even/odd ripple.
    """
    t = np.asarray(t, dtype=float)
    values = np.asarray(values, dtype=float)
    if len(t) < 4:
        raise InsufficientSamples(f"cumulative integral needs at least 4 samples, got {len(t)}")
    return CubicSpline(t, values, axis=0).antiderivative()(t)


def arclength(curve: CurveSource, grid: SampleGrid) -> np.ndarray:
    """Running arclength ``s(t_i)`` with ``s(t_0) = 0``."""
    t, speed = _speed_table(curve, grid)
    return cumulative_integral(t, speed)


def arclength_nodes(curve: CurveSource, grid: SampleGrid, count: int | None = None) -> np.ndarray:
    """Parameter values at equally spaced arclength, by monotone inverse
    interpolation of the running arclength table."""
    s = arclength(curve, grid)
    count = grid.count if count is None else count
    targets = np.linspace(0.0, s[-1], count)
    return np.interp(targets, s, grid.nodes)


def fd_derivative(t, values, order: int = 1, accuracy: int = 2) -> np.ndarray:
    """Finite-difference derivative of uniformly spaced samples.

    Central differences in the interior, one-sided stencils of the same
    accuracy at the ends.  ``accuracy`` is the truncation order (2 or 4).
    """
    if order not in (1, 2):
        raise ValueError("order must be 1 or 2")
    t = np.asarray(t, dtype=float)
    if len(t) < 5:
        raise InsufficientSamples(f"need at least 5 samples, got {len(t)}")
    h = check_uniform(t)
    return fd_uniform(values, h, order=order, accuracy=accuracy)


# --------------------------------------------------------------------------
# CSV
# --------------------------------------------------------------------------


def read_table_csv(path, columns: Sequence[str]) -> dict[str, np.ndarray]:
    """Read the named columns of a headed CSV file; other columns are ignored."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise ValueError(f"{path}: empty file") from None
        missing = [c for c in columns if c not in header]
        if missing:
            raise ValueError(f"{path}: missing columns {missing}")
        idx = [header.index(c) for c in columns]
        rows = [[float(r[i]) for i in idx] for r in reader if r]
    data = np.array(rows, dtype=float).reshape(-1, len(columns))
    return {c: data[:, k] for k, c in enumerate(columns)}


def write_table_csv(path_or_file, header: Sequence[str], rows) -> None:
    """Write rows with 17 significant digits (lossless for float64)."""
    rows = np.asarray(rows, dtype=float)
    close = False
    if hasattr(path_or_file, "write"):
        fh = path_or_file
    else:
        fh = open(path_or_file, "w", newline="", encoding="utf-8")
        close = True
    try:
        fh.write(",".join(header) + "\n")
        for r in rows:
            fh.write(",".join(f"{v:.17g}" for v in r) + "\n")
    finally:
        if close:
            fh.close()


def read_curve_csv(path) -> SampledCurve:
    cols = read_table_csv(path, ["t", "x", "y", "z"])
    t = cols["t"]
    if np.any(np.diff(t) <= 0):
        raise NonUniformGrid(f"{path}: t must be strictly increasing")
    return SampledCurve(t, np.column_stack([cols["x"], cols["y"], cols["z"]]), name=str(path))


def write_curve_csv(path_or_file, t, points) -> None:
    write_table_csv(path_or_file, ["t", "x", "y", "z"], np.column_stack([t, points]))
