"""Framed curves ``(gamma, nu1, nu2)`` and their curvature ``(l, m, n, alpha)``.

A framed curve pairs a (possibly singular) curve with an orthonormal pair
``(nu1, nu2)`` normal to ``gamma'``; with ``mu = nu1 x nu2``::

    l = nu1' . nu2,   m = nu1' . mu,   n = nu2' . mu,   alpha = gamma' . mu,

    d/dt (nu1, nu2, mu) = [[0, l, m], [-l, 0, n], [-m, -n, 0]] (nu1, nu2, mu),
    gamma' = alpha mu.

Singular points of ``gamma`` are exactly the zeros of ``alpha``.

Every framed curve source implements :meth:`FramedCurveSource.evaluate`
(positions and frame at any parameter values) and
:meth:`FramedCurveSource.curvature`; sources built from formulas know their
curvature in closed form, sampled sources estimate it by finite differences.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import config
from .curvekit import (
    SampleGrid, TermField, cumulative_integral, read_table_csv, write_table_csv,
)
from .errors import FrameViolation, InsufficientSamples, NonFiniteState, NonUniformGrid
from .funcs import Func, GridFunction, as_func
from .geom3 import cross, dot, norm, unit
from .odeint import LinearField, rk4_solve, transfer_maps
from .stencils import check_uniform, fd_callable, fd_uniform, lagrange_eval


# --------------------------------------------------------------------------
# value types
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class FramedState:
    """Position and frame at ``t`` (scalar or batched along axis 0)."""

    t: np.ndarray
    gamma: np.ndarray
    nu1: np.ndarray
    nu2: np.ndarray

    @property
    def mu(self) -> np.ndarray:
        return cross(self.nu1, self.nu2)

    def frame_defect(self) -> float:
        """Largest deviation of ``(nu1, nu2)`` from an orthonormal pair."""
        return float(max(
            np.max(np.abs(norm(self.nu1) - 1)),
            np.max(np.abs(norm(self.nu2) - 1)),
            np.max(np.abs(dot(self.nu1, self.nu2))),
        ))

    def check_frame(self, eps: float | None = None) -> None:
        eps = config.get().eps_unit if eps is None else eps
        if self.frame_defect() > eps:
            raise FrameViolation("(nu1, nu2) is not an orthonormal pair")

    def __getitem__(self, index) -> "FramedState":
        return FramedState(np.asarray(self.t)[index], self.gamma[index], self.nu1[index], self.nu2[index])

    def __len__(self):
        return len(np.atleast_1d(self.t))


@dataclass(frozen=True)
class FramedCurvature:
    l: np.ndarray
    m: np.ndarray
    n: np.ndarray
    alpha: np.ndarray

    def as_array(self) -> np.ndarray:
        return np.stack([self.l, self.m, self.n, self.alpha], axis=-1)

    @classmethod
    def from_array(cls, arr) -> "FramedCurvature":
        arr = np.asarray(arr, dtype=float)
        return cls(arr[..., 0], arr[..., 1], arr[..., 2], arr[..., 3])

    def max_abs_diff(self, other: "FramedCurvature") -> float:
        return float(np.max(np.abs(self.as_array() - other.as_array())))


# --------------------------------------------------------------------------
# sources
# --------------------------------------------------------------------------


class FramedCurveSource:
    """Interface shared by every framed curve."""

    name: str = "framed"
    domain: tuple = (-math.inf, math.inf)

    def evaluate(self, t) -> FramedState:  # pragma: no cover - interface
        raise NotImplementedError

    def curvature(self, t) -> FramedCurvature:  # pragma: no cover - interface
        raise NotImplementedError

    def curvature_dot(self, t) -> FramedCurvature:
        """Parameter derivative of the curvature (8th-order stencil by default)."""
        return FramedCurvature.from_array(fd_callable(lambda s: self.curvature(s).as_array(), t))

    def gamma_dot(self, t) -> np.ndarray | None:
        """Velocity if known in closed form, else ``None``."""
        return None

    def sample(self, grid: SampleGrid) -> FramedState:
        return self.evaluate(grid.nodes)

    def curvature_funcs(self) -> tuple[Func, Func, Func, Func]:
        """The curvature components as :class:`Func` objects.

        The four functions share a one-entry cache per quantity, so asking
        for all components at the same times evaluates the curve once.
        """
        cache = {}

        def table(which, t):
            t = np.asarray(t, dtype=float)
            hit = cache.get(which)
            if hit is not None and hit[0].shape == t.shape and np.array_equal(hit[0], t):
                return hit[1]
            k = self.curvature(t) if which == "value" else self.curvature_dot(t)
            arr = k.as_array()
            cache[which] = (t.copy(), arr)
            return arr

        return tuple(Func(lambda t, k=k: table("value", t)[..., k],
                          lambda t, k=k: table("deriv", t)[..., k]) for k in range(4))


def _frame_dots(g1, n1, n2, d1, d2):
    mu = cross(n1, n2)
    return FramedCurvature(dot(d1, n2), dot(d1, mu), dot(d2, mu), dot(g1, mu))


class CallableFramedCurve(FramedCurveSource):
    """Framed curve given by vector-valued callables of ``t``.

    Derivatives of the callables are taken from ``*_dot`` when provided and
    otherwise by an 8th-order central stencil.  The curvature follows from
    its defining scalar products.
    """

    def __init__(self, gamma: Callable, nu1: Callable, nu2: Callable, gamma_dot=None,
                 nu1_dot=None, nu2_dot=None, name: str = "framed", domain=(-math.inf, math.inf)):
        self._g, self._n1, self._n2 = gamma, nu1, nu2
        self._gd = gamma_dot or (lambda t: fd_callable(gamma, t))
        self._n1d = nu1_dot or (lambda t: fd_callable(nu1, t))
        self._n2d = nu2_dot or (lambda t: fd_callable(nu2, t))
        self.name = name
        self.domain = domain

    def evaluate(self, t) -> FramedState:
        t = np.asarray(t, dtype=float)
        return FramedState(t, self._g(t), self._n1(t), self._n2(t))

    def gamma_dot(self, t):
        return self._gd(np.asarray(t, dtype=float))

    def curvature(self, t) -> FramedCurvature:
        t = np.asarray(t, dtype=float)
        return _frame_dots(self._gd(t), self._n1(t), self._n2(t), self._n1d(t), self._n2d(t))


class AnalyticFramedCurve(CallableFramedCurve):
    """Framed curve whose position and frame are trigonometric polynomials;
    curvature and its derivative are exact."""

    def __init__(self, gamma: TermField, nu1: TermField, nu2: TermField, name="framed-analytic",
                 params: dict | None = None):
        super().__init__(
            lambda t: gamma(t), lambda t: nu1(t), lambda t: nu2(t),
            lambda t: gamma(t, 1), lambda t: nu1(t, 1), lambda t: nu2(t, 1), name=name,
        )
        self.fields = (gamma, nu1, nu2)
        self.params = dict(params or {})

    def curvature_dot(self, t) -> FramedCurvature:
        t = np.asarray(t, dtype=float)
        g, a, b = self.fields
        n1, n2 = a(t), b(t)
        n1d, n2d, n1dd, n2dd = a(t, 1), b(t, 1), a(t, 2), b(t, 2)
        mu = cross(n1, n2)
        mud = cross(n1d, n2) + cross(n1, n2d)
        return FramedCurvature(
            dot(n1dd, n2) + dot(n1d, n2d),
            dot(n1dd, mu) + dot(n1d, mud),
            dot(n2dd, mu) + dot(n2d, mud),
            dot(g(t, 2), mu) + dot(g(t, 1), mud),
        )


def _interp_states(t0, h, table, t) -> FramedState:
    """Interpolate stacked (gamma, nu1, nu2) samples and repair the frame."""
    tab = lagrange_eval(t0, h, table, t)
    g, a, b = tab[..., 0, :], tab[..., 1, :], tab[..., 2, :]
    a = unit(a)
    b = unit(b - dot(b, a)[..., None] * a)
    return FramedState(np.asarray(t, dtype=float), g, a, b)


class SampledFramedCurve(FramedCurveSource):
    """Framed curve known at uniform nodes; curvature by 4th-order fd."""

    def __init__(self, t, gamma, nu1, nu2, name: str = "framed-sampled", accuracy: int = 4):
        t = np.asarray(t, dtype=float)
        if len(t) < 7:
            raise InsufficientSamples(f"need at least 7 samples, got {len(t)}")
        self.h = check_uniform(t)
        self.t = t
        self.name = name
        self.domain = (float(t[0]), float(t[-1]))
        self._table = np.stack([gamma, nu1, nu2], axis=1).astype(float)
        st = self.nodes()
        curv = framed_curvature_fd(st, accuracy=accuracy)
        self._gdot = fd_uniform(st.gamma, self.h, 1, accuracy)
        self._curv = [GridFunction(t, c) for c in (curv.l, curv.m, curv.n, curv.alpha)]

    def nodes(self) -> FramedState:
        return FramedState(self.t, self._table[:, 0], self._table[:, 1], self._table[:, 2])

    def evaluate(self, t) -> FramedState:
        return _interp_states(self.t[0], self.h, self._table, t)

    def gamma_dot(self, t):
        return lagrange_eval(self.t[0], self.h, self._gdot, t)

    def curvature(self, t) -> FramedCurvature:
        return FramedCurvature(*[f(t) for f in self._curv])

    def curvature_dot(self, t) -> FramedCurvature:
        return FramedCurvature(*[f.deriv(t) for f in self._curv])


class CurvatureFramedCurve(FramedCurveSource):
    """Framed curve reconstructed from its curvature and an initial state.

    The trajectory is integrated once on ``grid``; positions between nodes
    are interpolated, while the curvature is the prescribed one.
    """

    def __init__(self, l, m, n, alpha, init: FramedState, grid: SampleGrid, name="framed-curvature",
                 substeps: int | None = None):
        self.funcs = tuple(as_func(f) for f in (l, m, n, alpha))
        self.grid = grid
        self.name = name
        self.domain = (grid.t0, grid.t1)
        self.trajectory = reconstruct(self.funcs, init, grid, substeps=substeps)
        tr = self.trajectory
        self._table = np.stack([tr.gamma, tr.nu1, tr.nu2], axis=1)

    def evaluate(self, t) -> FramedState:
        return _interp_states(self.grid.t0, self.grid.h, self._table, t)

    def curvature(self, t) -> FramedCurvature:
        return FramedCurvature(*[f(t) for f in self.funcs])

    def curvature_dot(self, t) -> FramedCurvature:
        return FramedCurvature(*[f.deriv(t) for f in self.funcs])


class RotatedFramedCurve(FramedCurveSource):
    """``(gamma, v, w)`` with ``v = cos(theta) nu1 - sin(theta) nu2`` and
    ``w = sin(theta) nu1 + cos(theta) nu2``; ``mu`` is unchanged and the
    curvature becomes ``(l - theta', m cos - n sin, m sin + n cos, alpha)``."""

    def __init__(self, base: FramedCurveSource, theta):
        self.base = base
        self.theta = as_func(theta)
        self.name = f"rotated({base.name})"
        self.domain = base.domain

    def evaluate(self, t) -> FramedState:
        st = self.base.evaluate(t)
        th = self.theta(st.t)[..., None]
        c, s = np.cos(th), np.sin(th)
        return FramedState(st.t, st.gamma, c * st.nu1 - s * st.nu2, s * st.nu1 + c * st.nu2)

    def gamma_dot(self, t):
        return self.base.gamma_dot(t)

    def curvature(self, t) -> FramedCurvature:
        k = self.base.curvature(t)
        th = self.theta(t)
        c, s = np.cos(th), np.sin(th)
        return FramedCurvature(k.l - self.theta.deriv(t), k.m * c - k.n * s, k.m * s + k.n * c, k.alpha)


SWAP, NEGATE_NU1, NEGATE_NU2 = "swap", "negate-nu1", "negate-nu2"
TRANSFORMS = (SWAP, NEGATE_NU1, NEGATE_NU2)


class TransformedFramedCurve(FramedCurveSource):
    """One of the involutive frame changes ``(gamma, nu2, nu1)``,
    ``(gamma, -nu1, nu2)``, ``(gamma, nu1, -nu2)``; each reverses ``mu``."""

    def __init__(self, base: FramedCurveSource, transform: str):
        if transform not in TRANSFORMS:
            raise ValueError(f"unknown frame transform {transform!r}")
        self.base = base
        self.transform = transform
        self.name = f"{transform}({base.name})"
        self.domain = base.domain

    def evaluate(self, t) -> FramedState:
        st = self.base.evaluate(t)
        if self.transform == SWAP:
            return FramedState(st.t, st.gamma, st.nu2, st.nu1)
        if self.transform == NEGATE_NU1:
            return FramedState(st.t, st.gamma, -st.nu1, st.nu2)
        return FramedState(st.t, st.gamma, st.nu1, -st.nu2)

    def gamma_dot(self, t):
        return self.base.gamma_dot(t)

    @staticmethod
    def _map(k: FramedCurvature, transform: str) -> FramedCurvature:
        if transform == SWAP:
            return FramedCurvature(-k.l, -k.n, -k.m, -k.alpha)
        if transform == NEGATE_NU1:
            return FramedCurvature(-k.l, k.m, -k.n, -k.alpha)
        return FramedCurvature(-k.l, -k.m, k.n, -k.alpha)

    def curvature(self, t) -> FramedCurvature:
        return self._map(self.base.curvature(t), self.transform)

    def curvature_dot(self, t) -> FramedCurvature:
        return self._map(self.base.curvature_dot(t), self.transform)


def swap(source: FramedCurveSource) -> TransformedFramedCurve:
    return TransformedFramedCurve(source, SWAP)


def negate_nu1(source: FramedCurveSource) -> TransformedFramedCurve:
    return TransformedFramedCurve(source, NEGATE_NU1)


def negate_nu2(source: FramedCurveSource) -> TransformedFramedCurve:
    return TransformedFramedCurve(source, NEGATE_NU2)


# --------------------------------------------------------------------------
# catalog
# --------------------------------------------------------------------------

_E1, _E2, _E3 = np.eye(3)


def framed_astroid() -> AnalyticFramedCurve:
    """``gamma = (28/3 cos^3 t, 28/3 sin^3 t, -21/4 cos 2t)`` with
    ``nu1 = (-sin t, -cos t, 0)``, ``nu2 = (3/5 cos t, -3/5 sin t, 4/5)``.

    Curvature ``(-3/5, 4/5, 0, 35 cos t sin t)``; its involute and evolute
    are again space astroids.
    """
    gamma = TermField([
        ("cos", 1, 7 * _E1), ("cos", 3, 7 / 3 * _E1),
        ("sin", 1, 7 * _E2), ("sin", 3, -7 / 3 * _E2),
        ("cos", 2, -21 / 4 * _E3),
    ])
    nu1 = TermField([("sin", 1, -_E1), ("cos", 1, -_E2)])
    nu2 = TermField([("cos", 1, 0.6 * _E1), ("sin", 1, -0.6 * _E2), ("poly", 0, 0.8 * _E3)])
    return AnalyticFramedCurve(gamma, nu1, nu2, name="framed-astroid")


def framed_circle(r: float = 1.0) -> AnalyticFramedCurve:
    """Circle of radius ``r`` with ``nu1 = e3`` and radial ``nu2``.

    Curvature ``(0, 0, 1, r)``."""
    gamma = TermField([("cos", 1, r * _E1), ("sin", 1, r * _E2)])
    nu1 = TermField([("poly", 0, _E3)])
    nu2 = TermField([("cos", 1, _E1), ("sin", 1, _E2)])
    return AnalyticFramedCurve(gamma, nu1, nu2, name="framed-circle", params={"r": r})


def framed_still() -> AnalyticFramedCurve:
    """Constant curve at the origin with a frame spinning about ``e3``:
    singular everywhere, curvature ``(1, 0, 0, 0)``."""
    gamma = TermField([("poly", 0, np.zeros(3))])
    nu1 = TermField([("cos", 1, _E1), ("sin", 1, _E2)])
    nu2 = TermField([("sin", 1, -_E1), ("cos", 1, _E2)])
    return AnalyticFramedCurve(gamma, nu1, nu2, name="framed-still")


def framed_frenet_helix(a: float = 1.0, b: float = 1.0) -> AnalyticFramedCurve:
    """Helix ``(a cos t, a sin t, b t)`` framed by its normal and binormal.

    As a framed curve ``(gamma, n, b)`` it has
    ``(l, m, n, alpha) = (s tau, -s kappa, 0, s)`` with ``s = sqrt(a^2+b^2)``.
    """
    s = math.hypot(a, b)
    gamma = TermField([("cos", 1, a * _E1), ("sin", 1, a * _E2), ("poly", 1, b * _E3)])
    normal = TermField([("cos", 1, -_E1), ("sin", 1, -_E2)])
    binormal = TermField([("sin", 1, b / s * _E1), ("cos", 1, -b / s * _E2), ("poly", 0, a / s * _E3)])
    return AnalyticFramedCurve(gamma, normal, binormal, name="framed-frenet-helix", params={"a": a, "b": b})


def framed_cusp() -> CallableFramedCurve:
    """Planar cusp ``(t^2, t^3, 0)`` with ``nu1 = e3`` and ``mu`` the unit
    tangent direction ``(2, 3t, 0)/sqrt(4 + 9t^2)``.

    Curvature ``(0, 0, 6/(4 + 9t^2), t sqrt(4 + 9t^2))``; the origin is a
    singular point where ``alpha`` changes sign.
    """

    def r(t):
        return np.sqrt(4 + 9 * t**2)

    def gamma(t):
        return np.stack([t**2, t**3, 0 * t], axis=-1)

    def gamma_dot(t):
        return np.stack([2 * t, 3 * t**2, 0 * t], axis=-1)

    def nu1(t):
        return np.broadcast_to(_E3, np.shape(t) + (3,)).copy()

    def nu2(t):
        return np.stack([3 * t / r(t), -2 / r(t), 0 * t], axis=-1)

    def nu2_dot(t):
        rr = r(t)
        return np.stack([12 / rr**3, 18 * t / rr**3, 0 * t], axis=-1)

    src = CallableFramedCurve(gamma, nu1, nu2, gamma_dot, lambda t: np.zeros(np.shape(t) + (3,)),
                              nu2_dot, name="framed-cusp")
    return src


@dataclass(frozen=True)
class FramedCatalogEntry:
    name: str
    factory: object
    params: dict
    description: str
    default_grid: tuple = (0.0, 2 * math.pi, 2001)


FRAMED_CATALOG: dict[str, FramedCatalogEntry] = {
    e.name: e
    for e in [
        FramedCatalogEntry("framed-astroid", framed_astroid, {},
                           "(28/3 cos^3 t, 28/3 sin^3 t, -21/4 cos 2t) with curvature (-3/5, 4/5, 0, 35 cos t sin t)"),
        FramedCatalogEntry("framed-circle", framed_circle, {"r": 1.0}, "circle with nu1 = e3, radial nu2"),
        FramedCatalogEntry("framed-still", framed_still, {}, "constant point with a rotating frame"),
        FramedCatalogEntry("framed-frenet-helix", framed_frenet_helix, {"a": 1.0, "b": 1.0},
                           "helix framed by (normal, binormal)"),
        FramedCatalogEntry("framed-cusp", framed_cusp, {}, "planar cusp (t^2, t^3, 0) with a smooth frame",
                           (-1.0, 1.0, 2001)),
    ]
}


def make_framed(name: str, **params) -> FramedCurveSource:
    try:
        entry = FRAMED_CATALOG[name]
    except KeyError:
        raise KeyError(f"unknown framed curve {name!r}; known: {sorted(FRAMED_CATALOG)}") from None
    unknown = set(params) - set(entry.params)
    if unknown:
        raise ValueError(f"framed curve {name!r} does not take parameters {sorted(unknown)}")
    return entry.factory(**{**entry.params, **params})


# --------------------------------------------------------------------------
# operations
# --------------------------------------------------------------------------


def framed_curvature(source: FramedCurveSource, t) -> FramedCurvature:
    """Curvature at ``t`` after checking that the frame is admissible there:
    orthonormal within ``eps_unit`` and normal to ``gamma'`` within ``tol_cond``."""
    tol = config.get()
    st = source.evaluate(t)
    st.check_frame()
    g1 = source.gamma_dot(t)
    if g1 is not None:
        viol = np.maximum(np.abs(dot(g1, st.nu1)), np.abs(dot(g1, st.nu2)))
        if np.any(viol > tol.tol_cond):
            tt = np.atleast_1d(np.asarray(t, dtype=float))
            raise FrameViolation("gamma' is not normal to (nu1, nu2)",
                                 float(tt[np.argmax(np.atleast_1d(viol))]) if tt.size > 1 else float(tt[0]))
    return source.curvature(t)


def framed_curvature_fd(states: FramedState, accuracy: int = 4) -> FramedCurvature:
    """Finite-difference estimate of the curvature from samples on a uniform grid."""
    h = check_uniform(states.t)
    d_g = fd_uniform(states.gamma, h, 1, accuracy)
    d1 = fd_uniform(states.nu1, h, 1, accuracy)
    d2 = fd_uniform(states.nu2, h, 1, accuracy)
    return _frame_dots(d_g, states.nu1, states.nu2, d1, d2)


def singular_points(source: FramedCurveSource, grid: SampleGrid) -> np.ndarray:
    """Parameter values where ``alpha`` vanishes, located to within one grid
    cell (exact zeros at nodes, linear interpolation across sign changes)."""
    t = grid.nodes
    a = source.curvature(t).alpha
    tol = config.get().tol_cond
    roots = []
    zero = np.abs(a) <= tol
    i = 0
    while i < len(t):
        if zero[i]:
            k = i
            while k + 1 < len(t) and zero[k + 1]:
                k += 1
            roots.append(0.5 * (t[i] + t[k]))
            i = k + 1
            continue
        if i + 1 < len(t) and not zero[i + 1] and a[i] * a[i + 1] < 0:
            roots.append(t[i] - a[i] * (t[i + 1] - t[i]) / (a[i + 1] - a[i]))
        i += 1
    return np.asarray(roots)


def reconstruct(curvature, init: FramedState, grid: SampleGrid, substeps: int | None = None,
                project: bool = True) -> FramedState:
    """Integrate the Frenet-type system for ``(nu1, nu2, mu, gamma)``.

    ``curvature`` is a 4-tuple of functions ``(l, m, n, alpha)`` (numbers,
    callables or :class:`Func`).  ``init`` is the state at ``grid.t0``.  With
    ``project=True`` the frame is re-orthonormalized by Gram-Schmidt at every
    grid node.
    """
    l, m, n, alpha = (as_func(f) for f in curvature)
    init.check_frame()

    def matrix(tt):
        c = np.zeros((len(tt), 4, 4))
        lv, mv, nv, av = l(tt), m(tt), n(tt), alpha(tt)
        c[:, 0, 1], c[:, 0, 2] = lv, mv
        c[:, 1, 0], c[:, 1, 2] = -lv, nv
        c[:, 2, 0], c[:, 2, 1] = -mv, -nv
        c[:, 3, 2] = av
        return c

    # The 12-dimensional system is the 4x4 system above acting on each
    # ambient coordinate, so the rows (nu1, nu2, mu, gamma) evolve by one
    # shared transfer matrix per step.
    field = LinearField(4, matrix)
    nodes = grid.nodes
    y = np.stack([init.nu1, init.nu2, init.mu, init.gamma]).astype(float)
    out = np.empty((len(nodes), 4, 3))
    out[0] = y
    for lo, maps in transfer_maps(field, grid, substeps):
        for i, tr in enumerate(maps[:, :4, :4]):
            y = tr @ y
            if not np.all(np.isfinite(y)):
                raise NonFiniteState("reconstruction produced a non-finite value", float(nodes[lo + i]))
            if project:
                a = y[0] / math.sqrt(y[0] @ y[0])
                b = y[1] - (y[1] @ a) * a
                b = b / math.sqrt(b @ b)
                y = np.stack([a, b, np.cross(a, b), y[3]])
            out[lo + i + 1] = y
    return FramedState(nodes, out[:, 3], out[:, 0], out[:, 1])


def frame_drift(states: FramedState) -> float:
    """Largest orthonormality defect of ``(nu1, nu2)`` over the states."""
    return states.frame_defect()


def rotate_frame(source: FramedCurveSource, theta) -> RotatedFramedCurve:
    return RotatedFramedCurve(source, theta)


def bishop_frame(source: FramedCurveSource, theta0: float, grid: SampleGrid,
                 substeps: int | None = None) -> RotatedFramedCurve:
    """Rotate by ``theta`` solving ``theta' = l``, ``theta(t0) = theta0``, so
    that the rotated frame has ``l = 0`` (both normals transported parallel)."""
    l = source.curvature_funcs()[0]
    field = LinearField(1, lambda tt: np.zeros((len(tt), 1, 1)), lambda tt: l(tt)[:, None])
    traj = rk4_solve(field, [theta0], grid, substeps=substeps)
    theta = GridFunction(grid.nodes, traj.states[:, 0], derivs=l(grid.nodes), name="bishop-theta")
    return RotatedFramedCurve(source, theta)


def running_integral(f, grid: SampleGrid) -> np.ndarray:
    """``int_{t0}^{t_i} f`` at the grid nodes (cumulative spline quadrature)."""
    return cumulative_integral(grid.nodes, as_func(f)(grid.nodes))


# --------------------------------------------------------------------------
# CSV
# --------------------------------------------------------------------------

FRAMED_COLUMNS = ["t", "gx", "gy", "gz", "n1x", "n1y", "n1z", "n2x", "n2y", "n2z"]


def write_framed_csv(path_or_file, states: FramedState) -> None:
    write_table_csv(path_or_file, FRAMED_COLUMNS,
                    np.column_stack([states.t, states.gamma, states.nu1, states.nu2]))


def read_framed_csv(path) -> SampledFramedCurve:
    cols = read_table_csv(path, FRAMED_COLUMNS)
    t = cols["t"]
    if np.any(np.diff(t) <= 0):
        raise NonUniformGrid(f"{path}: t must be strictly increasing")
    g = np.column_stack([cols["gx"], cols["gy"], cols["gz"]])
    a = np.column_stack([cols["n1x"], cols["n1y"], cols["n1z"]])
    b = np.column_stack([cols["n2x"], cols["n2y"], cols["n2z"]])
    return SampledFramedCurve(t, g, a, b, name=str(path))
