"""Frenet apparatus of non-degenerate space curves in an arbitrary parameter.

With ``s = |g'|``, ``c = g' x g''``:

    t = g'/s,  b = c/|c|,  n = b x t,
    kappa = |c| / s^3,  tau = det(g', g'', g''') / |c|^2,

and the moving frame obeys ``t' = s kappa n``, ``n' = -s kappa t + s tau b``,
``b' = -s tau n``.  :func:`frenet_derivatives` additionally returns the
parameter derivatives of ``s``, ``kappa`` and ``tau`` (and ``kappa''``),
computed in closed form from a jet of order four.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import config
from .curvekit import CurveJet, CurveSource, SampleGrid, arclength_nodes, cumulative_integral
from .errors import DegeneratePoint, SingularPoint
from .geom3 import Frame3, cross, det3, dot, norm


@dataclass(frozen=True)
class FrenetData:
    """Frenet frame, curvature, torsion and speed (scalar or batched)."""

    t: np.ndarray
    tangent: np.ndarray
    normal: np.ndarray
    binormal: np.ndarray
    kappa: np.ndarray
    tau: np.ndarray
    speed: np.ndarray

    @property
    def frame(self) -> Frame3:
        return Frame3(self.tangent, self.normal, self.binormal)


@dataclass(frozen=True)
class FrenetDerivatives:
    """``s, s', kappa, kappa', kappa'', tau, tau'`` in the curve parameter."""

    speed: np.ndarray
    speed_dot: np.ndarray
    kappa: np.ndarray
    kappa_dot: np.ndarray
    kappa_ddot: np.ndarray
    tau: np.ndarray
    tau_dot: np.ndarray


def _first_bad(mask, t):
    t = np.atleast_1d(np.asarray(t, dtype=float))
    mask = np.atleast_1d(mask)
    return float(t[np.argmax(mask)]) if t.size == mask.size else None


def _check_regular(j: CurveJet):
    eps = config.get().eps_unit
    s = norm(j.d1)
    if np.any(s <= eps):
        raise SingularPoint("singular point (|gamma'| vanishes)", _first_bad(s <= eps, j.t))
    c = cross(j.d1, j.d2)
    a = norm(c)
    if np.any(a <= eps):
        raise DegeneratePoint("degenerate point (gamma' x gamma'' vanishes)", _first_bad(a <= eps, j.t))
    return s, c, a


def frenet_apparatus(j: CurveJet) -> FrenetData:
    s, c, a = _check_regular(j)
    t_vec = j.d1 / s[..., None]
    b_vec = c / a[..., None]
    n_vec = cross(b_vec, t_vec)
    kappa = a / s**3
    tau = det3(j.d1, j.d2, j.d3) / a**2
    return FrenetData(np.asarray(j.t), t_vec, n_vec, b_vec, kappa, tau, s)


def frenet_derivatives(j: CurveJet) -> FrenetDerivatives:
    """Closed-form parameter derivatives of speed, curvature and torsion.

    Requires ``j.d4``.
    """
    if j.d4 is None:
        raise ValueError("a jet of order four is required")
    s, c, a = _check_regular(j)
    g1, g2, g3, g4 = j.d1, j.d2, j.d3, j.d4
    c_dot = cross(g1, g3)
    c_ddot = cross(g2, g3) + cross(g1, g4)
    cc = dot(c, c_dot)
    a_dot = cc / a
    a_ddot = (dot(c_dot, c_dot) + dot(c, c_ddot)) / a - cc**2 / a**3
    g12 = dot(g1, g2)
    s_dot = g12 / s
    s_ddot = (dot(g2, g2) + dot(g1, g3)) / s - g12**2 / s**3
    kappa = a / s**3
    kappa_dot = a_dot / s**3 - 3 * a * s_dot / s**4
    kappa_ddot = (
        a_ddot / s**3 - 6 * a_dot * s_dot / s**4 - 3 * a * s_ddot / s**4 + 12 * a * s_dot**2 / s**5
    )
    det = det3(g1, g2, g3)
    det_dot = det3(g1, g2, g4)
    tau = det / a**2
    tau_dot = det_dot / a**2 - 2 * det * a_dot / a**3
    return FrenetDerivatives(s, s_dot, kappa, kappa_dot, kappa_ddot, tau, tau_dot)


def frenet_on_grid(curve: CurveSource, grid: SampleGrid) -> FrenetData:
    return frenet_apparatus(curve.jet(grid.nodes))


# --------------------------------------------------------------------------
# diagnostics
# --------------------------------------------------------------------------

REGULAR, SINGULAR, DEGENERATE = "regular", "singular", "degenerate"


@dataclass(frozen=True)
class NondegeneracyReport:
    t: np.ndarray
    status: np.ndarray  # array of REGULAR / SINGULAR / DEGENERATE
    intervals: list  # [(status, t_start, t_end), ...] for the offending runs

    @property
    def all_regular(self) -> bool:
        return bool(np.all(self.status == REGULAR))

    def nodes_with(self, status: str) -> np.ndarray:
        return self.t[self.status == status]


def nondegeneracy_scan(curve: CurveSource, grid: SampleGrid) -> NondegeneracyReport:
    """Classify every node as regular, singular (``|g'| <= eps``) or
    degenerate (``|g' x g''| <= eps``)."""
    eps = config.get().eps_unit
    t = grid.nodes
    j = curve.jet(t)
    s = norm(j.d1)
    a = norm(cross(j.d1, j.d2))
    status = np.full(len(t), REGULAR, dtype=object)
    status[a <= eps] = DEGENERATE
    status[s <= eps] = SINGULAR
    intervals = []
    i = 0
    while i < len(t):
        if status[i] != REGULAR:
            k = i
            while k + 1 < len(t) and status[k + 1] == status[i]:
                k += 1
            intervals.append((status[i], float(t[i]), float(t[k])))
            i = k + 1
        else:
            i += 1
    return NondegeneracyReport(t, status, intervals)


# --------------------------------------------------------------------------
# classical Bertrand / Mannheim / planar conditions
# --------------------------------------------------------------------------

BERTRAND, MANNHEIM, PLANAR_TN, PLANAR_NT = "Bertrand", "Mannheim", "PlanarTN", "PlanarNT"
CLASSICAL_KINDS = (BERTRAND, MANNHEIM, PLANAR_TN, PLANAR_NT)


@dataclass(frozen=True)
class ClassicalCheck:
    kind: str
    constants: dict
    residual: float
    side_condition_min: float
    verdict: bool
    tolerance: float


def _arclength_invariants(curve: CurveSource, grid: SampleGrid):
    """kappa, tau and their arclength derivatives at equal-arclength nodes."""
    t_nodes = arclength_nodes(curve, grid)
    j = curve.jet(t_nodes)
    d = frenet_derivatives(j)
    s_table = cumulative_integral(t_nodes, d.speed)
    return s_table, d.kappa, d.tau, d.kappa_dot / d.speed, d.tau_dot / d.speed


def classical_condition_check(curve: CurveSource, grid: SampleGrid, kind: str,
                              tolerance: float | None = None) -> ClassicalCheck:
    """Decide the classical mate conditions by fitting their constants.

    ``Bertrand``: ``A kappa + B tau = 1`` with ``tau (B kappa - A tau) != 0``.
    ``Mannheim``: ``A (kappa^2 + tau^2) = kappa`` with
    ``tau (kappa tau' - kappa' tau) != 0``.
    ``PlanarTN``: ``tau = 0`` and ``c - s != 0`` for a recorded constant ``c``.
    ``PlanarNT``: ``tau = 0`` and ``kappa' != 0``.
    Derivatives are with respect to arclength.
    """
    if kind not in CLASSICAL_KINDS:
        raise ValueError(f"unknown classical check {kind!r}")
    tol = config.get().tol_cond if tolerance is None else tolerance
    s, kappa, tau, kappa_p, tau_p = _arclength_invariants(curve, grid)
    if kind == BERTRAND:
        design = np.column_stack([kappa, tau])
        coef, *_ = np.linalg.lstsq(design, np.ones_like(kappa), rcond=None)
        A, B = coef
        residual = float(np.max(np.abs(design @ coef - 1)))
        side = np.abs(tau * (B * kappa - A * tau))
        if residual <= tol and side.min() <= tol:
            # rank-deficient fits (constant kappa, tau) leave a line of
            # solutions; move along it to satisfy the side condition if possible
            null = np.array([-np.mean(tau), np.mean(kappa)])
            if np.linalg.norm(null) > 0:
                null = null / np.linalg.norm(null)
                for shift in (1.0, -1.0, 2.0, -2.0):
                    trial = coef + shift * null
                    r = float(np.max(np.abs(design @ trial - 1)))
                    sd = np.abs(tau * (trial[1] * kappa - trial[0] * tau))
                    if r <= tol and sd.min() > tol:
                        (A, B), residual, side = trial, r, sd
                        break
        constants = {"A": float(A), "B": float(B)}
        verdict = residual <= tol and side.min() > tol
    elif kind == MANNHEIM:
        x = kappa**2 + tau**2
        A = float(np.dot(x, kappa) / np.dot(x, x))
        residual = float(np.max(np.abs(A * x - kappa)))
        side = np.abs(tau * (kappa * tau_p - kappa_p * tau))
        constants = {"A": A}
        verdict = residual <= tol and side.min() > tol and abs(A) > tol
    elif kind == PLANAR_TN:
        residual = float(np.max(np.abs(tau)))
        c = float(s[-1] + max(1.0, s[-1]))
        side = np.abs(c - s)
        constants = {"c": c}
        verdict = residual <= tol and side.min() > tol
    else:
        residual = float(np.max(np.abs(tau)))
        side = np.abs(kappa_p)
        constants = {}
        verdict = residual <= tol and side.min() > tol
    return ClassicalCheck(kind, constants, residual, float(np.min(side)), bool(verdict), tol)
