"""Evolutes and involutes of non-degenerate and framed curves.

Non-degenerate curves
    :func:`evolute` is ``gamma + (1/kappa) n - kappa'/(s kappa^2 tau) b``
    (the ``NBB`` mate) and :func:`involute` is the ``TNT`` mate.  The round
    trips :func:`roundtrip_ev_of_inv` and :func:`roundtrip_inv_of_ev` apply
    the second operation to *samples* of the first, using finite-difference
    Frenet data only, and report the distance to the starting curve.

Framed curves
    :func:`framed_evolute` (``N1N2_N2`` mate with the pair
    ``(sin(theta) nu1 + cos(theta) nu2, mu)``), :func:`framed_involute`
    (``MuN1_Mu`` mate), the circular evolute ``gamma - (alpha/m) v`` of a
    Bishop frame, the ``t0``-involute ``gamma - (int alpha) mu`` and the
    framed round trips.

Round trips sample the intermediate curve on an *oracle grid*: a stride of
the user grid with spacing near ``0.05`` extended by a few nodes on both
sides, so that every reported node is differentiated by central stencils.
Rounding noise in the samples is amplified by ``h**-4`` in the fourth
derivatives the evolute needs, which is why a fine grid is not better here.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import config
from .curvekit import CurveSource, SampleGrid, SampledCurve, cumulative_integral
from .errors import (
    FrameDegenerate, HVanishes, MbarVanishes, NotBishop, SignChange,
)
from .framedkit import FramedCurvature, FramedCurveSource, FramedState
from .frenet import frenet_apparatus
from .funcs import Func, GridFunction, as_func, fcos, fsin
from .geom3 import cross, norm
from .mates import (
    MUN1_MU, N1N2_N2, NBT, MateResult, _sign_constant, evolute_coefficients, evolute_points,
    framed_mate, mate_residual, tnt_mate,
)

INV_THEN_EV = "inv-then-ev"
EV_THEN_INV = "ev-then-inv"
DIRECTIONS = (INV_THEN_EV, EV_THEN_INV)

ROUNDTRIP_ACCURACY = 8
ROUNDTRIP_PADDING = 6


# --------------------------------------------------------------------------
# data types
# --------------------------------------------------------------------------


@dataclass
class EvoluteData:
    """Coefficients of an evolute on the grid.

    ``h`` is ``s tau/kappa + eta'`` (non-degenerate case only); when it
    vanishes or changes sign the evolute is still returned and
    ``degenerate_at`` holds the first offending parameter.
    """

    t: np.ndarray
    lambdaE: np.ndarray
    etaE: np.ndarray
    h: np.ndarray | None = None
    thetaE: np.ndarray | None = None
    degenerate_at: float | None = None


@dataclass
class InvoluteData:
    """Trajectory ``(lambda, eta)`` of the involute system and its start."""

    t: np.ndarray
    lambdaI: np.ndarray
    etaI: np.ndarray
    init: tuple
    thetaI: np.ndarray | None = None


@dataclass
class RoundTripReport:
    """Distances between a curve and the result of a round trip.

    ``max_frame_error`` is the largest deviation of the recovered frame
    vectors (tangent direction for non-degenerate curves, ``nu1, nu2`` for
    framed curves) from the original ones.  ``case_tag`` names the sign case
    or parameter selection used; ``details`` holds further scalar
    diagnostics.
    """

    name: str
    max_position_error: float
    max_frame_error: float
    case_tag: str
    details: dict = field(default_factory=dict)
    t: np.ndarray | None = None
    position_error: np.ndarray | None = None

    def __post_init__(self):
        if self.max_position_error < 0 or self.max_frame_error < 0:
            raise ValueError("round-trip errors are non-negative")

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "max_position_error": float(self.max_position_error),
            "max_frame_error": float(self.max_frame_error),
            "case_tag": self.case_tag,
            "details": _jsonable(self.details),
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)


@dataclass
class InvoluteFrame:
    """The maps ``xi = (n nu1 - m nu2)/r``, ``eta_vec = xi x mu`` and
    ``f = xi' . eta_vec = (m' n - m n' - l r^2)/r^2`` with
    ``r = sqrt(m^2 + n^2)``.

    Differentiating ``xi`` with ``nu1' = l nu2 + m mu`` and
    ``nu2' = -l nu1 + n mu`` gives
    ``r xi' = (n' + m l) nu1 + (n l - m') nu2 + (1/r)' r^2 xi``, and the
    scalar product with ``r eta_vec = -m nu1 - n nu2`` yields the ``r^2``
    denominator.
    """

    t: np.ndarray
    xi: np.ndarray
    eta_vec: np.ndarray
    f: np.ndarray


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.floating, np.integer, np.bool_)):
        return obj.item()
    return obj


# --------------------------------------------------------------------------
# non-degenerate curves
# --------------------------------------------------------------------------


def evolute(curve: CurveSource, grid: SampleGrid) -> tuple[np.ndarray, EvoluteData]:
    """Samples of the evolute and its coefficients.

    Raises :class:`TorsionVanishes`; a vanishing or sign-changing ``h`` is
    recorded in ``EvoluteData.degenerate_at`` instead of raised.
    """
    t = grid.nodes
    ec = evolute_coefficients(curve, t)
    points = evolute_points(curve, t, ec)
    degenerate_at = None
    try:
        _sign_constant(ec.h, t, HVanishes, "h")
    except HVanishes as exc:
        degenerate_at = exc.t
    return points, EvoluteData(t, ec.lam, ec.eta, ec.h, degenerate_at=degenerate_at)


def involute(curve: CurveSource, init, grid: SampleGrid) -> tuple[np.ndarray, InvoluteData]:
    """Samples of the involute started from ``(lambda0, eta0)``, ``eta0 != 0``."""
    res = tnt_mate(curve, init, grid)
    data = InvoluteData(res.t, res.coefficients["lambda"], res.coefficients["eta"],
                        tuple(float(v) for v in init))
    return res.mate, data


def _oracle_grid(curve, grid: SampleGrid, stride: int, padding: int):
    """Grid of every ``stride``-th node of ``grid`` extended by ``padding``
    nodes on both sides (dropped when the domain of ``curve`` is too short).

    Returns ``(padded_grid, pad, node_index)`` where ``node_index`` maps the
    reported nodes ``padded_grid.nodes[pad:-pad]`` to indices of ``grid``.
    """
    H = stride * grid.h
    count = (grid.count - 1) // stride + 1
    t_last = grid.t0 + (count - 1) * H
    lo, hi = getattr(curve, "domain", (-math.inf, math.inf))
    pad = padding if (grid.t0 - padding * H >= lo and t_last + padding * H <= hi) else 0
    return SampleGrid(grid.t0 - pad * H, t_last + pad * H, count + 2 * pad), pad, np.arange(count) * stride


def _inner(pad: int, n: int) -> slice:
    return slice(pad, n - pad)


AUTO_SPACINGS = (0.1, 0.05, 0.025, 0.0125, 0.00625)


def _strides(grid: SampleGrid, spacing, accuracy: int) -> list[int]:
    wanted = AUTO_SPACINGS if spacing == "auto" else (float(spacing),)
    out = []
    for sp in wanted:
        k = max(1, round(sp / grid.h))
        # keep enough nodes for the stencils even without padding
        while k > 1 and (grid.count - 1) // k + 1 < 4 + accuracy:
            k -= 1
        if k not in out:
            out.append(k)
    return out


def _select(runs: list[dict]) -> tuple[dict, float | None]:
    """Pick the run whose positions agree best with the next finer run.

    ``runs`` are ordered coarse to fine; each has ``index`` (grid node
    indices) and ``points``.  Returns the coarser member of the best pair and
    the pair's discrepancy (an estimate of the discretization error).
    """
    if len(runs) == 1:
        return runs[0], None
    best = None
    for a, b in zip(runs, runs[1:]):
        common, ia, ib = np.intersect1d(a["index"], b["index"], return_indices=True)
        if len(common) == 0:
            continue
        d = float(np.max(norm(a["points"][ia] - b["points"][ib])))
        if best is None or d < best[1]:
            best = (a, d)
    if best is None:
        return runs[-1], None
    return best


def _ev_of_inv_run(curve, init, grid, stride, accuracy, padding) -> dict:
    og, pad, index = _oracle_grid(curve, grid, stride, padding)
    tp = og.nodes
    inv = tnt_mate(curve, init, og, anchor=pad)
    sampled = SampledCurve(tp, inv.mate, name=f"involute({curve.name})", accuracy=accuracy)
    ec = evolute_coefficients(sampled, tp)
    sl = _inner(pad, len(tp))
    return {"index": index, "t": tp[sl], "points": evolute_points(sampled, tp, ec)[sl],
            "h": ec.h[sl], "binormal": ec.frenet.binormal[sl], "eta": inv.coefficients["eta"][sl],
            "spacing": og.h, "padding": pad}


def roundtrip_ev_of_inv(curve: CurveSource, init, grid: SampleGrid, *, spacing="auto",
                        accuracy: int = ROUNDTRIP_ACCURACY, padding: int = ROUNDTRIP_PADDING) -> RoundTripReport:
    """Build ``Inv(gamma)`` from ``init`` (given at ``grid.t0``), sample it,
    take the evolute of the samples and compare with ``gamma``.

    The involute is differentiated on a strided copy of ``grid``; with
    ``spacing="auto"`` several spacings are tried and the one agreeing best
    with its halving is kept (``details["spacing_estimate"]``).
    ``details["h_identity_error"]`` is ``max |h_I - sign(tau) |gamma'||``:
    the ``h`` of the involute equals the speed of ``gamma`` up to the sign of
    the torsion.
    """
    runs = [_ev_of_inv_run(curve, init, grid, k, accuracy, padding) for k in _strides(grid, spacing, accuracy)]
    run, estimate = _select(runs)
    t = run["t"]
    fd = frenet_apparatus(curve.jet(t))
    err = norm(run["points"] - curve.positions(t))
    h = run["h"]
    frame_err = norm(np.sign(h)[:, None] * run["binormal"] - fd.tangent)
    st = np.sign(fd.tau)
    se = np.sign(run["eta"])
    tag = f"tau{'+' if st[0] > 0 else '-'}, eta{'+' if se[0] > 0 else '-'}"
    details = {
        "h_identity_error": float(np.max(np.abs(h - st * fd.speed))),
        "h_min_abs": float(np.min(np.abs(h))),
        "nodes": int(len(t)),
        "spacing": float(run["spacing"]),
        "spacing_estimate": estimate,
        "padding": int(run["padding"]),
        "accuracy": int(accuracy),
    }
    return RoundTripReport("ev-of-inv", float(np.max(err)), float(np.max(frame_err)), tag, details, t, err)


INV_OF_EV_CASES = {
    (1, 1): "i",
    (1, -1): "ii",
    (-1, 1): "iii",
    (-1, -1): "iv",
}


def inverse_selection(lam_e, eta_e, sign_tau: float, sign_h: float):
    """``(lambda_I, eta_I)`` that makes ``Inv(Ev(gamma)) = gamma``:
    ``lambda_I = -sign(h) eta_E`` and ``eta_I = sign(h) sign(tau) lambda_E``."""
    return -sign_h * np.asarray(eta_e), sign_h * sign_tau * np.asarray(lam_e)


def _inv_of_ev_run(curve, init, grid, stride, accuracy, padding) -> dict:
    og, pad, index = _oracle_grid(curve, grid, stride, padding)
    tp = og.nodes
    ec = evolute_coefficients(curve, tp)
    st = _sign_constant(ec.frenet.tau, tp, SignChange, "tau")
    sh = _sign_constant(ec.h, tp, SignChange, "h")
    lam_sel, eta_sel = inverse_selection(ec.lam, ec.eta, st, sh)
    start = tuple(float(v) for v in init) if init is not None else (float(lam_sel[pad]), float(eta_sel[pad]))
    ev = SampledCurve(tp, evolute_points(curve, tp, ec), name=f"evolute({curve.name})", accuracy=accuracy)
    inv = tnt_mate(ev, start, og, anchor=pad)
    sl = _inner(pad, len(tp))
    sel_err = max(np.max(np.abs(inv.coefficients["lambda"][sl] - lam_sel[sl])),
                  np.max(np.abs(inv.coefficients["eta"][sl] - eta_sel[sl])))
    return {"index": index, "t": tp[sl], "points": inv.mate[sl], "tangent": inv.predicted_frame.e1[sl],
            "sign_tau": st, "sign_h": sh, "selection_error": float(sel_err),
            "spacing": og.h, "padding": pad}


def roundtrip_inv_of_ev(curve: CurveSource, grid: SampleGrid, init=None, *, spacing="auto",
                        accuracy: int = ROUNDTRIP_ACCURACY, padding: int = ROUNDTRIP_PADDING) -> RoundTripReport:
    """Sample ``Ev(gamma)``, build an involute of the samples and compare
    with ``gamma``.

    With ``init=None`` the start ``(lambda_I, eta_I)(t0)`` follows the sign
    case of ``(tau, h)`` (see :func:`inverse_selection`) and the result should
    be ``gamma`` itself.  A manual ``init`` gives another involute; the report
    then also holds the ``(n, b, t_bar)``-mate residuals between ``gamma`` and
    the result under ``details["mate"]``.  Raises :class:`SignChange` when
    ``tau`` or ``h`` changes sign (or vanishes) on the grid.
    """
    runs = [_inv_of_ev_run(curve, init, grid, k, accuracy, padding) for k in _strides(grid, spacing, accuracy)]
    run, estimate = _select(runs)
    t = run["t"]
    fd = frenet_apparatus(curve.jet(t))
    err = norm(run["points"] - curve.positions(t))
    frame_err = norm(run["tangent"] - fd.tangent)
    case = INV_OF_EV_CASES[(int(run["sign_tau"]), int(run["sign_h"]))]
    details = {
        "sign_tau": run["sign_tau"],
        "sign_h": run["sign_h"],
        "selection_error": run["selection_error"],
        "nodes": int(len(t)),
        "spacing": float(run["spacing"]),
        "spacing_estimate": estimate,
        "padding": int(run["padding"]),
        "accuracy": int(accuracy),
    }
    tag = f"case {case}"
    if init is not None:
        tag += ", manual init"
        inner_grid = SampleGrid(float(t[0]), float(t[-1]), len(t))
        cand = SampledCurve(t, run["points"], accuracy=min(accuracy, 6))
        details["mate"] = mate_residual(curve, cand, NBT, inner_grid)
    return RoundTripReport("inv-of-ev", float(np.max(err)), float(np.max(frame_err)), tag, details, t, err)


# --------------------------------------------------------------------------
# framed curves
# --------------------------------------------------------------------------


def framed_evolute(source: FramedCurveSource, theta, grid: SampleGrid, *, lam=None, eta=None,
                   c0: float = 0.0, null_multiple=None) -> tuple[MateResult, EvoluteData]:
    """Evolute ``(gamma + lambda nu1 + eta nu2, sin(theta) nu1 + cos(theta) nu2, mu)``.

    ``(lambda, eta)`` are given explicitly or follow the closing rule of the
    ``N1N2_N2`` conditions (minimum-norm solution of
    ``alpha + lambda m + eta n = 0`` plus a multiple of the null direction).
    Raises :class:`ConditionInfeasible` when the conditions cannot be met.
    """
    res = framed_mate(source, N1N2_N2, grid, lam=lam, eta=eta, theta=theta, c0=c0, null_multiple=null_multiple)
    c = res.coefficients
    return res, EvoluteData(res.t, c["lambda"], c["eta"], thetaE=c["theta"])


def framed_involute(source: FramedCurveSource, grid: SampleGrid, init=(0.0, 0.0),
                    theta=0.0) -> tuple[MateResult, InvoluteData]:
    """Involute ``(gamma + lambda mu + eta nu1, cos(theta) mu - sin(theta) nu1,
    sin(theta) mu + cos(theta) nu1)`` with ``lambda' = -alpha - eta m``,
    ``eta' = lambda m`` integrated from ``init`` at ``grid.t0``."""
    res = framed_mate(source, MUN1_MU, grid, init=init, theta=theta)
    c = res.coefficients
    return res, InvoluteData(res.t, c["lambda"], c["eta"], tuple(float(v) for v in init), thetaI=c["theta"])


class CircularEvolute(FramedCurveSource):
    """``(gamma - (alpha/m) v, w, mu)`` for a Bishop frame ``(v, w)``; its
    curvature is ``(n, 0, -m, -(alpha/m)')``."""

    def __init__(self, base: FramedCurveSource):
        self.base = base
        self.name = f"circular-evolute({base.name})"
        self.domain = base.domain

    def evaluate(self, t) -> FramedState:
        st = self.base.evaluate(t)
        k = self.base.curvature(st.t)
        ratio = (k.alpha / k.m)[..., None]
        return FramedState(st.t, st.gamma - ratio * st.nu1, st.nu2, st.mu)

    def curvature(self, t) -> FramedCurvature:
        k = self.base.curvature(t)
        kd = self.base.curvature_dot(t)
        ratio_dot = (kd.alpha * k.m - k.alpha * kd.m) / k.m**2
        return FramedCurvature(k.n, np.zeros_like(k.n), -k.m, -ratio_dot)


def circular_evolute(source: FramedCurveSource, grid: SampleGrid) -> tuple[CircularEvolute, FramedState]:
    """Circular evolute of a framed curve whose frame is Bishop (``l = 0``).

    Raises :class:`NotBishop` if ``|l| > tol_cond`` somewhere and
    :class:`MbarVanishes` where ``m`` vanishes or changes sign.
    """
    tol = config.get().tol_cond
    t = grid.nodes
    k = source.curvature(t)
    bad = np.abs(k.l) > tol
    if np.any(bad):
        raise NotBishop(f"frame is not Bishop: max |l| = {np.max(np.abs(k.l)):.3g}", float(t[np.argmax(bad)]))
    # a sign change between nodes means a zero in between
    _sign_constant(k.m, t, MbarVanishes, "m")
    ce = CircularEvolute(source)
    return ce, ce.sample(grid)


def bishop_evolute_parameters(source: FramedCurveSource, theta):
    """``(lambda_E, eta_E, theta_E) = (-alpha cos(theta)/m_bar,
    alpha sin(theta)/m_bar, theta)`` with ``m_bar = m cos(theta) - n sin(theta)``,
    for which the framed evolute is the circular evolute of the rotated frame."""
    theta = as_func(theta)
    l, m, n, alpha = source.curvature_funcs()
    c, s = fcos(theta), fsin(theta)
    mbar = m * c - n * s
    return -alpha * c / mbar, alpha * s / mbar, theta


class T0Involute(FramedCurveSource):
    """``(gamma - A mu, xi, mu)`` with ``A(t) = int_{t0}^t alpha``; curvature
    ``(0, f, r, -A r)``."""

    def __init__(self, base: FramedCurveSource, integral: Func, t0: float):
        self.base = base
        self.integral = integral
        self.t0 = float(t0)
        self.name = f"t0-involute({base.name})"
        self.domain = base.domain

    def maps(self, t) -> InvoluteFrame:
        st = self.base.evaluate(t)
        k = self.base.curvature(st.t)
        kd = self.base.curvature_dot(st.t)
        r = np.sqrt(k.m**2 + k.n**2)
        xi = (k.n[..., None] * st.nu1 - k.m[..., None] * st.nu2) / r[..., None]
        f = (kd.m * k.n - k.m * kd.n - k.l * r**2) / r**2
        return InvoluteFrame(st.t, xi, cross(xi, st.mu), f)

    def evaluate(self, t) -> FramedState:
        st = self.base.evaluate(t)
        k = self.base.curvature(st.t)
        r = np.sqrt(k.m**2 + k.n**2)
        xi = (k.n[..., None] * st.nu1 - k.m[..., None] * st.nu2) / r[..., None]
        a = self.integral(st.t)[..., None]
        return FramedState(st.t, st.gamma - a * st.mu, xi, st.mu)

    def curvature(self, t) -> FramedCurvature:
        k = self.base.curvature(t)
        kd = self.base.curvature_dot(t)
        r = np.sqrt(k.m**2 + k.n**2)
        f = (kd.m * k.n - k.m * kd.n - k.l * r**2) / r**2
        return FramedCurvature(np.zeros_like(r), f, r, -self.integral(t) * r)


def t0_involute(source: FramedCurveSource, t0: float, grid: SampleGrid) -> tuple[T0Involute, FramedState, InvoluteFrame]:
    """The ``t0``-involute ``gamma(t) - (int_{t0}^t alpha) mu(t)`` with frame
    ``(xi, mu)``.

    The integral is the cumulative spline quadrature on the grid (as for
    arclength); ``t0`` must lie in the grid interval.  Raises
    :class:`FrameDegenerate` where ``m^2 + n^2 <= tol_cond``.
    """
    t = grid.nodes
    if not (grid.t0 <= t0 <= grid.t1):
        raise ValueError(f"t0 = {t0} lies outside the grid [{grid.t0}, {grid.t1}]")
    k = source.curvature(t)
    bad = k.m**2 + k.n**2 <= config.get().tol_cond
    if np.any(bad):
        raise FrameDegenerate("m^2 + n^2 vanishes, xi is undefined", float(t[np.argmax(bad)]))
    alpha = k.alpha
    cum = GridFunction(t, cumulative_integral(t, alpha), derivs=alpha, name="int-alpha")
    offset = float(cum(np.array([t0]))[0])
    integral = Func(lambda s: cum(s) - offset, lambda s: cum.deriv(s), "int-alpha-t0")
    inv = T0Involute(source, integral, t0)
    return inv, inv.sample(grid), inv.maps(t)


# --------------------------------------------------------------------------
# framed round trips
# --------------------------------------------------------------------------

_FLEX = {
    "identity": lambda a, b: (a, b),
    "negate-nu1": lambda a, b: (-a, b),
    "negate-nu2": lambda a, b: (a, -b),
    "negate-both": lambda a, b: (-a, -b),
    "swap": lambda a, b: (b, a),
    "swap-negate-nu1": lambda a, b: (-b, a),
    "swap-negate-nu2": lambda a, b: (b, -a),
    "swap-negate-both": lambda a, b: (-b, -a),
}


def best_frame_match(result: FramedState, reference: FramedState) -> tuple[str, float]:
    """Smallest ``max |nu_i - nu_i_ref|`` over the sign and swap changes of
    the normal pair (a framed curve is only defined up to these)."""
    best = None
    for name, fn in _FLEX.items():
        a, b = fn(result.nu1, result.nu2)
        e = float(max(np.max(norm(a - reference.nu1)), np.max(norm(b - reference.nu2))))
        if best is None or e < best[1]:
            best = (name, e)
    return best


def inverse_parameters(lam, eta, theta):
    """The selection ``lambda' = -(lambda cos(theta) - eta sin(theta))``,
    ``eta' = -(lambda sin(theta) + eta cos(theta))``, ``theta' = -theta``
    that undoes a framed involute (or evolute).

    Substituting the pair into the position of the second operation cancels
    the displacement of the first exactly; without the overall minus sign the
    displacement is doubled instead (see :func:`printed_parameters`).
    """
    lam, eta, theta = as_func(lam), as_func(eta), as_func(theta)
    c, s = fcos(theta), fsin(theta)
    return -(lam * c - eta * s), -(lam * s + eta * c), -theta


def printed_parameters(lam, eta, theta):
    """The same selection without the overall minus sign (kept for
    comparison: it displaces the curve by twice the first offset)."""
    lam, eta, theta = as_func(lam), as_func(eta), as_func(theta)
    c, s = fcos(theta), fsin(theta)
    return lam * c - eta * s, lam * s + eta * c, -theta


def framed_roundtrips(source: FramedCurveSource, grid: SampleGrid, direction: str = INV_THEN_EV, *,
                      init=(0.0, 0.0), theta=None, second: dict | None = None) -> RoundTripReport:
    """Compose a framed involute and evolute and compare with ``source``.

    ``inv-then-ev``
        ``I`` is the framed involute from ``init`` with angle ``theta``
        (default 0); the evolute of ``I`` uses :func:`inverse_parameters`.
    ``ev-then-inv``
        ``E`` is the framed evolute with angle ``theta`` (default ``pi/2``)
        under the closing rule; the involute of ``E`` starts from the value of
        :func:`inverse_parameters` at ``grid.t0`` with angle ``-theta``.

    ``second`` replaces the inverse selection by other admissible parameters
    of the second stage: keyword arguments of :func:`framed_evolute`
    (``theta`` required, e.g. ``{"theta": 1.0, "c0": 2.0}``) or of
    :func:`framed_involute` (``init``, ``theta``).  The result is then
    generally not the source, and ``details["mate"]`` holds the mate residuals
    between the source and the result: ``(mu, nu1, nu2_bar)`` for evolutes of
    involutes, ``(nu1, nu2, mu_bar)`` for involutes of evolutes.
    """
    t = grid.nodes
    ref = source.sample(grid)
    details: dict = {}
    if direction == INV_THEN_EV:
        th = as_func(0.0 if theta is None else theta)
        first, _ = framed_involute(source, grid, init=init, theta=th)
        mate1 = first.source
        if second is None:
            lam2, eta2, th2 = inverse_parameters(mate1.lam, mate1.eta, mate1.theta)
            tag = "inverse selection"
            plam, peta, _ = printed_parameters(mate1.lam, mate1.eta, mate1.theta)
            pts = first.mate
            gp = pts.gamma + plam(t)[:, None] * pts.nu1 + peta(t)[:, None] * pts.nu2
            details["printed_selection_position_error"] = float(np.max(norm(gp - ref.gamma)))
            final, _ = framed_evolute(mate1, th2, grid, lam=lam2, eta=eta2)
        else:
            kwargs = dict(second)
            tag = "other evolute parameters"
            final, _ = framed_evolute(mate1, kwargs.pop("theta"), grid, **kwargs)
        mate_kind = "MuN1_N2"
    elif direction == EV_THEN_INV:
        th = as_func(math.pi / 2 if theta is None else theta)
        first, _ = framed_evolute(source, th, grid)
        mate1 = first.source
        lam_sel, eta_sel, th2 = inverse_parameters(mate1.lam, mate1.eta, mate1.theta)
        if second is None:
            start = (float(lam_sel(t[:1])[0]), float(eta_sel(t[:1])[0]))
            tag = "inverse selection"
            final, _ = framed_involute(mate1, grid, init=start, theta=th2)
            details["selection_error"] = float(max(
                np.max(np.abs(final.coefficients["lambda"] - lam_sel(t))),
                np.max(np.abs(final.coefficients["eta"] - eta_sel(t)))))
        else:
            tag = "other involute parameters"
            final, _ = framed_involute(mate1, grid, **second)
        mate_kind = "N1N2_Mu"
    else:
        raise ValueError(f"direction must be one of {DIRECTIONS}, got {direction!r}")
    out = final.mate
    err = norm(out.gamma - ref.gamma)
    flex, frame_err = best_frame_match(out, ref)
    details["frame_match"] = flex
    details["first_stage_residual"] = float(max(first.residuals.values()))
    details["second_stage_residual"] = float(max(final.residuals.values()))
    if second is not None:
        details["mate"] = mate_residual(source, out, mate_kind, grid)
    return RoundTripReport(f"framed-{direction}", float(np.max(err)), frame_err, tag, details, t, err)


__all__ = [
    "CircularEvolute", "DIRECTIONS", "EV_THEN_INV", "EvoluteData", "INV_THEN_EV", "InvoluteData",
    "InvoluteFrame", "RoundTripReport", "T0Involute", "best_frame_match", "bishop_evolute_parameters",
    "circular_evolute", "evolute", "framed_evolute", "framed_involute", "framed_roundtrips",
    "inverse_parameters", "inverse_selection", "involute", "printed_parameters", "roundtrip_ev_of_inv",
    "roundtrip_inv_of_ev", "t0_involute",
]
