"""Bertrand-type mates ``gamma_bar = gamma + lambda v + eta w`` with
``v x w = +-x_bar``.

Non-degenerate curves (Frenet frame ``t, n, b``)
    ``NBB`` -- ``(n, b, b_bar)``: the evolute; ``lambda = 1/kappa``,
    ``eta = -kappa'/(s kappa^2 tau)``, admissible when ``tau != 0`` and
    ``h = s tau/kappa + eta' != 0``.
    ``TNT`` -- ``(t, n, t_bar)``: involutes; ``lambda' = eta s kappa - s``,
    ``eta' = -lambda s kappa`` with ``eta != 0``.
    ``NBT`` -- ``(n, b, t_bar)``: ``lambda' = eta s tau``,
    ``eta' = -lambda s tau`` with ``1 - lambda kappa != 0``.

Framed curves (frame ``nu1, nu2, mu``, curvature ``l, m, n, alpha``)
    ``N1N2_N2`` -- evolute type, ``alpha + lambda m + eta n = 0`` and
    ``(lambda' - eta l) sin(theta) + (lambda l + eta') cos(theta) = 0``.
    ``MuN1_Mu`` -- involute type, ``lambda' = -alpha - eta m``,
    ``eta' = lambda m``.
    ``MuN1_N2`` -- ``-lambda n + eta l = 0`` and
    ``(alpha + lambda' + eta m) sin(theta) + (-lambda m + eta') cos(theta) = 0``.
    ``N1N2_Mu`` -- ``lambda' = eta l``, ``eta' = -lambda l``.

Each construction returns a :class:`MateResult` holding the mate samples, the
frame and curvature predicted in closed form, the residuals of the defining
conditions, and finite-difference oracle comparisons computed from the mate
samples alone.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import config
from .curvekit import CurveSource, SampleGrid, SampledCurve
from .errors import (
    ConditionInfeasible, EtaVanishes, HVanishes, OsculatingDegeneracy, TorsionVanishes,
    TrivialCoefficients,
)
from .framedkit import (
    FramedCurvature, FramedCurveSource, FramedState, framed_curvature_fd,
)
from .frenet import FrenetData, frenet_apparatus, frenet_derivatives
from .funcs import Const, Func, GridFunction, as_func, fcos, fsin, fsqrt
from .geom3 import Frame3, cross, dot, norm
from .odeint import LinearField, default_substeps, rk4_solve
from .stencils import check_uniform, fd_uniform

NBB, TNT, NBT = "NBB", "TNT", "NBT"
N1N2_N2, MUN1_MU, MUN1_N2, N1N2_MU = "N1N2_N2", "MuN1_Mu", "MuN1_N2", "N1N2_Mu"
NONDEGENERATE_KINDS = (NBB, TNT, NBT)
FRAMED_KINDS = (N1N2_N2, MUN1_MU, MUN1_N2, N1N2_MU)
MATE_KINDS = NONDEGENERATE_KINDS + FRAMED_KINDS

# (v, w, x_bar) for each kind; two-vector kinds have w = None and mean
# gamma_bar = gamma + lambda v with v = +-x_bar.
KIND_VECTORS = {
    NBB: ("n", "b", "b"),
    TNT: ("t", "n", "t"),
    NBT: ("n", "b", "t"),
    N1N2_N2: ("nu1", "nu2", "nu2"),
    MUN1_MU: ("mu", "nu1", "mu"),
    MUN1_N2: ("mu", "nu1", "nu2"),
    N1N2_MU: ("nu1", "nu2", "mu"),
    "N1_N1": ("nu1", None, "nu1"),  # framed Bertrand mates
    "N1_N2": ("nu1", None, "nu2"),  # framed Mannheim mates
    "N1_Mu": ("nu1", None, "mu"),
    "N2_Mu": ("nu2", None, "mu"),
    "Mu_N1": ("mu", None, "nu1"),
    "Mu_N2": ("mu", None, "nu2"),
}


@dataclass
class MateResult:
    """Outcome of a mate construction.

    ``mate`` is an ``(N, 3)`` array (non-degenerate kinds) or a
    :class:`FramedState` (framed kinds).  ``residuals`` hold the maxima over
    the grid of the defining conditions; ``oracle`` holds the maxima of
    ``|finite-difference estimate - closed-form prediction|`` for the mate's
    frame and curvature.
    """

    kind: str
    t: np.ndarray
    mate: object
    predicted_frame: object
    predicted_curvature: object
    residuals: dict
    oracle: dict
    coefficients: dict
    source: object = None
    extras: dict = field(default_factory=dict)

    @property
    def verdict(self) -> bool:
        tol = config.get().tol_cond
        return all(v <= tol for v in self.residuals.values())

    @property
    def positions(self) -> np.ndarray:
        return self.mate if isinstance(self.mate, np.ndarray) else self.mate.gamma


# --------------------------------------------------------------------------
# helpers
# --------------------------------------------------------------------------


def _first(mask, t) -> float:
    return float(np.asarray(t)[np.argmax(mask)])


def check_density(lam, eta, t, kind="mate") -> None:
    """``(lambda, eta)`` must exceed ``tol_cond`` on at least 1% of the nodes."""
    tol = config.get().tol_cond
    frac = np.mean(np.abs(lam) + np.abs(eta) > tol)
    if frac < 0.01:
        raise TrivialCoefficients(f"{kind}: (lambda, eta) vanishes on the grid")


def _check_torsion(fd: FrenetData, t) -> None:
    tol = config.get().tol_cond
    bad = np.abs(fd.tau) <= tol
    if np.any(bad):
        raise TorsionVanishes("torsion vanishes", _first(bad, t))


def _sign_constant(x, t, err, what: str) -> float:
    """Common sign of ``x`` over the grid (decided at the first node)."""
    tol = config.get().tol_cond
    small = np.abs(x) <= tol
    if np.any(small):
        raise err(f"{what} vanishes", _first(small, t))
    sg = np.sign(x[0])
    flip = np.sign(x) != sg
    if np.any(flip):
        raise err(f"{what} changes sign", _first(flip, t))
    return float(sg)


def curve_oracle(t, points, accuracy: int = 6) -> FrenetData:
    """Frenet data estimated from samples alone.

    The frame and curvature use finite-difference first and second
    derivatives; the torsion comes from differentiating the estimated
    binormal (``b' = -s tau n``), which avoids the strong rounding
    amplification of third-difference stencils.
    """
    t = np.asarray(t, dtype=float)
    h = check_uniform(t)
    acc = accuracy if len(t) >= accuracy + 3 else 4
    d1 = fd_uniform(points, h, 1, acc)
    d2 = fd_uniform(points, h, 2, acc)
    s = norm(d1)
    c = cross(d1, d2)
    a = norm(c)
    tangent = d1 / s[:, None]
    binormal = c / a[:, None]
    normal = cross(binormal, tangent)
    tau = -dot(fd_uniform(binormal, h, 1, acc), normal) / s
    return FrenetData(t, tangent, normal, binormal, a / s**3, tau, s)


ORACLE_SPACING = 1e-2


def oracle_stride(t, spacing: float = ORACLE_SPACING) -> int:
    """Stride that brings the node spacing of ``t`` close to ``spacing``.

    Difference stencils divide rounding noise by ``h**k``; on very fine grids
    this noise swamps the truncation error, so oracles subsample the mate to
    a spacing near ``1e-2`` (keeping at least nine nodes).
    """
    t = np.asarray(t, dtype=float)
    h = check_uniform(t)
    return int(max(1, min(round(spacing / h), (len(t) - 1) // 8)))


def _nondeg_oracle(t, points, frame: Frame3, kappa, tau) -> dict:
    k = oracle_stride(t)
    fd = curve_oracle(np.asarray(t)[::k], np.asarray(points)[::k])
    sl = slice(None, None, k)
    return {
        "kappa": float(np.max(np.abs(fd.kappa - kappa[sl]))),
        "tau": float(np.max(np.abs(fd.tau - tau[sl]))),
        "frame": float(max(np.max(norm(fd.tangent - frame.e1[sl])), np.max(norm(fd.normal - frame.e2[sl])),
                           np.max(norm(fd.binormal - frame.e3[sl])))),
    }


def _frenet_funcs(curve: CurveSource):
    """``s(t), kappa(t), tau(t)`` at arbitrary parameters (for ODE stages)."""

    def data(t):
        return frenet_apparatus(curve.jet(t))

    return data


# --------------------------------------------------------------------------
# non-degenerate constructions
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class EvoluteCoefficients:
    lam: np.ndarray
    eta: np.ndarray
    eta_dot: np.ndarray
    h: np.ndarray
    frenet: FrenetData


def evolute_coefficients(curve: CurveSource, t) -> EvoluteCoefficients:
    """``lambda = 1/kappa``, ``eta = -kappa'/(s kappa^2 tau)``, ``eta'`` and
    ``h = s tau/kappa + eta'`` at ``t``; raises if the torsion vanishes."""
    j = curve.jet(t)
    fd = frenet_apparatus(j)
    _check_torsion(fd, t)
    d = frenet_derivatives(j)
    s, k, kd, kdd, tau, taud, sd = d.speed, d.kappa, d.kappa_dot, d.kappa_ddot, d.tau, d.tau_dot, d.speed_dot
    den = s * k**2 * tau
    den_dot = sd * k**2 * tau + 2 * s * k * kd * tau + s * k**2 * taud
    eta = -kd / den
    eta_dot = -kdd / den + kd * den_dot / den**2
    h = s * tau / k + eta_dot
    return EvoluteCoefficients(1 / k, eta, eta_dot, h, fd)


def evolute_points(curve: CurveSource, t, ec: EvoluteCoefficients) -> np.ndarray:
    """``gamma + lambda n + eta b`` at ``t`` from precomputed coefficients."""
    fd = ec.frenet
    return curve.positions(t) + ec.lam[:, None] * fd.normal + ec.eta[:, None] * fd.binormal


def nbb_mate(curve: CurveSource, grid: SampleGrid) -> MateResult:
    """The ``(n, b, b_bar)`` mate (evolute) with its predicted frame and curvature."""
    t = grid.nodes
    ec = evolute_coefficients(curve, t)
    fd = ec.frenet
    sh = _sign_constant(ec.h, t, HVanishes, "h")
    st = np.sign(fd.tau)
    check_density(ec.lam, ec.eta, t, NBB)
    mate = evolute_points(curve, t, ec)
    frame = Frame3(sh * fd.binormal, (-sh * st)[:, None] * fd.normal, st[:, None] * fd.tangent)
    kappa_bar = fd.speed * np.abs(fd.tau) / np.abs(ec.h)
    tau_bar = fd.speed * fd.kappa / ec.h
    residuals = {
        # the mate velocity must be h b: its t and n components vanish
        "tangent_component": float(np.max(np.abs(fd.speed * (1 - ec.lam * fd.kappa)))),
        "normal_component": float(np.max(np.abs(_fd(t, ec.lam) - fd.speed * ec.eta * fd.tau))),
    }
    return MateResult(
        NBB, t, mate, frame, {"kappa": kappa_bar, "tau": tau_bar}, residuals,
        _nondeg_oracle(t, mate, frame, kappa_bar, tau_bar),
        {"lambda": ec.lam, "eta": ec.eta, "h": ec.h},
        source=SampledCurve(t, mate, name=f"evolute({curve.name})"),
        extras={"sign_h": sh},
    )


def _fd(t, values) -> np.ndarray:
    h = check_uniform(t)
    acc = 6 if len(t) >= 9 else 4
    return fd_uniform(values, h, 1, acc)


def _solve_pair(grid, init, coef_fn, kind, anchor: int = 0):
    """Integrate ``(lambda, eta)`` for one of the linear 2x2 systems.

    ``init`` is the state at node ``anchor``; nodes before it are reached by
    integrating the time-reversed system.
    """
    lam0, eta0 = (float(v) for v in init)
    t = grid.nodes

    def field(sign, t_ref):
        def matrix(tt):
            a, _ = coef_fn(t_ref + sign * tt)
            return sign * a

        def forcing(tt):
            _, b = coef_fn(t_ref + sign * tt)
            return sign * b

        return LinearField(2, matrix, forcing)

    parts = []
    if anchor > 0:
        # u = t[anchor] - t runs forward from 0 as t runs back to t0
        back = rk4_solve(field(-1.0, float(t[anchor])), [lam0, eta0],
                         SampleGrid(0.0, float(t[anchor] - t[0]), anchor + 1),
                         substeps=default_substeps(grid))
        parts.append(back.states[:0:-1])
    if anchor < len(t) - 1:
        fwd = rk4_solve(field(1.0, 0.0), [lam0, eta0], SampleGrid(float(t[anchor]), float(t[-1]), len(t) - anchor),
                        substeps=default_substeps(grid))
        parts.append(fwd.states)
    else:
        parts.append(np.array([[lam0, eta0]]))
    states = np.concatenate(parts)
    return states[:, 0], states[:, 1]


def tnt_mate(curve: CurveSource, init, grid: SampleGrid, anchor: int = 0) -> MateResult:
    """The ``(t, n, t_bar)`` mate (an involute) from ``(lambda0, eta0)``
    given at node ``anchor`` (default: the first node)."""
    t = grid.nodes
    fdata = _frenet_funcs(curve)
    fd = fdata(t)
    _check_torsion(fd, t)
    lam0, eta0 = (float(v) for v in init)
    if abs(eta0) <= config.get().tol_cond:
        raise EtaVanishes("initial eta vanishes", float(t[anchor]))

    def coef(tt):
        f = fdata(tt)
        sk = f.speed * f.kappa
        a = np.zeros((len(tt), 2, 2))
        a[:, 0, 1] = sk
        a[:, 1, 0] = -sk
        b = np.zeros((len(tt), 2))
        b[:, 0] = -f.speed
        return a, b

    lam, eta = _solve_pair(grid, (lam0, eta0), coef, TNT, anchor)
    se = _sign_constant(eta, t, EtaVanishes, "eta")
    st = np.sign(fd.tau)
    check_density(lam, eta, t, TNT)
    mate = curve.positions(t) + lam[:, None] * fd.tangent + eta[:, None] * fd.normal
    frame = Frame3((se * st)[:, None] * fd.binormal, -se * fd.normal, st[:, None] * fd.tangent)
    kappa_bar = 1 / np.abs(eta)
    tau_bar = fd.kappa / (eta * fd.tau)
    s = fd.speed
    residuals = {
        "condition_lambda": float(np.max(np.abs(s + _fd(t, lam) - eta * s * fd.kappa))),
        "condition_eta": float(np.max(np.abs(lam * s * fd.kappa + _fd(t, eta)))),
    }
    return MateResult(
        TNT, t, mate, frame, {"kappa": kappa_bar, "tau": tau_bar}, residuals,
        _nondeg_oracle(t, mate, frame, kappa_bar, tau_bar),
        {"lambda": lam, "eta": eta},
        source=SampledCurve(t, mate, name=f"involute({curve.name})"),
        extras={"init": (lam0, eta0), "mate_speed": np.abs(eta * s * fd.tau)},
    )


def nbt_mate(curve: CurveSource, init, grid: SampleGrid) -> MateResult:
    """The ``(n, b, t_bar)`` mate from ``(lambda0, eta0)``.

    The mate velocity is ``s (1 - lambda kappa) t``, so with
    ``sigma = sign(1 - lambda kappa)`` the mate frame is
    ``(sigma t, sigma n, b)``, its curvature ``kappa/|1 - lambda kappa|`` and
    its torsion ``tau/(1 - lambda kappa)``.
    """
    t = grid.nodes
    fdata = _frenet_funcs(curve)
    fd = fdata(t)

    def coef(tt):
        f = fdata(tt)
        st = f.speed * f.tau
        a = np.zeros((len(tt), 2, 2))
        a[:, 0, 1] = st
        a[:, 1, 0] = -st
        return a, np.zeros((len(tt), 2))

    lam, eta = _solve_pair(grid, init, coef, NBT)
    check_density(lam, eta, t, NBT)
    osc = 1 - lam * fd.kappa
    sigma = _sign_constant(osc, t, OsculatingDegeneracy, "1 - lambda kappa")
    mate = curve.positions(t) + lam[:, None] * fd.normal + eta[:, None] * fd.binormal
    frame = Frame3(sigma * fd.tangent, sigma * fd.normal, fd.binormal)
    kappa_bar = fd.kappa / np.abs(osc)
    tau_bar = fd.tau / osc
    s = fd.speed
    residuals = {
        "condition_lambda": float(np.max(np.abs(_fd(t, lam) - eta * s * fd.tau))),
        "condition_eta": float(np.max(np.abs(lam * s * fd.tau + _fd(t, eta)))),
    }
    return MateResult(
        NBT, t, mate, frame, {"kappa": kappa_bar, "tau": tau_bar}, residuals,
        _nondeg_oracle(t, mate, frame, kappa_bar, tau_bar),
        {"lambda": lam, "eta": eta},
        source=SampledCurve(t, mate, name=f"nbt({curve.name})"),
        extras={"init": tuple(float(v) for v in init), "sigma": sigma,
                "invariant_drift": float(np.max(np.abs(lam**2 + eta**2 - (lam[0] ** 2 + eta[0] ** 2))))},
    )


# --------------------------------------------------------------------------
# framed constructions
# --------------------------------------------------------------------------


class MateFramedCurve(FramedCurveSource):
    """Framed mate built from a source and coefficient functions.

    Curvature is the closed-form prediction for ``kind``.
    """

    def __init__(self, base: FramedCurveSource, kind: str, lam: Func, eta: Func, theta: Func):
        if kind not in FRAMED_KINDS:
            raise ValueError(f"unknown framed mate kind {kind!r}")
        self.base, self.kind = base, kind
        self.lam, self.eta, self.theta = as_func(lam), as_func(eta), as_func(theta)
        self.name = f"{kind}({base.name})"
        self.domain = base.domain
        self._curv = predicted_framed_curvature(kind, base.curvature_funcs(), self.lam, self.eta, self.theta)

    def evaluate(self, t) -> FramedState:
        st = self.base.evaluate(t)
        tt = st.t
        lam, eta, th = self.lam(tt)[..., None], self.eta(tt)[..., None], self.theta(tt)[..., None]
        c, s = np.cos(th), np.sin(th)
        n1, n2, mu = st.nu1, st.nu2, st.mu
        if self.kind == N1N2_N2:
            return FramedState(tt, st.gamma + lam * n1 + eta * n2, s * n1 + c * n2, mu)
        if self.kind == MUN1_MU:
            return FramedState(tt, st.gamma + lam * mu + eta * n1, c * mu - s * n1, s * mu + c * n1)
        if self.kind == MUN1_N2:
            return FramedState(tt, st.gamma + lam * mu + eta * n1, s * mu + c * n1, n2)
        return FramedState(tt, st.gamma + lam * n1 + eta * n2, c * n1 - s * n2, s * n1 + c * n2)

    def curvature(self, t) -> FramedCurvature:
        return FramedCurvature(*[f(t) for f in self._curv])

    def curvature_dot(self, t) -> FramedCurvature:
        return FramedCurvature(*[f.deriv(t) for f in self._curv])


def predicted_framed_curvature(kind, base_curv, lam, eta, theta):
    """Curvature ``(l, m, n, alpha)`` of the framed mate as :class:`Func` objects."""
    l, m, n, alpha = base_curv
    lam_d, eta_d, th_d = lam.derivative(), eta.derivative(), theta.derivative()
    s, c = fsin(theta), fcos(theta)
    if kind == N1N2_N2:
        return (m * s + n * c, th_d - l, n * s - m * c, (lam_d - eta * l) * c - (lam * l + eta_d) * s)
    if kind == MUN1_MU:
        return (-th_d - m, -(l * s + n * c), l * c - n * s, -lam * n + eta * l)
    if kind == MUN1_N2:
        return (l * c - n * s, th_d + m, l * s + n * c, (alpha + lam_d + eta * m) * c + (lam * m - eta_d) * s)
    return (l - th_d, m * c - n * s, m * s + n * c, alpha + lam * m + eta * n)


def framed_conditions(kind, base_curv, lam, eta, theta, t, lam_dot=None, eta_dot=None):
    """Defining conditions of ``kind`` evaluated at ``t`` (arrays)."""
    l, m, n, alpha = (f(t) for f in base_curv)
    lv, ev, th = lam(t), eta(t), theta(t)
    ld = lam.deriv(t) if lam_dot is None else lam_dot
    ed = eta.deriv(t) if eta_dot is None else eta_dot
    s, c = np.sin(th), np.cos(th)
    if kind == N1N2_N2:
        return {"algebraic": alpha + lv * m + ev * n, "differential": (ld - ev * l) * s + (lv * l + ed) * c}
    if kind == MUN1_MU:
        return {"eta_equation": -lv * m + ed, "lambda_equation": alpha + ld + ev * m}
    if kind == MUN1_N2:
        return {"algebraic": -lv * n + ev * l, "differential": (alpha + ld + ev * m) * s + (-lv * m + ed) * c}
    return {"lambda_equation": ld - ev * l, "eta_equation": lv * l + ed}


def _max_abs(d: dict) -> dict:
    return {k: float(np.max(np.abs(v))) for k, v in d.items()}


def _framed_oracle(mate: FramedState, predicted: FramedCurvature) -> dict:
    k = oracle_stride(mate.t)
    mate = FramedState(mate.t[::k], mate.gamma[::k], mate.nu1[::k], mate.nu2[::k])
    acc = 6 if len(mate) >= 9 else 4
    fd = framed_curvature_fd(mate, accuracy=acc)
    h = check_uniform(mate.t)
    g1 = fd_uniform(mate.gamma, h, 1, acc)
    out = {name: float(np.max(np.abs(a - b))) for name, a, b in zip(
        ("l", "m", "n", "alpha"), fd.as_array().T, predicted.as_array().T[:, ::k])}
    out["normality"] = float(max(np.max(np.abs(dot(g1, mate.nu1))), np.max(np.abs(dot(g1, mate.nu2)))))
    return out


def _freeze(f: Func, t, name: str) -> Func:
    if isinstance(f, (Const, GridFunction)):
        return f
    return GridFunction(t, f(t), f.deriv(t), name)


def _integrate_framed_pair(source, kind, init, grid):
    l, m, n, alpha = source.curvature_funcs()

    if kind == MUN1_MU:
        def coef(tt):
            mv = m(tt)
            a = np.zeros((len(tt), 2, 2))
            a[:, 0, 1] = -mv
            a[:, 1, 0] = mv
            b = np.zeros((len(tt), 2))
            b[:, 0] = -alpha(tt)
            return a, b

        def rhs(tt, lv, ev):
            mv = m(tt)
            return -alpha(tt) - ev * mv, lv * mv
    else:
        def coef(tt):
            lv = l(tt)
            a = np.zeros((len(tt), 2, 2))
            a[:, 0, 1] = lv
            a[:, 1, 0] = -lv
            return a, np.zeros((len(tt), 2))

        def rhs(tt, lv, ev):
            lc = l(tt)
            return ev * lc, -lv * lc

    lam, eta = _solve_pair(grid, init, coef, kind)
    t = grid.nodes
    dl, de = rhs(t, lam, eta)
    return GridFunction(t, lam, dl, "lambda"), GridFunction(t, eta, de, "eta")


def _null_closure(source, theta, grid, c0, null_multiple):
    """Closing rule for the evolute-type conditions.

    The algebraic condition ``alpha + lambda m + eta n = 0`` is solved as the
    minimum-norm solution plus ``c(t)`` times the unit null direction
    ``(n, -m)/r``.  Substituting into the differential condition gives
    ``c' P + c Q + R = 0``.  Where ``P`` vanishes identically the condition
    is algebraic in ``c``; where ``P`` never vanishes it is a linear ODE
    integrated from ``c(t0) = c0``.
    """
    tol = config.get().tol_cond
    l, m, n, alpha = source.curvature_funcs()
    t = grid.nodes
    r2v = m(t) ** 2 + n(t) ** 2
    bad = r2v <= tol
    if np.any(bad):
        raise ConditionInfeasible(N1N2_N2, "m^2 + n^2 vanishes, the algebraic condition cannot be solved",
                                  _first(bad, t))
    r2 = m * m + n * n
    r = fsqrt(r2)
    lam0 = -alpha * m / r2
    eta0 = -alpha * n / r2
    p = n / r
    q = -m / r
    s, c = fsin(theta), fcos(theta)
    P = p * s + q * c
    Q = (p.derivative() - q * l) * s + (p * l + q.derivative()) * c
    R = (lam0.derivative() - eta0 * l) * s + (lam0 * l + eta0.derivative()) * c
    if null_multiple is not None:
        cf = as_func(null_multiple)
        rule = "given-multiple"
    else:
        pv = np.abs(P(t))
        if np.all(pv <= tol):
            qv = Q(t)
            badq = np.abs(qv) <= tol
            if np.any(badq):
                raise ConditionInfeasible(N1N2_N2, "null-direction coefficient is undetermined",
                                          _first(badq, t))
            cf = -R / Q
            rule = "algebraic"
        elif np.all(pv > tol):
            field_ = LinearField(1, lambda tt: (-Q(tt) / P(tt))[:, None, None],
                                 lambda tt: (-R(tt) / P(tt))[:, None])
            cv = rk4_solve(field_, [float(c0)], grid).states[:, 0]
            cf = GridFunction(t, cv, -(Q(t) * cv + R(t)) / P(t), "null-multiple")
            rule = "ode"
        else:
            raise ConditionInfeasible(N1N2_N2, "P vanishes on part of the grid only", _first(pv <= tol, t))
    return lam0 + cf * p, eta0 + cf * q, rule


def _mun1n2_closure(source, lam, eta, theta, grid):
    tol = config.get().tol_cond
    l, m, n, alpha = source.curvature_funcs()
    t = grid.nodes
    if lam is None and eta is None:
        raise ConditionInfeasible(MUN1_N2, "give lambda or eta")
    if lam is None:
        eta = as_func(eta)
        nv = n(t)
        if np.any(np.abs(nv) <= tol):
            raise ConditionInfeasible(MUN1_N2, "n vanishes, lambda = eta l / n is undefined",
                                      _first(np.abs(nv) <= tol, t))
        lam = eta * l / n
    elif eta is None:
        lam = as_func(lam)
        lv = l(t)
        if np.any(np.abs(lv) <= tol):
            raise ConditionInfeasible(MUN1_N2, "l vanishes, eta = lambda n / l is undefined",
                                      _first(np.abs(lv) <= tol, t))
        eta = lam * n / l
    lam, eta = as_func(lam), as_func(eta)
    if theta is None:
        A = alpha + lam.derivative() + eta * m
        B = eta.derivative() - lam * m
        av, bv = A(t), B(t)
        small = av**2 + bv**2 <= tol
        if np.any(small):
            raise ConditionInfeasible(MUN1_N2, "theta is undetermined (both coefficients vanish)", _first(small, t))
        ref = np.unwrap(np.arctan2(-bv, av))

        def theta_fn(tt):
            raw = np.arctan2(-B(tt), A(tt))
            base = np.interp(tt, t, ref)
            return base + np.angle(np.exp(1j * (raw - base)))

        def theta_dot(tt):
            a, b = A(tt), B(tt)
            return (b * A.deriv(tt) - a * B.deriv(tt)) / (a**2 + b**2)

        theta = Func(theta_fn, theta_dot, "theta")
    return lam, eta, as_func(theta)


def framed_mate(source: FramedCurveSource, kind: str, grid: SampleGrid, *, lam=None, eta=None,
                theta=None, init=None, c0: float = 0.0, null_multiple=None) -> MateResult:
    """Construct a framed mate of ``kind``.

    Inputs per kind
        ``N1N2_N2``: ``theta`` (required); optionally explicit ``lam`` and
        ``eta`` (then only checked), else the null-direction closing rule with
        ``null_multiple`` or ``c0``.
        ``MuN1_Mu``: ``init = (lambda0, eta0)`` (default ``(0, 0)``), ``theta``
        (default 0).
        ``MuN1_N2``: ``eta`` or ``lam`` (the other follows from the algebraic
        condition), ``theta`` optional (solved from the differential condition
        when omitted).
        ``N1N2_Mu``: ``init`` (required), ``theta`` (default 0).
    """
    if kind not in FRAMED_KINDS:
        raise ValueError(f"unknown framed mate kind {kind!r}")
    tol = config.get().tol_cond
    t = grid.nodes
    extras = {}
    if kind == N1N2_N2:
        if theta is None:
            raise ValueError("N1N2_N2 needs theta")
        theta = as_func(theta)
        if lam is not None and eta is not None:
            lam, eta = as_func(lam), as_func(eta)
            extras["rule"] = "explicit"
        else:
            lam, eta, extras["rule"] = _null_closure(source, theta, grid, c0, null_multiple)
    elif kind in (MUN1_MU, N1N2_MU):
        if init is None:
            if kind == N1N2_MU:
                raise ValueError("N1N2_Mu needs init = (lambda0, eta0)")
            init = (0.0, 0.0)
        lam, eta = _integrate_framed_pair(source, kind, init, grid)
        theta = as_func(0.0 if theta is None else theta)
        extras["init"] = tuple(float(v) for v in init)
    else:
        lam, eta, theta = _mun1n2_closure(source, lam, eta, theta, grid)

    # Freeze the coefficients on the grid: node values and derivatives are
    # exact, intermediate times are interpolated.  This keeps later stages
    # (which evaluate the mate at every RK4 stage) from re-walking the
    # expression trees of the closing rules.
    lam, eta, theta = _freeze(lam, t, "lambda"), _freeze(eta, t, "eta"), _freeze(theta, t, "theta")
    lv, ev = lam(t), eta(t)
    check_density(lv, ev, t, kind)
    curv = source.curvature_funcs()
    conds = framed_conditions(kind, curv, lam, eta, theta, t)
    residuals = _max_abs(conds)
    if kind in (N1N2_N2, MUN1_N2):
        for name, v in conds.items():
            bad = np.abs(v) > tol
            if np.any(bad):
                raise ConditionInfeasible(kind, f"{name} condition residual {np.max(np.abs(v)):.3g}",
                                          _first(bad, t))
    # independent check of the coefficients from finite differences of their node values
    fd_conds = framed_conditions(kind, curv, lam, eta, theta, t, _fd(t, lv), _fd(t, ev))
    mate_src = MateFramedCurve(source, kind, lam, eta, theta)
    mate = mate_src.sample(grid)
    predicted = mate_src.curvature(t)
    oracle = _framed_oracle(mate, predicted)
    oracle.update({f"fd_{k}": v for k, v in _max_abs(fd_conds).items()})
    if kind == N1N2_MU:
        extras["invariant_drift"] = float(np.max(np.abs(lv**2 + ev**2 - (lv[0] ** 2 + ev[0] ** 2))))
    coeffs = {"lambda": lv, "eta": ev, "theta": theta(t)}
    return MateResult(kind, t, mate, mate, predicted, residuals, oracle, coeffs, source=mate_src, extras=extras)


# --------------------------------------------------------------------------
# residual checks for arbitrary candidate pairs
# --------------------------------------------------------------------------


def _vectors(obj, t):
    """Frame vectors and positions of a curve or framed curve at ``t``."""
    if isinstance(obj, FramedCurveSource):
        st = obj.evaluate(t)
        return st.gamma, {"nu1": st.nu1, "nu2": st.nu2, "mu": st.mu}, st
    if isinstance(obj, FramedState):
        return obj.gamma, {"nu1": obj.nu1, "nu2": obj.nu2, "mu": obj.mu}, obj
    j = obj.jet(t)
    fd = frenet_apparatus(j)
    return j.d0, {"t": fd.tangent, "n": fd.normal, "b": fd.binormal}, fd


def _signed(vecs, name):
    if name.startswith("-"):
        return -vecs[name[1:]]
    return vecs[name]


def mate_residual(original, candidate, kind, grid: SampleGrid, coefficients=None) -> dict:
    """Diagnose whether ``candidate`` is a ``kind`` mate of ``original``.

    ``kind`` is a tag from :data:`KIND_VECTORS` or an explicit triple such as
    ``("nu2", "nu1", "-mu")``.  Reported (maxima over the grid):

    ``alignment``
        ``|v x w - sigma x_bar|`` (``|v - sigma x_bar|`` for two-vector
        kinds) with ``sigma = +-1`` fixed by the first node; ``sign_flip``
        tells whether a different sign would be needed elsewhere.
    ``position``
        ``|gamma_bar - gamma - lambda v - eta w|`` using ``coefficients`` if
        given, else recovering ``lambda, eta`` by projection.
    ``framed``
        for framed candidates, ``|gamma_bar' . nu_bar_i|`` by finite differences.
    condition residuals
        the defining conditions of the kind with the recovered coefficients.
    """
    t = grid.nodes
    v_name, w_name, x_name = KIND_VECTORS[kind] if isinstance(kind, str) else kind
    g, vecs, data = _vectors(original, t)
    gb, vecs_b, data_b = _vectors(candidate, t)
    v = _signed(vecs, v_name)
    w = None if w_name is None else _signed(vecs, w_name)
    xb = _signed(vecs_b, x_name)
    axis = v if w is None else cross(v, w)
    signs = np.sign(dot(axis, xb))
    sigma = signs[0] if signs[0] != 0 else 1.0
    out = {
        "alignment": float(np.max(norm(axis - sigma * xb))),
        "sign": float(sigma),
        "sign_flip": bool(np.any(signs == -sigma)),
    }
    diff = gb - g
    if coefficients is not None:
        lam = np.asarray(coefficients.get("lambda"), dtype=float)
        eta = np.zeros_like(lam) if w is None else np.asarray(coefficients.get("eta"), dtype=float)
    else:
        lam = dot(diff, v)
        eta = np.zeros(len(t)) if w is None else dot(diff, w)
    recon = lam[:, None] * v + (0 if w is None else eta[:, None] * w)
    out["position"] = float(np.max(norm(diff - recon)))
    out["density"] = float(np.mean(np.abs(lam) + np.abs(eta) > config.get().tol_cond))
    h = check_uniform(t)
    acc = 6 if len(t) >= 9 else 4
    if isinstance(data_b, FramedState):
        g1 = fd_uniform(data_b.gamma, h, 1, acc)
        out["framed"] = float(max(np.max(np.abs(dot(g1, data_b.nu1))), np.max(np.abs(dot(g1, data_b.nu2)))))
    out.update(_kind_conditions(kind, original, data, lam, eta, t, h, acc))
    return out


def _kind_conditions(kind, original, data, lam, eta, t, h, acc) -> dict:
    if not isinstance(kind, str):
        return {}
    ld = fd_uniform(lam, h, 1, acc)
    ed = fd_uniform(eta, h, 1, acc)
    if isinstance(data, FrenetData):
        s, k, tau = data.speed, data.kappa, data.tau
        if kind == NBB:
            ec = evolute_coefficients(original, t)
            return {"lambda_rule": float(np.max(np.abs(lam - ec.lam))),
                    "eta_rule": float(np.max(np.abs(eta - ec.eta)))}
        if kind == TNT:
            return {"condition_lambda": float(np.max(np.abs(s + ld - eta * s * k))),
                    "condition_eta": float(np.max(np.abs(lam * s * k + ed)))}
        if kind == NBT:
            return {"condition_lambda": float(np.max(np.abs(ld - eta * s * tau))),
                    "condition_eta": float(np.max(np.abs(lam * s * tau + ed))),
                    "osculating_min": float(np.min(np.abs(1 - lam * k)))}
        return {}
    c = original.curvature(t) if isinstance(original, FramedCurveSource) else None
    if c is None:
        return {}
    l, m, n, alpha = c.l, c.m, c.n, c.alpha
    if kind == N1N2_N2:
        return {"algebraic": float(np.max(np.abs(alpha + lam * m + eta * n)))}
    if kind == MUN1_MU:
        return {"eta_equation": float(np.max(np.abs(-lam * m + ed))),
                "lambda_equation": float(np.max(np.abs(alpha + ld + eta * m)))}
    if kind == MUN1_N2:
        return {"algebraic": float(np.max(np.abs(-lam * n + eta * l)))}
    if kind == N1N2_MU:
        return {"lambda_equation": float(np.max(np.abs(ld - eta * l))),
                "eta_equation": float(np.max(np.abs(lam * l + ed)))}
    if kind in ("N1_N1", "N1_N2"):
        return {"lambda_constant": float(np.max(np.abs(ld)))}
    if kind == "N1_Mu":
        return {"l_zero": float(np.max(np.abs(l))), "algebraic": float(np.max(np.abs(alpha + lam * m)))}
    if kind == "N2_Mu":
        return {"l_zero": float(np.max(np.abs(l))), "algebraic": float(np.max(np.abs(alpha + lam * n)))}
    if kind in ("Mu_N1", "Mu_N2"):
        return {"lambda_equation": float(np.max(np.abs(alpha + ld)))}
    return {}
