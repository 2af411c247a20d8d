"""Residual checks and the named verification suite.

Every check returns a :class:`ResidualReport`: the largest residual, the
parameter where it occurs, the tolerance and the verdict.  :func:`run_suite`
runs registered checks by name in a deterministic order; ``"all"`` expands
to every registered check.  The checks use fixed grids and fixed-step
integration, so reports are reproducible bit for bit; the property check
draws its random cases from a seeded generator and records the seed.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .curvekit import CurveSource, SampleGrid, circle, elliptic_helix, helix, twisted_cubic
from .errors import UnknownCheck
from .evolute_involute import (
    EV_THEN_INV, INV_THEN_EV, framed_evolute, framed_involute, framed_roundtrips, roundtrip_ev_of_inv,
    roundtrip_inv_of_ev, t0_involute,
)
from .framedkit import (
    FramedCurvature, FramedState, bishop_frame, framed_curvature, make_framed,
    reconstruct, rotate_frame,
)
from .frenet import frenet_apparatus
from .funcs import Const, Func, fsin
from .geom3 import dot, norm
from .mates import (
    MUN1_MU, MUN1_N2, N1N2_MU, N1N2_N2, framed_mate, nbb_mate, nbt_mate, tnt_mate,
)
from .odeint import LinearField, convergence_order
from .stencils import check_uniform, fd_uniform

DEFAULT_TOLERANCE = 1e-6
DEFAULT_SEED = 20240611


@dataclass
class ResidualReport:
    """Outcome of one residual check; ``verdict`` is
    ``max_residual <= tolerance``."""

    name: str
    max_residual: float
    node_of_max: float
    tolerance: float
    verdict: bool = field(init=False)
    details: dict = field(default_factory=dict)

    def __post_init__(self):
        self.max_residual = float(self.max_residual)
        self.verdict = bool(self.max_residual <= self.tolerance)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "max_residual": self.max_residual,
            "node_of_max": None if not math.isfinite(self.node_of_max) else float(self.node_of_max),
            "verdict": self.verdict,
            "tolerance": float(self.tolerance),
            "details": _plain(self.details),
        }


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.floating, np.integer, np.bool_)):
        return obj.item()
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    return obj


def reports_to_json(reports, **kwargs) -> str:
    """JSON array of the reports."""
    return json.dumps([r.to_dict() for r in reports], **kwargs)


def report_from_array(name: str, t, residual, tolerance: float, **details) -> ResidualReport:
    """Report the maximum of a per-node residual array."""
    residual = np.asarray(residual, dtype=float)
    i = int(np.argmax(residual))
    return ResidualReport(name, float(residual[i]), float(np.asarray(t)[i]), tolerance, details=details)


def _accuracy(n: int) -> int:
    return 4 if n >= 9 else 2


# --------------------------------------------------------------------------
# frame ODE residuals
# --------------------------------------------------------------------------


def frenet_ode_residual(curve: CurveSource, grid: SampleGrid, tolerance: float = DEFAULT_TOLERANCE,
                        name: str | None = None) -> ResidualReport:
    """Finite-difference derivatives of ``(t, n, b)`` against
    ``t' = s kappa n``, ``n' = -s kappa t + s tau b``, ``b' = -s tau n``.

    Raises :class:`DegeneratePoint` / :class:`SingularPoint` when the Frenet
    frame does not exist on the grid.
    """
    t = grid.nodes
    fd = frenet_apparatus(curve.jet(t))
    h = check_uniform(t)
    acc = _accuracy(len(t))
    sk = (fd.speed * fd.kappa)[:, None]
    st = (fd.speed * fd.tau)[:, None]
    res = np.max(np.stack([
        norm(fd_uniform(fd.tangent, h, 1, acc) - sk * fd.normal),
        norm(fd_uniform(fd.normal, h, 1, acc) + sk * fd.tangent - st * fd.binormal),
        norm(fd_uniform(fd.binormal, h, 1, acc) + st * fd.normal),
    ]), axis=0)
    return report_from_array(name or f"frenet-ode({curve.name})", t, res, tolerance, h=h)


def framed_ode_residual(source, grid: SampleGrid, tolerance: float = DEFAULT_TOLERANCE,
                        curvature: FramedCurvature | None = None, name: str | None = None) -> ResidualReport:
    """Finite-difference derivatives of ``(nu1, nu2, mu, gamma)`` against the
    Frenet-type formulas ``nu1' = l nu2 + m mu``, ``nu2' = -l nu1 + n mu``,
    ``mu' = -m nu1 - n nu2``, ``gamma' = alpha mu``.

    ``source`` is a framed curve or a :class:`FramedState` on ``grid``; the
    curvature defaults to the source's own.  The frame's orthonormality
    defect is included in the residual, so a corrupted normal field fails
    even when its own curvature is used.
    """
    t = grid.nodes
    states = source if isinstance(source, FramedState) else source.sample(grid)
    if curvature is None:
        if isinstance(source, FramedState):
            raise ValueError("a FramedState needs an explicit curvature")
        curvature = source.curvature(t)
    h = check_uniform(t)
    acc = _accuracy(len(t))
    l, m, n, a = (np.asarray(v)[:, None] for v in (curvature.l, curvature.m, curvature.n, curvature.alpha))
    n1, n2, mu, g = states.nu1, states.nu2, states.mu, states.gamma
    defect = np.max(np.stack([np.abs(norm(n1) - 1), np.abs(norm(n2) - 1), np.abs(dot(n1, n2))]), axis=0)
    res = np.max(np.stack([
        norm(fd_uniform(n1, h, 1, acc) - l * n2 - m * mu),
        norm(fd_uniform(n2, h, 1, acc) + l * n1 - n * mu),
        norm(fd_uniform(mu, h, 1, acc) + m * n1 + n * n2),
        norm(fd_uniform(g, h, 1, acc) - a * mu),
        defect,
    ]), axis=0)
    label = name or f"framed-ode({getattr(source, 'name', 'states')})"
    return report_from_array(label, t, res, tolerance, h=h)


# --------------------------------------------------------------------------
# registry
# --------------------------------------------------------------------------

CHECKS: dict[str, Callable[[], ResidualReport]] = {}


def register(name: str):
    def deco(fn):
        if name in CHECKS:
            raise ValueError(f"duplicate check {name!r}")
        CHECKS[name] = fn
        return fn

    return deco


def available_checks() -> list[str]:
    return list(CHECKS)


def run_check(name: str) -> ResidualReport:
    try:
        fn = CHECKS[name]
    except KeyError:
        raise UnknownCheck(f"unknown check {name!r}; known: {', '.join(CHECKS)}") from None
    report = fn()
    report.name = name
    return report


def resolve(names) -> list[str]:
    """Expand ``"all"`` and validate the names (order preserved, no duplicates)."""
    out: list[str] = []
    for nm in names:
        group = list(CHECKS) if nm == "all" else [nm]
        for g in group:
            if g not in CHECKS:
                raise UnknownCheck(f"unknown check {g!r}; known: {', '.join(CHECKS)}")
            if g not in out:
                out.append(g)
    return out


def run_suite(names) -> list[ResidualReport]:
    """Run the named checks in order; ``[]`` gives ``[]``."""
    return [run_check(nm) for nm in resolve(names)]


def suite_passed(reports) -> bool:
    return all(r.verdict for r in reports)


ASTROID_GRID = SampleGrid.periodic(0.0, 2 * math.pi, 2001)


def _astroid_t():
    return ASTROID_GRID.nodes


def _astroid_positions(t, scale=1.0):
    return scale * np.stack([np.cos(t) ** 3, np.sin(t) ** 3, np.cos(2 * t)], axis=1)


@register("frenet-helix")
def _check_frenet_helix():
    return frenet_ode_residual(helix(), SampleGrid(0.0, 2.0, 2001), tolerance=1e-5)


@register("frenet-circle")
def _check_frenet_circle():
    return frenet_ode_residual(circle(), SampleGrid(0.0, 2 * math.pi, 2001), tolerance=1e-6)


@register("framed-astroid-curvature")
def _check_astroid_curvature():
    t = _astroid_t()
    k = framed_curvature(make_framed("framed-astroid"), t)
    expected = np.stack([np.full_like(t, -0.6), np.full_like(t, 0.8), np.zeros_like(t),
                         35 * np.cos(t) * np.sin(t)], axis=1)
    res = np.max(np.abs(k.as_array() - expected), axis=1)
    return report_from_array("framed-astroid-curvature", t, res, 1e-10)


@register("framed-ode-astroid")
def _check_framed_ode_astroid():
    return framed_ode_residual(make_framed("framed-astroid"), ASTROID_GRID)


@register("astroid-involute")
def _check_astroid_involute():
    t = _astroid_t()
    res, data = framed_involute(make_framed("framed-astroid"), ASTROID_GRID, init=(125 / 12, 0.0))
    r = np.max(np.stack([
        np.abs(data.lambdaI - 125 * np.cos(2 * t) / 12),
        np.abs(data.etaI - 25 * np.cos(t) * np.sin(t) / 3),
        norm(res.mate.gamma - _astroid_positions(t)),
    ]), axis=0)
    return report_from_array("astroid-involute", t, r, 1e-8)


@register("astroid-evolute")
def _check_astroid_evolute():
    t = _astroid_t()
    res, data = framed_evolute(make_framed("framed-astroid"), math.pi / 2, ASTROID_GRID)
    r = np.max(np.stack([
        norm(res.mate.gamma - _astroid_positions(t, 637 / 12)),
        np.abs(data.lambdaE + 175 / 4 * np.cos(t) * np.sin(t)),
        np.abs(data.etaE - 875 / 12 * np.cos(2 * t)),
    ]), axis=0)
    printed = float(np.max(np.abs(data.etaE - 875 / 12 * np.cos(t) * np.sin(t))))
    return report_from_array("astroid-evolute", t, r, 1e-8, printed_eta_discrepancy=printed)


def _roundtrip_report(rep, tolerance):
    worst = max(rep.max_position_error, rep.max_frame_error)
    node = float(rep.t[int(np.argmax(rep.position_error))]) if rep.t is not None else math.nan
    return ResidualReport(rep.name, worst, node, tolerance, details={"case": rep.case_tag, **rep.details})


@register("framed-roundtrip-inv-then-ev")
def _check_framed_rt_ie():
    return _roundtrip_report(framed_roundtrips(make_framed("framed-astroid"), ASTROID_GRID, INV_THEN_EV,
                                               init=(125 / 12, 0.0)), 1e-6)


@register("framed-roundtrip-ev-then-inv")
def _check_framed_rt_ei():
    return _roundtrip_report(framed_roundtrips(make_framed("framed-astroid"), ASTROID_GRID, EV_THEN_INV), 1e-6)


@register("roundtrip-ev-of-inv-helix")
def _check_rt_ev_inv():
    return _roundtrip_report(roundtrip_ev_of_inv(helix(), (0.5, 3.0), SampleGrid(0.0, 2.0, 2001)), 1e-5)


@register("roundtrip-inv-of-ev-helix")
def _check_rt_inv_ev():
    return _roundtrip_report(roundtrip_inv_of_ev(helix(), SampleGrid(0.0, 2.0, 2001)), 1e-5)


def _t_func() -> Func:
    return Func(lambda t: t, lambda t: np.ones_like(t), "t")


def mate_oracle_cases() -> dict[str, Callable]:
    """One construction per mate kind on catalog curves (used by the
    mate-curvature cross-check)."""
    g_helix = SampleGrid(0.0, 2.0, 2001)
    return {
        "nbb": lambda: nbb_mate(helix(), g_helix),
        "nbb-twisted-cubic": lambda: nbb_mate(twisted_cubic(), SampleGrid(-1.0, 1.0, 2001)),
        "tnt": lambda: tnt_mate(helix(), (0.5, 3.0), g_helix),
        "tnt-elliptic-helix": lambda: tnt_mate(elliptic_helix(), (0.5, 3.0), g_helix),
        "nbt": lambda: nbt_mate(elliptic_helix(), (0.3, 0.2), g_helix),
        "nbt-twisted-cubic": lambda: nbt_mate(twisted_cubic(), (0.3, 0.2), SampleGrid(-1.0, 1.0, 2001)),
        N1N2_N2: lambda: framed_mate(make_framed("framed-astroid"), N1N2_N2, ASTROID_GRID, theta=math.pi / 2),
        MUN1_MU: lambda: framed_mate(make_framed("framed-astroid"), MUN1_MU, ASTROID_GRID, init=(125 / 12, 0.0)),
        MUN1_N2: lambda: framed_mate(make_framed("framed-frenet-helix"), MUN1_N2, g_helix,
                                     lam=Const(1.0) + 0.3 * fsin(_t_func())),
        N1N2_MU: lambda: framed_mate(make_framed("framed-astroid"), N1N2_MU, ASTROID_GRID, init=(1.0, 0.5)),
    }


def _curvature_keys(oracle: dict) -> dict:
    """The curvature (and frame) entries of a mate oracle, without the
    coefficient-condition diagnostics."""
    return {k: v for k, v in oracle.items() if not k.startswith("fd_")}


def _mate_check(case):
    def run():
        res = mate_oracle_cases()[case]()
        keys = _curvature_keys(res.oracle)
        worst = max(keys, key=keys.get)
        return ResidualReport(f"mate-oracle-{case}", keys[worst], math.nan, DEFAULT_TOLERANCE,
                              details={"oracle": res.oracle, "worst": worst, "residuals": res.residuals})

    return run


for _case in ("nbb", "nbb-twisted-cubic", "tnt", "tnt-elliptic-helix", "nbt", "nbt-twisted-cubic",
              N1N2_N2, MUN1_MU, MUN1_N2, N1N2_MU):
    register(f"mate-oracle-{_case}")(_mate_check(_case))


@register("conserved-nbt")
def _check_conserved_nbt():
    res = nbt_mate(helix(), (0.3, 0.2), SampleGrid(0.0, 1.0, 1001))
    lam, eta = res.coefficients["lambda"], res.coefficients["eta"]
    return report_from_array("conserved-nbt", res.t, np.abs(lam**2 + eta**2 - (lam[0] ** 2 + eta[0] ** 2)), 1e-10)


@register("conserved-n1n2mu")
def _check_conserved_n1n2mu():
    res = framed_mate(make_framed("framed-astroid"), N1N2_MU, SampleGrid(0.0, 1.0, 1001), init=(1.0, 0.5))
    lam, eta = res.coefficients["lambda"], res.coefficients["eta"]
    return report_from_array("conserved-n1n2mu", res.t, np.abs(lam**2 + eta**2 - (lam[0] ** 2 + eta[0] ** 2)), 1e-10)


@register("bishop-astroid")
def _check_bishop():
    t = _astroid_t()
    rot = bishop_frame(make_framed("framed-astroid"), 0.0, ASTROID_GRID)
    k = rot.curvature(t)
    fd = framed_curvature_of_states(rot.sample(ASTROID_GRID))
    return report_from_array("bishop-astroid", t, np.maximum(np.abs(k.l), np.abs(fd.l)), 1e-8)


def framed_curvature_of_states(states: FramedState) -> FramedCurvature:
    from .framedkit import framed_curvature_fd

    return framed_curvature_fd(states, accuracy=_accuracy(len(states)))


@register("t0-involute-circle")
def _check_t0_involute():
    grid = SampleGrid(0.0, 2 * math.pi, 2001)
    inv, states, frame = t0_involute(make_framed("framed-circle"), 0.0, grid)
    h = check_uniform(grid.nodes)
    xi_dot = fd_uniform(frame.xi, h, 1, 4)
    return report_from_array("t0-involute-circle", grid.nodes,
                             np.maximum(np.abs(dot(xi_dot, frame.eta_vec)), np.abs(dot(xi_dot, states.mu))), 1e-6)


@register("reconstruct-drift")
def _check_reconstruct():
    src = make_framed("framed-astroid")
    grid = ASTROID_GRID
    k = src.curvature_funcs()
    init = src.evaluate(grid.nodes[:1])[0]
    out = reconstruct(k, init, grid, project=False)
    ref = src.sample(grid)
    defect = np.max(np.stack([np.abs(norm(out.nu1) - 1), np.abs(norm(out.nu2) - 1),
                              np.abs(dot(out.nu1, out.nu2))]), axis=0)
    per_length = defect / grid.length
    return report_from_array("reconstruct-drift", grid.nodes, per_length, 1e-9,
                             position_error=float(np.max(norm(out.gamma - ref.gamma))))


@register("rk4-order")
def _check_rk4_order():
    field_ = LinearField(1, lambda tt: np.ones((len(tt), 1, 1)))
    order = convergence_order(field_, [1.0], SampleGrid(0.0, 1.0, 11))
    return ResidualReport("rk4-order", abs(order - 4.0), math.nan, 0.2, details={"order": order})


@register("property-rotation")
def _check_property_rotation(seed: int = DEFAULT_SEED, cases: int = 5):
    """Rotating the frame by random ``theta`` keeps the Frenet-type system
    satisfied with the rotated curvature (seeded random cases)."""
    rng = np.random.default_rng(seed)
    src = make_framed("framed-astroid")
    grid = SampleGrid(0.0, 2.0, 2001)
    worst = None
    for _ in range(cases):
        a, b, c = rng.uniform(-2, 2), rng.uniform(-1, 1), rng.uniform(0.5, 3)
        theta = Const(a) + b * fsin(c * _t_func())
        rep = framed_ode_residual(rotate_frame(src, theta), grid)
        if worst is None or rep.max_residual > worst.max_residual:
            worst = rep
    worst.details.update({"seed": seed, "cases": cases})
    return worst


__all__ = [
    "CHECKS", "DEFAULT_SEED", "DEFAULT_TOLERANCE", "ResidualReport", "available_checks",
    "framed_ode_residual", "frenet_ode_residual", "mate_oracle_cases", "register", "report_from_array",
    "reports_to_json", "resolve", "run_check", "run_suite", "suite_passed",
]
