import json
import math

import numpy as np
import pytest

from framedcurves.curvekit import SampleGrid, helix, line
from framedcurves.errors import CurveError, DegeneratePoint, UnknownCheck
from framedcurves.framedkit import FramedState, make_framed
from framedcurves.verify import (
    CHECKS, DEFAULT_SEED, ResidualReport, available_checks, framed_ode_residual, frenet_ode_residual, register,
    report_from_array, reports_to_json, resolve, run_check, run_suite, suite_passed,
)


def test_report_verdict_and_serialisation():
    r = report_from_array("x", np.array([0.0, 1.0, 2.0]), np.array([1e-9, 3e-9, 2e-9]), 1e-8, note="n")
    assert r.verdict and r.node_of_max == 1.0 and r.max_residual == 3e-9
    assert not ResidualReport("y", 2.0, 0.0, 1.0).verdict
    d = json.loads(reports_to_json([r]))[0]
    assert d == {"name": "x", "max_residual": 3e-9, "node_of_max": 1.0, "verdict": True, "tolerance": 1e-8,
                 "details": {"note": "n"}}
    assert ResidualReport("z", 0.0, math.nan, 1.0).to_dict()["node_of_max"] is None


def test_frenet_residual_on_helix():
    r = frenet_ode_residual(helix(), SampleGrid(0, 2, 2001), tolerance=1e-5)
    assert r.verdict and r.max_residual < 1e-9


def test_frenet_residual_propagates_degeneracy():
    with pytest.raises(DegeneratePoint):
        frenet_ode_residual(line(), SampleGrid(0, 1, 101))


def test_framed_residual_detects_corrupted_frame():
    src = make_framed("framed-astroid")
    g = SampleGrid(0, 2, 1001)
    good = src.sample(g)
    k = src.curvature(g.nodes)
    assert framed_ode_residual(good, g, curvature=k).verdict
    # tilt nu2 slightly towards mu: still almost unit, no longer orthogonal
    bad_nu2 = good.nu2 + 1e-3 * np.sin(g.nodes)[:, None] * good.mu
    bad = FramedState(good.t, good.gamma, good.nu1, bad_nu2)
    rep = framed_ode_residual(bad, g, curvature=k)
    assert not rep.verdict and rep.max_residual > 1e-4
    # a rotated copy with the base curvature violates the equations too
    from framedcurves.framedkit import rotate_frame

    rot = rotate_frame(src, 0.1 * g.nodes[0] + 0.3).sample(g)
    assert not framed_ode_residual(rot, g, curvature=k).verdict


def test_framed_residual_needs_curvature_for_states():
    g = SampleGrid(0, 1, 101)
    with pytest.raises(ValueError):
        framed_ode_residual(make_framed("framed-circle").sample(g), g)


def test_registry_is_deterministic():
    names = available_checks()
    assert names == list(CHECKS) and len(names) == len(set(names))
    assert resolve(["all"]) == names
    assert resolve(["rk4-order", "all"])[0] == "rk4-order"
    assert resolve(["rk4-order", "rk4-order"]) == ["rk4-order"]
    for required in ("astroid-involute", "framed-astroid-curvature", "bishop-astroid", "property-rotation"):
        assert required in names


def test_run_suite_edge_cases():
    assert run_suite([]) == []
    with pytest.raises(UnknownCheck):
        run_suite(["no-such-check"])
    with pytest.raises(KeyError):
        run_check("no-such-check")
    assert issubclass(UnknownCheck, CurveError)


def test_duplicate_registration_rejected():
    with pytest.raises(ValueError):
        register("rk4-order")(lambda: None)


def test_selected_checks_pass_and_are_reproducible():
    names = ["astroid-involute", "conserved-nbt", "rk4-order", "property-rotation"]
    first, second = run_suite(names), run_suite(names)
    assert suite_passed(first)
    assert [r.to_dict() for r in first] == [r.to_dict() for r in second]
    prop = first[-1]
    assert prop.details["seed"] == DEFAULT_SEED


def test_full_suite_passes():
    reports = run_suite(["all"])
    failed = [(r.name, r.max_residual, r.tolerance) for r in reports if not r.verdict]
    assert not failed
    assert [r.name for r in reports] == available_checks()
