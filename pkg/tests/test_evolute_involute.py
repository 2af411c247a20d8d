import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from framedcurves.curvekit import SampleGrid, elliptic_helix, helix, twisted_cubic
from framedcurves.errors import FrameDegenerate, MbarVanishes, NotBishop, SignChange
from framedcurves.evolute_involute import (
    EV_THEN_INV, INV_OF_EV_CASES, INV_THEN_EV, RoundTripReport, best_frame_match, bishop_evolute_parameters,
    circular_evolute, evolute, framed_evolute, framed_involute, framed_roundtrips, inverse_parameters,
    inverse_selection, involute, printed_parameters, roundtrip_ev_of_inv, roundtrip_inv_of_ev, t0_involute,
)
from framedcurves.framedkit import bishop_frame, framed_curvature_fd, make_framed, singular_points
from framedcurves.funcs import Const
from framedcurves.geom3 import dot, norm
from framedcurves.mates import MUN1_N2, N1N2_MU, mate_residual, nbb_mate, tnt_mate
from framedcurves.stencils import fd_uniform

ASTROID_GRID = SampleGrid.periodic(0.0, 2 * math.pi, 2001)
HELIX_GRID = SampleGrid(0.0, 2.0, 2001)


def astroid(t, scale=1.0):
    return scale * np.column_stack([np.cos(t) ** 3, np.sin(t) ** 3, np.cos(2 * t)])


# -- non-degenerate curves ---------------------------------------------------


def test_evolute_equals_nbb_mate():
    pts, data = evolute(twisted_cubic(), SampleGrid(-1, 1, 401))
    res = nbb_mate(twisted_cubic(), SampleGrid(-1, 1, 401))
    np.testing.assert_array_equal(pts, res.mate)
    assert data.degenerate_at is None
    np.testing.assert_array_equal(data.h, res.coefficients["h"])


def test_evolute_reports_degenerate_h():
    pts, data = evolute(elliptic_helix(2, 1, 1), SampleGrid(0, 2, 401))
    assert data.degenerate_at is not None and 0 < data.degenerate_at < 2
    assert np.all(np.isfinite(pts))


def test_involute_equals_tnt_mate():
    pts, data = involute(helix(), (0.5, 3.0), HELIX_GRID)
    np.testing.assert_array_equal(pts, tnt_mate(helix(), (0.5, 3.0), HELIX_GRID).mate)
    assert data.init == (0.5, 3.0)


def test_roundtrip_ev_of_inv_on_helix():
    rep = roundtrip_ev_of_inv(helix(), (0.5, 3.0), HELIX_GRID)
    assert rep.max_position_error <= 1e-5
    assert rep.max_frame_error <= 1e-5
    # the evolute-of-involute coefficient h equals sign(tau) |gamma'|
    assert rep.details["h_identity_error"] <= 1e-5


def test_roundtrip_ev_of_inv_on_twisted_cubic():
    rep = roundtrip_ev_of_inv(twisted_cubic(), (0.0, 1.0), SampleGrid(-1, 1, 2001))
    assert rep.max_position_error <= 1e-5


@pytest.mark.parametrize("b,case", [(1.0, "i"), (-1.0, "iv")])
def test_roundtrip_inv_of_ev_sign_cases(b, case):
    rep = roundtrip_inv_of_ev(helix(1.0, b), HELIX_GRID)
    assert rep.case_tag.startswith(f"case {case}")
    assert rep.max_position_error <= 1e-5


def test_roundtrip_inv_of_ev_requires_constant_h():
    with pytest.raises(SignChange):
        roundtrip_inv_of_ev(elliptic_helix(2, 1, 1), SampleGrid(0, 2, 401))


def test_roundtrip_inv_of_ev_manual_init_gives_nbt_mate():
    rep = roundtrip_inv_of_ev(helix(), HELIX_GRID, init=(0.3, 1.0))
    assert "manual init" in rep.case_tag
    assert rep.max_position_error > 1e-3
    assert rep.details["mate"]["alignment"] < 1e-6


def test_inverse_selection_table():
    # the four sign cases and the compact rule agree
    expected = {
        (1, 1): lambda le, ee: (-ee, le),
        (1, -1): lambda le, ee: (ee, -le),
        (-1, 1): lambda le, ee: (-ee, -le),
        (-1, -1): lambda le, ee: (ee, le),
    }
    assert set(INV_OF_EV_CASES) == set(expected)
    for (st_, sh), rule in expected.items():
        got = inverse_selection(2.0, 3.0, st_, sh)
        assert tuple(map(float, got)) == rule(2.0, 3.0)


@given(st.floats(-5, 5), st.floats(-5, 5), st.sampled_from([-1.0, 1.0]), st.sampled_from([-1.0, 1.0]))
def test_inverse_selection_preserves_norm(le, ee, st_, sh):
    li, ei = inverse_selection(le, ee, st_, sh)
    assert math.isclose(float(li) ** 2 + float(ei) ** 2, le * le + ee * ee, rel_tol=1e-12, abs_tol=1e-300)


def test_roundtrip_report_serialises():
    rep = RoundTripReport("x", 1e-9, 2e-9, "case i", {"a": np.float64(1.5), "b": np.array([1, 2])})
    d = json.loads(rep.to_json())
    assert d["details"] == {"a": 1.5, "b": [1, 2]}
    with pytest.raises(ValueError):
        RoundTripReport("x", -1.0, 0.0, "")


# -- framed astroid ----------------------------------------------------------


def test_astroid_framed_involute():
    t = ASTROID_GRID.nodes
    res, data = framed_involute(make_framed("framed-astroid"), ASTROID_GRID, init=(125 / 12, 0.0))
    np.testing.assert_allclose(data.lambdaI, 125 * np.cos(2 * t) / 12, atol=1e-8)
    np.testing.assert_allclose(data.etaI, 25 * np.cos(t) * np.sin(t) / 3, atol=1e-8)
    np.testing.assert_allclose(res.mate.gamma, astroid(t), atol=1e-8)


def test_astroid_framed_evolute_oracle():
    t = ASTROID_GRID.nodes
    src = make_framed("framed-astroid")
    res, data = framed_evolute(src, math.pi / 2, ASTROID_GRID)
    np.testing.assert_allclose(res.mate.gamma, astroid(t, 637 / 12), atol=1e-8)
    np.testing.assert_allclose(data.lambdaE, -175 / 4 * np.cos(t) * np.sin(t), atol=1e-10)
    # brute force: project the closed-form evolute offset on nu2
    st_ = src.sample(ASTROID_GRID)
    eta_oracle = dot(astroid(t, 637 / 12) - st_.gamma, st_.nu2)
    np.testing.assert_allclose(eta_oracle, 875 / 12 * np.cos(2 * t), atol=1e-12)
    np.testing.assert_allclose(data.etaE, eta_oracle, atol=1e-10)
    # a cos t sin t profile (the other candidate shape) is far off
    assert np.max(np.abs(data.etaE - 875 / 12 * np.cos(t) * np.sin(t))) > 10


def test_framed_involute_singular_points():
    t0 = 0.1
    init = (125 * math.cos(2 * t0) / 12, 25 * math.cos(t0) * math.sin(t0) / 3)
    res, data = framed_involute(make_framed("framed-astroid"), SampleGrid(t0, 6.2, 3000), init=init)
    k = make_framed("framed-astroid").curvature(res.t)
    # the involute velocity is (-lambda n + eta l) nu2
    speed_factor = -data.lambdaI * k.n + data.etaI * k.l
    roots = singular_points(res.source, SampleGrid(0.1, 6.2, 3000))
    flips = res.t[:-1][np.sign(speed_factor[:-1]) != np.sign(speed_factor[1:])]
    assert len(roots) == len(flips) == 3
    np.testing.assert_allclose(roots, flips, atol=3e-3)
    np.testing.assert_allclose(roots, [math.pi / 2, math.pi, 3 * math.pi / 2], atol=1e-5)


def test_two_framed_involutes_are_n1n2mu_mates():
    src = make_framed("framed-astroid")
    g = SampleGrid(0, 2, 801)
    a, _ = framed_involute(src, g, init=(1.0, 2.0))
    b, _ = framed_involute(src, g, init=(-0.5, 0.7))
    r = mate_residual(a.source, b.mate, N1N2_MU, g)
    assert r["alignment"] < 1e-12 and r["position"] < 1e-12
    assert r["lambda_equation"] < 1e-8 and r["eta_equation"] < 1e-8


def test_two_framed_evolutes_are_mun1n2_mates():
    src = make_framed("framed-astroid")
    g = SampleGrid(0, 2, 801)
    a, _ = framed_evolute(src, math.pi / 2, g)
    b, _ = framed_evolute(src, 1.0, g, c0=2.0)
    r = mate_residual(a.source, b.mate, MUN1_N2, g)
    assert r["alignment"] < 1e-12 and r["position"] < 1e-12
    assert r["algebraic"] < 1e-8


@pytest.mark.parametrize("direction", [INV_THEN_EV, EV_THEN_INV])
def test_framed_roundtrips(direction):
    init = (125 / 12, 0.0) if direction == INV_THEN_EV else (0.0, 0.0)
    rep = framed_roundtrips(make_framed("framed-astroid"), ASTROID_GRID, direction, init=init)
    assert rep.max_position_error <= 1e-6
    assert rep.max_frame_error <= 1e-6


@given(st.floats(-5, 5), st.floats(-5, 5), st.floats(-3, 3))
def test_framed_roundtrip_from_any_start(lam0, eta0, theta):
    rep = framed_roundtrips(make_framed("framed-frenet-helix"), SampleGrid(0, 1, 201), INV_THEN_EV,
                            init=(lam0, eta0), theta=theta)
    assert rep.max_position_error <= 1e-8


def test_printed_selection_displaces_by_twice_the_offset():
    rep = framed_roundtrips(make_framed("framed-astroid"), ASTROID_GRID, INV_THEN_EV, init=(125 / 12, 0.0))
    assert rep.details["printed_selection_position_error"] == pytest.approx(2 * 125 / 12, rel=1e-9)


def test_inverse_parameters_negate_printed():
    lam, eta, th = Const(1.0), Const(2.0), Const(0.5)
    a = [f(np.array([0.0]))[0] for f in inverse_parameters(lam, eta, th)]
    b = [f(np.array([0.0]))[0] for f in printed_parameters(lam, eta, th)]
    assert a[0] == pytest.approx(-b[0]) and a[1] == pytest.approx(-b[1])
    assert a[2] == pytest.approx(-0.5)


def test_roundtrip_with_other_parameters_is_a_mate():
    src = make_framed("framed-astroid")
    rep = framed_roundtrips(src, ASTROID_GRID, INV_THEN_EV, init=(125 / 12, 0.0), second={"theta": 1.0, "c0": 2.0})
    assert rep.max_position_error > 1e-3
    assert rep.details["mate"]["alignment"] < 1e-8
    rep = framed_roundtrips(src, ASTROID_GRID, EV_THEN_INV, second={"init": (1.0, 0.5)})
    assert rep.details["mate"]["alignment"] < 1e-8


def test_roundtrip_rejects_unknown_direction():
    with pytest.raises(ValueError):
        framed_roundtrips(make_framed("framed-astroid"), ASTROID_GRID, "sideways")


def test_best_frame_match_finds_swap():
    st_ = make_framed("framed-astroid").sample(SampleGrid(0, 1, 11))
    from framedcurves.framedkit import FramedState

    swapped = FramedState(st_.t, st_.gamma, st_.nu2, -st_.nu1)
    name, err = best_frame_match(swapped, st_)
    assert err == 0.0 and name.startswith("swap")


# -- circular evolutes and t0-involutes -------------------------------------


def test_circular_evolute_requires_bishop_frame():
    with pytest.raises(NotBishop):
        circular_evolute(make_framed("framed-astroid"), ASTROID_GRID)


def test_circular_evolute_detects_mbar_sign_change():
    rot = bishop_frame(make_framed("framed-astroid"), 0.0, ASTROID_GRID)
    with pytest.raises(MbarVanishes):
        circular_evolute(rot, ASTROID_GRID)


def test_circular_evolute_of_bishop_circle():
    g = SampleGrid(0, 2, 801)
    src = make_framed("framed-circle")
    rot = bishop_frame(src, 0.3, g)
    ce, states = circular_evolute(rot, g)
    assert framed_curvature_fd(states).max_abs_diff(ce.curvature(g.nodes)) < 1e-6
    # equals the framed evolute with the Bishop parameters
    lam, eta, theta = bishop_evolute_parameters(src, rot.theta)
    res, _ = framed_evolute(src, theta, g, lam=lam, eta=eta)
    assert np.max(norm(res.mate.gamma - states.gamma)) < 1e-10


def test_t0_involute_of_circle_is_classical_involute():
    g = SampleGrid(0, 2 * math.pi, 2001)
    inv, states, frame = t0_involute(make_framed("framed-circle"), 0.0, g)
    t = g.nodes
    np.testing.assert_allclose(states.gamma, np.column_stack([np.cos(t) + t * np.sin(t), np.sin(t) - t * np.cos(t),
                                                             0 * t]), atol=1e-12)
    np.testing.assert_allclose(frame.f, 0.0, atol=1e-15)
    xi_dot = fd_uniform(frame.xi, g.h, 1, 4)
    assert np.max(np.abs(dot(xi_dot, frame.eta_vec))) <= 1e-6


@pytest.mark.parametrize("name,grid", [("framed-astroid", SampleGrid(0, 2, 2001)),
                                       ("framed-frenet-helix", SampleGrid(0, 2, 2001))])
def test_t0_involute_twist_and_curvature(name, grid):
    inv, states, frame = t0_involute(make_framed(name), 0.7, grid)
    xi_dot = fd_uniform(frame.xi, grid.h, 1, 6)
    np.testing.assert_allclose(dot(xi_dot, frame.eta_vec), frame.f, atol=1e-8)
    assert framed_curvature_fd(states, 6).max_abs_diff(inv.curvature(grid.nodes)) < 1e-6
    # the start point lies on the base curve
    i = int(round(0.7 / grid.h))
    np.testing.assert_allclose(states.gamma[i], make_framed(name).sample(grid).gamma[i], atol=1e-12)


def test_t0_involute_errors():
    with pytest.raises(FrameDegenerate):
        t0_involute(make_framed("framed-still"), 0.0, SampleGrid(0, 1, 11))
    with pytest.raises(ValueError):
        t0_involute(make_framed("framed-circle"), 5.0, SampleGrid(0, 1, 11))
