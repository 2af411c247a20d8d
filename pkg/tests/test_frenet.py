import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from framedcurves.curvekit import SampleGrid, SampledCurve, circle, elliptic_helix, helix, line, make_curve, twisted_cubic
from framedcurves.errors import DegeneratePoint, SingularPoint
from framedcurves.frenet import (
    BERTRAND, DEGENERATE, MANNHEIM, PLANAR_NT, PLANAR_TN, REGULAR, SINGULAR, classical_condition_check,
    frenet_apparatus, frenet_derivatives, frenet_on_grid, nondegeneracy_scan,
)
from framedcurves.mates import curve_oracle


@given(st.floats(0.2, 3.0), st.floats(-3.0, 3.0).filter(lambda b: abs(b) > 1e-3))
def test_helix_curvature_and_torsion(a, b):
    fd = frenet_on_grid(helix(a, b), SampleGrid(0, 6, 13))
    np.testing.assert_allclose(fd.kappa, a / (a * a + b * b), rtol=1e-12)
    np.testing.assert_allclose(fd.tau, b / (a * a + b * b), rtol=1e-12)
    np.testing.assert_allclose(fd.speed, math.hypot(a, b), rtol=1e-14)
    assert fd.frame.is_valid()


def test_twisted_cubic_at_origin():
    # gamma' = (1, 0, 0), gamma'' = (0, 2, 0), gamma''' = (0, 0, 6)
    fd = frenet_apparatus(twisted_cubic().jet(np.array([0.0])))
    assert fd.kappa[0] == pytest.approx(2.0)
    assert fd.tau[0] == pytest.approx(3.0)


def test_circle_has_zero_torsion():
    fd = frenet_on_grid(circle(2.0), SampleGrid(0, 6, 61))
    np.testing.assert_allclose(fd.kappa, 0.5)
    np.testing.assert_allclose(fd.tau, 0.0, atol=1e-15)


def test_sampled_circle_torsion_near_zero():
    t = np.linspace(0, 2 * math.pi, 1001)
    c = SampledCurve(t, circle().positions(t))
    fd = frenet_on_grid(c, SampleGrid(0, 2 * math.pi, 1001))
    assert np.max(np.abs(fd.tau)) < 1e-8
    np.testing.assert_allclose(fd.kappa, 1.0, atol=1e-8)


def test_frenet_matches_finite_difference_oracle():
    curve = elliptic_helix()
    t = np.linspace(0, 2, 1001)
    exact = frenet_apparatus(curve.jet(t))
    oracle = curve_oracle(t, curve.positions(t))
    np.testing.assert_allclose(oracle.kappa, exact.kappa, atol=1e-8)
    np.testing.assert_allclose(oracle.tau, exact.tau, atol=1e-6)


def test_frenet_derivatives_against_stencils():
    curve = twisted_cubic()
    t = np.linspace(-1, 1, 801)
    d = frenet_derivatives(curve.jet(t))
    h = t[1] - t[0]
    from framedcurves.stencils import fd_uniform

    np.testing.assert_allclose(d.kappa_dot, fd_uniform(d.kappa, h, 1, 6), atol=1e-8)
    np.testing.assert_allclose(d.tau_dot, fd_uniform(d.tau, h, 1, 6), atol=1e-8)


def test_degenerate_and_singular_points_raise():
    with pytest.raises(DegeneratePoint) as exc:
        frenet_on_grid(line(), SampleGrid(0, 1, 11))
    assert "degenerate" in str(exc.value)
    with pytest.raises(SingularPoint) as exc:
        frenet_on_grid(make_curve("cusp"), SampleGrid(-1, 1, 21))
    assert exc.value.t == pytest.approx(0.0)


def test_nondegeneracy_scan():
    rep = nondegeneracy_scan(make_curve("cusp"), SampleGrid(-1, 1, 21))
    assert not rep.all_regular
    np.testing.assert_allclose(rep.nodes_with(SINGULAR), [0.0], atol=1e-15)
    assert rep.intervals[0][0] == SINGULAR
    assert nondegeneracy_scan(helix(), SampleGrid(0, 1, 11)).all_regular
    assert set(nondegeneracy_scan(line(), SampleGrid(0, 1, 11)).status) == {DEGENERATE}
    assert REGULAR in set(nondegeneracy_scan(twisted_cubic(), SampleGrid(-1, 1, 5)).status)


def test_classical_conditions():
    g = SampleGrid(0, 2, 401)
    bert = classical_condition_check(helix(), g, BERTRAND)
    assert bert.verdict
    k = t = 0.5
    assert bert.constants["A"] * k + bert.constants["B"] * t == pytest.approx(1.0)
    # a helix satisfies A (kappa^2 + tau^2) = kappa but not the torsion side condition
    man = classical_condition_check(helix(), g, MANNHEIM)
    assert man.constants["A"] == pytest.approx(1.0) and not man.verdict
    assert classical_condition_check(circle(), SampleGrid(0, 6, 401), PLANAR_TN).verdict
    # constant curvature: kappa' = 0 violates the planar N-T side condition
    assert not classical_condition_check(circle(), SampleGrid(0, 6, 401), PLANAR_NT).verdict
    assert not classical_condition_check(helix(), g, PLANAR_TN).verdict
    with pytest.raises(ValueError):
        classical_condition_check(helix(), g, "Frenet")
