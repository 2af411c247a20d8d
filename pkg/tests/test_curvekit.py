import io
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from framedcurves.curvekit import (
    CURVE_CATALOG, SampleGrid, SampledCurve, TermField, AnalyticCurve, arclength, arclength_nodes, astroid,
    circle, cumulative_integral, helix, line, make_curve, read_curve_csv, trig_poly, twisted_cubic,
    write_curve_csv,
)
from framedcurves.errors import InsufficientSamples, NonUniformGrid, OutOfDomain, SingularPoint
from framedcurves.geom3 import norm


def test_grid_parse_and_nodes():
    g = SampleGrid.parse("0:2:5")
    np.testing.assert_allclose(g.nodes, [0, 0.5, 1, 1.5, 2])
    assert g.h == 0.5 and g.length == 2.0
    assert g.refined().count == 9
    for bad in ("0:1", "1:0:5", "0:1:1", "a:b:c"):
        with pytest.raises(ValueError):
            SampleGrid.parse(bad)


def test_periodic_grid_excludes_endpoint():
    g = SampleGrid.periodic(0.0, 2 * math.pi, 4)
    np.testing.assert_allclose(g.nodes, [0, math.pi / 2, math.pi, 3 * math.pi / 2])


@pytest.mark.parametrize("name", sorted(CURVE_CATALOG))
def test_catalog_jets_are_consistent(name):
    # analytic d(k+1) against an 8th-order stencil of analytic d(k)
    curve = make_curve(name)
    t0, t1, _ = CURVE_CATALOG[name].default_grid
    t = np.linspace(t0, t1, 401)
    j = curve.jet(t)
    h = t[1] - t[0]
    from framedcurves.stencils import fd_uniform

    for lo, hi in ((j.d0, j.d1), (j.d1, j.d2), (j.d2, j.d3), (j.d3, j.d4)):
        np.testing.assert_allclose(fd_uniform(lo, h, 1, 8), hi, atol=1e-7 * (1 + np.max(np.abs(hi))))


def test_catalog_contents_and_parameters():
    assert {"line", "circle", "helix", "twisted-cubic"} <= set(CURVE_CATALOG)
    h = make_curve("helix", a=2.0, b=0.5)
    np.testing.assert_allclose(h.positions(np.array([0.0, math.pi])), [[2, 0, 0], [-2, 0, 0.5 * math.pi]],
                               atol=1e-15)
    with pytest.raises(ValueError):
        make_curve("helix", r=1.0)
    with pytest.raises(KeyError):
        make_curve("spiral")


def test_astroid_positions():
    t = np.linspace(0, 2 * math.pi, 9)
    np.testing.assert_allclose(astroid().positions(t),
                               np.column_stack([np.cos(t) ** 3, np.sin(t) ** 3, np.cos(2 * t)]), atol=1e-15)


def test_term_field_validation():
    with pytest.raises(ValueError):
        TermField([("exp", 1, [1, 0, 0])])
    with pytest.raises(ValueError):
        TermField([("poly", 1.5, [1, 0, 0])])
    assert TermField([])(np.zeros(3)).shape == (3, 3)


@given(st.lists(st.tuples(st.sampled_from(["poly", "cos", "sin"]), st.integers(0, 3),
                          st.lists(st.floats(-2, 2), min_size=3, max_size=3)), min_size=1, max_size=4))
def test_trig_poly_derivatives_match_stencils(terms):
    curve = trig_poly([(k, p, c) for k, p, c in terms])
    t = np.linspace(-1, 1, 201)
    j = curve.jet(t)
    from framedcurves.stencils import fd_uniform

    np.testing.assert_allclose(fd_uniform(j.d0, t[1] - t[0], 1, 8), j.d1, atol=1e-8)


def test_domain_enforced():
    c = AnalyticCurve(TermField([("poly", 1, [1, 0, 0])]), domain=(0.0, 1.0))
    with pytest.raises(OutOfDomain) as exc:
        c.jet(np.array([0.5, 1.5]))
    assert exc.value.t == 1.5


def test_sampled_curve_matches_analytic():
    c = helix()
    t = np.linspace(0, 2, 401)
    s = SampledCurve(t, c.positions(t))
    ts = np.linspace(0.1, 1.9, 77)
    ja, js = c.jet(ts), s.jet(ts)
    np.testing.assert_allclose(js.d0, ja.d0, atol=1e-10)
    np.testing.assert_allclose(js.d1, ja.d1, atol=1e-7)
    np.testing.assert_allclose(js.d2, ja.d2, atol=1e-5)


def test_sampled_curve_validation():
    with pytest.raises(InsufficientSamples):
        SampledCurve(np.linspace(0, 1, 5), np.zeros((5, 3)))
    with pytest.raises(NonUniformGrid):
        t = np.r_[np.linspace(0, 1, 10), 1.5]
        SampledCurve(t, np.zeros((11, 3)))
    with pytest.raises(ValueError):
        SampledCurve(np.linspace(0, 1, 10), np.zeros((10, 2)))


def test_arclength_examples():
    assert arclength(circle(), SampleGrid(0, 2 * math.pi, 2001))[-1] == pytest.approx(2 * math.pi, abs=1e-10)
    assert arclength(line((2.0, 0, 0)), SampleGrid(0, 1, 11))[-1] == pytest.approx(2.0, abs=1e-14)
    assert arclength(helix(), SampleGrid(0, 1, 101))[-1] == pytest.approx(math.sqrt(2), abs=1e-12)


def test_arclength_monotone_and_matches_quadrature():
    from scipy.integrate import quad

    curve = twisted_cubic()
    g = SampleGrid(-1, 1, 401)
    s = arclength(curve, g)
    assert np.all(np.diff(s) > 0)
    speed = lambda x: float(norm(curve.jet(np.array([x])).d1)[0])
    ref, _ = quad(speed, -1, 1, epsabs=1e-13)
    assert s[-1] == pytest.approx(ref, abs=1e-9)


def test_arclength_rejects_singular_points():
    with pytest.raises(SingularPoint):
        arclength(make_curve("cusp"), SampleGrid(-1, 1, 201))


def test_arclength_nodes_equally_spaced():
    curve = twisted_cubic()
    g = SampleGrid(-1, 1, 2001)
    tn = arclength_nodes(curve, g, 21)
    s_fine = arclength(curve, SampleGrid(-1, 1, 2001))
    s_at = np.interp(tn, g.nodes, s_fine)
    np.testing.assert_allclose(np.diff(s_at), s_fine[-1] / 20, rtol=1e-6)


def test_cumulative_integral_accuracy():
    t = np.linspace(0, 3, 301)
    np.testing.assert_allclose(cumulative_integral(t, np.cos(t)), np.sin(t), atol=1e-9)
    with pytest.raises(InsufficientSamples):
        cumulative_integral(t[:3], t[:3])


def test_csv_round_trip_is_lossless(tmp_path, rng):
    t = np.linspace(0, 1, 50)
    pts = rng.normal(size=(50, 3)) * 10.0 ** rng.integers(-8, 8, size=(50, 1))
    path = tmp_path / "c.csv"
    write_curve_csv(path, t, pts)
    back = read_curve_csv(path)
    np.testing.assert_array_equal(back.t, t)
    np.testing.assert_array_equal(back.points, pts)
    buf = io.StringIO()
    write_curve_csv(buf, t[:2], pts[:2])
    assert buf.getvalue().splitlines()[0] == "t,x,y,z"


def test_csv_reader_rejects_decreasing_t(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("t,x,y,z\n0,0,0,0\n-1,0,0,0\n")
    with pytest.raises(NonUniformGrid):
        read_curve_csv(path)
