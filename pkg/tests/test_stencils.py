import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from framedcurves.curvekit import CURVE_CATALOG, fd_derivative, make_curve
from framedcurves.errors import InsufficientSamples, NonUniformGrid
from framedcurves.stencils import check_uniform, fd_callable, fd_uniform, fornberg_weights, lagrange_eval


def test_fornberg_known_weights():
    np.testing.assert_allclose(fornberg_weights((-1, 0, 1), 1), [-0.5, 0.0, 0.5])
    np.testing.assert_allclose(fornberg_weights((-1, 0, 1), 2), [1.0, -2.0, 1.0])
    np.testing.assert_allclose(fornberg_weights((-2, -1, 0, 1, 2), 1), [1 / 12, -2 / 3, 0, 2 / 3, -1 / 12])
    np.testing.assert_allclose(fornberg_weights((0, 1, 2), 1), [-1.5, 2.0, -0.5])


@pytest.mark.parametrize("accuracy", [2, 4, 6, 8])
@pytest.mark.parametrize("order", [1, 2, 3, 4])
def test_fd_exact_on_polynomials(order, accuracy):
    # a stencil of accuracy p for the k-th derivative is exact up to degree p + k - 1
    t = np.linspace(-1.0, 1.5, 31)
    deg = accuracy + order - 1
    coeffs = np.arange(1, deg + 2, dtype=float)[::-1] / 7.0
    poly = np.poly1d(coeffs)
    got = fd_uniform(poly(t), t[1] - t[0], order=order, accuracy=accuracy)
    want = poly.deriv(order)(t)
    np.testing.assert_allclose(got, want, atol=1e-7 * max(1.0, np.max(np.abs(want))))


# catalog curves whose coordinates are polynomials of degree <= accuracy are
# differentiated exactly; the error is then pure rounding and has no slope
POLY_DEGREE = {"line": 1, "twisted-cubic": 3, "cusp": 3}


@pytest.mark.parametrize("accuracy", [2, 4])
@pytest.mark.parametrize("name", sorted(CURVE_CATALOG))
def test_halving_h_divides_error_by_two_to_the_accuracy(name, accuracy):
    curve = make_curve(name)
    t0, t1, _ = CURVE_CATALOG[name].default_grid
    errs = []
    for n in (101, 201, 401):
        t = np.linspace(t0, t1, n)
        errs.append(np.max(np.abs(fd_derivative(t, curve.positions(t), 1, accuracy) - curve.jet(t).d1)))
    if POLY_DEGREE.get(name, 99) <= accuracy:
        assert max(errs) < 1e-11
        return
    for coarse, fine in zip(errs, errs[1:]):
        assert coarse / fine == pytest.approx(2.0**accuracy, rel=0.1)


def _interior_slope(order, accuracy, ns=(41, 81, 161)):
    errs, hs = [], []
    for n in ns:
        t = np.linspace(0.0, 1.0, n)
        h = t[1] - t[0]
        d = fd_uniform(np.sin(3 * t), h, order=order, accuracy=accuracy)
        exact = [3 * np.cos(3 * t), -9 * np.sin(3 * t)][order - 1]
        errs.append(np.max(np.abs(d - exact)[8:-8]))
        hs.append(h)
    return np.polyfit(np.log(hs), np.log(errs), 1)[0]


@pytest.mark.parametrize("order", [1, 2])
@pytest.mark.parametrize("accuracy", [2, 4])
def test_central_stencil_slopes(order, accuracy):
    assert _interior_slope(order, accuracy) == pytest.approx(accuracy, rel=0.1)


def test_one_sided_second_derivative_converges_at_second_order():
    # the one-sided end stencils carry a large next-order term, so their
    # slope reaches 2 only on finer grids
    errs = []
    for n in (321, 641, 1281):
        t = np.linspace(0.0, 1.0, n)
        d = fd_uniform(np.sin(3 * t), t[1] - t[0], 2, 2)
        errs.append(np.max(np.abs(d + 9 * np.sin(3 * t))))
    assert math.log2(errs[-2] / errs[-1]) == pytest.approx(2.0, rel=0.1)


def test_fd_derivative_examples():
    t = np.linspace(-1, 1, 11)
    np.testing.assert_allclose(fd_derivative(t, t**2), 2 * t, atol=1e-13)
    np.testing.assert_array_equal(fd_derivative(t, np.full_like(t, 3.0)), 0.0)
    t = np.arange(0.0, 1.0, 1e-3)
    assert np.max(np.abs(fd_derivative(t, np.sin(t)) - np.cos(t))) < 1e-6
    with pytest.raises(NonUniformGrid):
        fd_derivative(np.array([0, 0.1, 0.2, 0.35, 0.4, 0.5]), np.zeros(6))


def test_fd_vector_values():
    t = np.linspace(0, 2, 101)
    pts = np.column_stack([np.cos(t), np.sin(t), t**2])
    d = fd_uniform(pts, t[1] - t[0], 1, 4)
    np.testing.assert_allclose(d, np.column_stack([-np.sin(t), np.cos(t), 2 * t]), atol=1e-6)


def test_fd_rejects_bad_input():
    with pytest.raises(InsufficientSamples):
        fd_uniform(np.zeros(4), 0.1, 1, 4)
    with pytest.raises(ValueError):
        fd_uniform(np.zeros(40), 0.1, 5, 4)
    with pytest.raises(ValueError):
        fd_uniform(np.zeros(40), 0.1, 1, 3)


def test_check_uniform():
    assert check_uniform(np.linspace(0, 1, 11)) == pytest.approx(0.1)
    with pytest.raises(NonUniformGrid):
        check_uniform(np.array([0.0, 0.1, 0.3, 0.4]))


def test_fd_callable():
    t = np.linspace(0, 3, 7)
    np.testing.assert_allclose(fd_callable(np.exp, t), np.exp(t), rtol=1e-11)


@given(st.floats(0.0, 2.0), st.lists(st.floats(-3, 3), min_size=6, max_size=6))
def test_lagrange_reproduces_quintics(x, coeffs):
    t = np.linspace(0.0, 2.0, 21)
    poly = np.poly1d(coeffs)
    got = lagrange_eval(0.0, t[1] - t[0], poly(t), np.array([x]))
    assert got[0] == pytest.approx(poly(x), abs=1e-9 * (1 + sum(map(abs, coeffs))))


def test_lagrange_interpolates_nodes_exactly():
    t = np.linspace(0, math.pi, 50)
    v = np.sin(t)
    np.testing.assert_allclose(lagrange_eval(0.0, t[1] - t[0], v, t), v, atol=1e-15)
