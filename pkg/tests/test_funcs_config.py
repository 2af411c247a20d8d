import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from framedcurves import config
from framedcurves.config import Tolerances
from framedcurves.errors import CurveError, TorsionVanishes
from framedcurves.funcs import Const, Func, GridFunction, as_func, fcos, fsin, fsqrt

T = np.linspace(0.1, 2.0, 37)


def ident():
    return Func(lambda t: t, lambda t: np.ones_like(t), "t")


@given(st.floats(-3, 3), st.floats(0.1, 3))
def test_arithmetic_derivatives(a, b):
    x = ident()
    f = (a * fsin(b * x) + x * x) / (2.0 + fcos(x)) - fsqrt(x + 1.0)
    g = Func(f)  # derivative by stencil
    np.testing.assert_allclose(f.deriv(T), g.deriv(T), atol=1e-8)


def test_const_and_coercion():
    c = Const(2.5)
    np.testing.assert_array_equal(c(T), 2.5)
    np.testing.assert_array_equal(c.deriv(T), 0.0)
    assert isinstance(as_func(3), Const)
    assert as_func(np.sin)(np.array([0.0]))[0] == 0.0
    np.testing.assert_allclose((1 - ident())(T), 1 - T)
    np.testing.assert_allclose((1 / (1 + ident())).deriv(T), -1 / (1 + T) ** 2)
    assert ident().derivative()(np.array([2.0]))[0] == pytest.approx(1.0)


def test_grid_function():
    t = np.linspace(0, 2, 201)
    gf = GridFunction(t, np.sin(t), np.cos(t))
    x = np.linspace(0.05, 1.95, 31)
    np.testing.assert_allclose(gf(x), np.sin(x), atol=1e-12)
    np.testing.assert_allclose(gf.deriv(x), np.cos(x), atol=1e-12)
    np.testing.assert_allclose(GridFunction(t, np.sin(t)).deriv(x), np.cos(x), atol=1e-7)


def test_tolerance_override_is_scoped():
    before = config.get()
    with config.override(tol_cond=1e-3) as tol:
        assert tol.tol_cond == 1e-3 and config.get().tol_cond == 1e-3
    assert config.get() == before


def test_tolerances_from_environment():
    tol = Tolerances.from_env({"FRAMEDCURVES_EPS_UNIT": "1e-9", "FRAMEDCURVES_STEPS_PER_UNIT": "500"})
    assert tol.eps_unit == 1e-9 and tol.steps_per_unit == 500 and tol.tol_cond == Tolerances().tol_cond


def test_errors_carry_parameter():
    e = TorsionVanishes("torsion vanishes", 0.25)
    assert e.t == 0.25 and "t=0.25" in str(e)
    assert isinstance(e, CurveError)
    assert str(CurveError()) == "" and CurveError(t=math.pi).t == math.pi
