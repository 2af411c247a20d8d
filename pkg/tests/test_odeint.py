import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from framedcurves.curvekit import SampleGrid
from framedcurves.errors import NonFiniteState
from framedcurves.odeint import LinearField, VectorField, convergence_order, default_substeps, rk4_solve


def exp_field():
    return LinearField(1, lambda tt: np.ones((len(tt), 1, 1)))


def test_rk4_solves_exponential():
    traj = rk4_solve(exp_field(), [1.0], SampleGrid(0, 1, 11), substeps=100)
    np.testing.assert_allclose(traj.component(0), np.exp(traj.t), rtol=1e-11)


def test_rk4_order_on_exponential():
    assert convergence_order(exp_field(), [1.0], SampleGrid(0, 1, 11)) == pytest.approx(4.0, abs=0.2)


def test_generic_field_order():
    # nonlinear y' = -y^2, y(0) = 1 -> y = 1/(1+t)
    f = VectorField(1, lambda t, y: -y**2)
    traj = rk4_solve(f, [1.0], SampleGrid(0, 2, 5), substeps=200)
    np.testing.assert_allclose(traj.component(0), 1 / (1 + traj.t), rtol=1e-11)
    assert convergence_order(f, [1.0], SampleGrid(0, 2, 5), base_substeps=4) == pytest.approx(4.0, abs=0.2)


def test_linear_and_generic_paths_agree():
    A = np.array([[0.0, 1.0], [-1.0, 0.0]])
    lin = LinearField(2, lambda tt: np.broadcast_to(A, (len(tt), 2, 2)), lambda tt: np.column_stack([np.sin(tt), 0 * tt]))
    gen = VectorField(2, lambda t, y: A @ y + np.array([math.sin(t), 0.0]))
    g = SampleGrid(0, 3, 31)
    np.testing.assert_allclose(rk4_solve(lin, [1, 0], g, 20).states, rk4_solve(gen, [1, 0], g, 20).states,
                               atol=1e-13)


@given(st.floats(-2, 2), st.floats(-2, 2))
def test_rotation_preserves_norm(omega, y1):
    A = np.array([[0.0, omega], [-omega, 0.0]])
    f = LinearField(2, lambda tt: np.broadcast_to(A, (len(tt), 2, 2)))
    traj = rk4_solve(f, [1.0, y1], SampleGrid(0, 1, 11))
    r = np.hypot(traj.states[:, 0], traj.states[:, 1])
    np.testing.assert_allclose(r, math.hypot(1.0, y1), rtol=1e-12)


def test_projection_hook_applied():
    f = LinearField(2, lambda tt: np.broadcast_to(np.array([[0.0, 1], [-1, 0]]), (len(tt), 2, 2)))
    traj = rk4_solve(f, [1.0, 0.0], SampleGrid(0, 5, 6), substeps=1, project=lambda y: y / np.linalg.norm(y))
    np.testing.assert_allclose(np.linalg.norm(traj.states, axis=1), 1.0, atol=1e-15)


def test_default_substeps():
    assert default_substeps(SampleGrid(0, 1, 11)) == 1000
    assert default_substeps(SampleGrid(0, 1, 11), steps_per_unit=5) == 1


def test_input_validation():
    with pytest.raises(ValueError):
        rk4_solve(exp_field(), [1.0, 2.0], SampleGrid(0, 1, 3))
    with pytest.raises(NonFiniteState):
        rk4_solve(exp_field(), [math.nan], SampleGrid(0, 1, 3))
    with pytest.raises(ValueError):
        rk4_solve(exp_field(), [1.0], SampleGrid(0, 1, 3), substeps=0)


def test_zero_error_gives_no_order():
    f = LinearField(1, lambda tt: np.zeros((len(tt), 1, 1)))
    assert convergence_order(f, [1.0], SampleGrid(0, 1, 3)) is None
