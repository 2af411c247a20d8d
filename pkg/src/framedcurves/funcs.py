"""Smooth scalar functions of the curve parameter.

Every coefficient the constructions consume (``lambda``, ``eta``, ``theta``,
curvature components) is wrapped as a :class:`Func`: a vectorized callable
together with its first derivative.  Derivatives are exact when supplied and
otherwise come from an 8th-order central stencil.
"""

from __future__ import annotations

from typing import Callable

import numpy as np

from .stencils import fd_callable, fd_uniform, lagrange_eval, check_uniform


class Func:
    """Vectorized scalar function with a first derivative."""

    def __init__(self, f: Callable, df: Callable | None = None, name: str = ""):
        self._f = f
        self._df = df
        self.name = name

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        return np.broadcast_to(np.asarray(self._f(t), dtype=float), t.shape).copy()

    def deriv(self, t):
        t = np.asarray(t, dtype=float)
        if self._df is not None:
            out = self._df(t)
        else:
            out = fd_callable(self._f, t)
        return np.broadcast_to(np.asarray(out, dtype=float), t.shape).copy()

    def derivative(self) -> "Func":
        return Func(self.deriv, name=f"d({self.name})")

    # arithmetic propagates derivatives by the sum, product and quotient rules

    def __neg__(self):
        return Func(lambda t: -self(t), lambda t: -self.deriv(t))

    def __add__(self, other):
        o = as_func(other)
        return Func(lambda t: self(t) + o(t), lambda t: self.deriv(t) + o.deriv(t))

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-as_func(other))

    def __rsub__(self, other):
        return as_func(other) + (-self)

    def __mul__(self, other):
        o = as_func(other)
        return Func(lambda t: self(t) * o(t), lambda t: self.deriv(t) * o(t) + self(t) * o.deriv(t))

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = as_func(other)
        return Func(lambda t: self(t) / o(t),
                    lambda t: (self.deriv(t) * o(t) - self(t) * o.deriv(t)) / o(t) ** 2)

    def __rtruediv__(self, other):
        return as_func(other) / self

    def __repr__(self):
        return f"Func({self.name or self._f!r})"


class Const(Func):
    def __init__(self, value: float):
        self.value = float(value)
        super().__init__(lambda t: np.full(np.shape(t), self.value),
                         lambda t: np.zeros(np.shape(t)), name=repr(self.value))


class GridFunction(Func):
    """Samples on a uniform grid, interpolated by local degree-5 polynomials.

    ``derivs`` (values of the derivative at the nodes, e.g. the right-hand
    side of the ODE that produced ``values``) make :meth:`deriv` accurate to
    interpolation error; otherwise node derivatives are estimated by
    4th-order finite differences.
    """

    def __init__(self, t, values, derivs=None, name: str = ""):
        t = np.asarray(t, dtype=float)
        self.h = check_uniform(t)
        self.t0 = float(t[0])
        self.nodes = t
        self.values = np.asarray(values, dtype=float)
        if derivs is None:
            derivs = fd_uniform(self.values, self.h, order=1, accuracy=4)
        self.derivs = np.asarray(derivs, dtype=float)
        super().__init__(
            lambda s: lagrange_eval(self.t0, self.h, self.values, s),
            lambda s: lagrange_eval(self.t0, self.h, self.derivs, s),
            name=name,
        )


def as_func(x) -> Func:
    """Coerce a number, a callable or a :class:`Func` to a :class:`Func`."""
    if isinstance(x, Func):
        return x
    if callable(x):
        return Func(x)
    return Const(float(x))


def fsin(f) -> Func:
    f = as_func(f)
    return Func(lambda t: np.sin(f(t)), lambda t: np.cos(f(t)) * f.deriv(t))


def fcos(f) -> Func:
    f = as_func(f)
    return Func(lambda t: np.cos(f(t)), lambda t: -np.sin(f(t)) * f.deriv(t))


def fsqrt(f) -> Func:
    f = as_func(f)
    return Func(lambda t: np.sqrt(f(t)), lambda t: 0.5 * f.deriv(t) / np.sqrt(f(t)))
