"""Numeric thresholds shared by every module.

All strict conditions of the form ``x != 0`` and all orthonormality checks are
decided against the values held here.  Defaults can be overridden from the
environment with the ``FRAMEDCURVES_`` prefix, e.g.::

    FRAMEDCURVES_EPS_UNIT=1e-9 FRAMEDCURVES_TOL_COND=1e-7 framedcurves verify
"""

from __future__ import annotations

import contextlib
import dataclasses
import os
from dataclasses import dataclass

ENV_PREFIX = "FRAMEDCURVES_"


@dataclass(frozen=True)
class Tolerances:
    """Threshold record.

    eps_unit
        Unit-length / orthogonality tolerance and the regularity threshold
        for ``|gamma'|`` and ``|gamma' x gamma''|``.
    tol_cond
        Threshold turning "for all t, f(t) != 0" into "|f| > tol_cond at every
        grid node", and the acceptance level for condition residuals.
    steps_per_unit
        Default RK4 step count per unit parameter length.
    """

    eps_unit: float = 1e-10
    tol_cond: float = 1e-8
    steps_per_unit: int = 10_000

    @classmethod
    def from_env(cls, environ=None) -> "Tolerances":
        environ = os.environ if environ is None else environ
        values = {}
        for field in dataclasses.fields(cls):
            raw = environ.get(ENV_PREFIX + field.name.upper())
            if raw is not None:
                values[field.name] = int(float(raw)) if field.type in ("int", int) else float(raw)
        return cls(**values)


_current = Tolerances.from_env()


def get() -> Tolerances:
    return _current


def set_tolerances(tol: Tolerances) -> None:
    global _current
    _current = tol


@contextlib.contextmanager
def override(**changes):
    """Temporarily replace selected thresholds."""
    previous = _current
    set_tolerances(dataclasses.replace(previous, **changes))
    try:
        yield _current
    finally:
        set_tolerances(previous)
