"""Exception hierarchy.

Errors raised at a specific parameter value carry it as ``.t`` so that the CLI
can name the first failing node.
"""

from __future__ import annotations


class CurveError(Exception):
    """Base class for every computation failure in the package."""

    def __init__(self, message: str = "", t: float | None = None):
        self.t = t
        if t is not None:
            message = f"{message} at t={t:.17g}" if message else f"t={t:.17g}"
        super().__init__(message)


class DegenerateFrame(CurveError):
    pass


class OutOfDomain(CurveError):
    pass


class InsufficientSamples(CurveError):
    pass


class NonUniformGrid(CurveError):
    pass


class SingularPoint(CurveError):
    """``|gamma'(t)|`` below the regularity threshold."""


class DegeneratePoint(CurveError):
    """``gamma' x gamma''`` vanishes: the Frenet frame does not exist."""


class NonFiniteState(CurveError):
    pass


class FrameViolation(CurveError):
    """A frame that is not orthonormal or not normal to the curve."""


class TorsionVanishes(CurveError):
    pass


class HVanishes(CurveError):
    pass


class EtaVanishes(CurveError):
    pass


class OsculatingDegeneracy(CurveError):
    """``1 - lambda * kappa`` vanishes."""


class TrivialCoefficients(CurveError):
    """``(lambda, eta)`` is numerically identically zero."""


class ConditionInfeasible(CurveError):
    def __init__(self, kind, message: str = "", t: float | None = None):
        self.kind = kind
        super().__init__(f"{kind}: {message}" if message else str(kind), t)


class SignChange(CurveError):
    pass


class MbarVanishes(CurveError):
    pass


class NotBishop(CurveError):
    pass


class FrameDegenerate(CurveError):
    """``m^2 + n^2`` vanishes, so the t0-involute frame is undefined."""


class UnknownCheck(CurveError, KeyError):
    def __str__(self):
        return Exception.__str__(self)
