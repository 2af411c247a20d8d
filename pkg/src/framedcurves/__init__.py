"""Mates, evolutes and involutes of space curves and framed curves.

Subpackages by concern:

``geom3``
    batched 3-vector helpers
``curvekit``
    analytic and sampled curves, grids, arclength, CSV
``odeint``
    fixed-step RK4 for small linear systems
``frenet``
    Frenet apparatus and classical mate conditions
``framedkit``
    framed curves, their curvature, reconstruction, Bishop frames
``mates``
    mate constructions with closed-form and fd-oracle curvatures
``evolute_involute``
    evolutes, involutes and their round trips
``verify``
    residual checks and the named verification suite
"""

__version__ = "0.1.0"

from .curvekit import SampleGrid, make_curve  # noqa: E402
from .errors import CurveError  # noqa: E402
from .framedkit import make_framed  # noqa: E402

__all__ = ["CurveError", "SampleGrid", "__version__", "make_curve", "make_framed"]
