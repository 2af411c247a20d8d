"""3-vectors and orthonormal frames.

Vectors are plain ``numpy`` arrays whose last axis has length 3, so every
function here works on a single vector of shape ``(3,)`` as well as on a batch
of shape ``(N, 3)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import config
from .errors import DegenerateFrame, FrameViolation


def vec3(x, y=None, z=None) -> np.ndarray:
    """Build a finite 3-vector (or batch) and reject NaN/Inf."""
    if y is None and z is None:
        v = np.asarray(x, dtype=float)
    else:
        v = np.array([x, y, z], dtype=float)
    if v.shape[-1:] != (3,):
        raise ValueError(f"expected trailing dimension 3, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise ValueError("vector components must be finite")
    return v


def dot(a, b) -> np.ndarray:
    return np.einsum("...i,...i->...", a, b)


def cross(a, b) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return np.stack(
        [
            a[..., 1] * b[..., 2] - a[..., 2] * b[..., 1],
            a[..., 2] * b[..., 0] - a[..., 0] * b[..., 2],
            a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0],
        ],
        axis=-1,
    )


def norm(a) -> np.ndarray:
    return np.sqrt(dot(a, a))


def det3(a, b, c) -> np.ndarray:
    return dot(a, cross(b, c))


def unit(a) -> np.ndarray:
    return a / norm(a)[..., None]


@dataclass(frozen=True)
class OrthoPair:
    """A point of the manifold of ordered orthonormal pairs in R^3."""

    a: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        eps = config.get().eps_unit
        if (
            np.any(np.abs(norm(self.a) - 1) > eps)
            or np.any(np.abs(norm(self.b) - 1) > eps)
            or np.any(np.abs(dot(self.a, self.b)) > eps)
        ):
            raise FrameViolation("pair is not orthonormal")

    @property
    def third(self) -> np.ndarray:
        return cross(self.a, self.b)


@dataclass(frozen=True)
class Frame3:
    """Moving frame ``(e1, e2, e3)``; batched when the vectors are ``(N, 3)``."""

    e1: np.ndarray
    e2: np.ndarray
    e3: np.ndarray

    def matrix(self) -> np.ndarray:
        """Rows are the frame vectors, shape ``(..., 3, 3)``."""
        return np.stack([self.e1, self.e2, self.e3], axis=-2)

    def orthonormality_defect(self) -> float:
        m = self.matrix()
        gram = m @ np.swapaxes(m, -1, -2)
        return float(np.max(np.abs(gram - np.eye(3))))

    def handedness_defect(self) -> float:
        return float(np.max(np.abs(det3(self.e1, self.e2, self.e3) - 1.0)))

    def is_valid(self, right_handed: bool = True, eps: float | None = None) -> bool:
        eps = config.get().eps_unit if eps is None else eps
        ok = self.orthonormality_defect() <= eps
        if right_handed:
            ok = ok and self.handedness_defect() <= eps
        return ok


def orthonormalize(e1, e2) -> Frame3:
    """Gram-Schmidt: normalize ``e1``, orthogonalize ``e2`` against it, close
    with ``e3 = e1 x e2``."""
    e1 = np.asarray(e1, dtype=float)
    e2 = np.asarray(e2, dtype=float)
    if np.any(norm(cross(e1, e2)) <= 1e-12 * np.maximum(norm(e1) * norm(e2), 1e-300)):
        raise DegenerateFrame("input vectors are parallel")
    u1 = unit(e1)
    u2 = e2 - dot(e2, u1)[..., None] * u1
    u2 = unit(u2)
    # second pass keeps the pair orthogonal to rounding when e2 is nearly parallel
    u2 = unit(u2 - dot(u2, u1)[..., None] * u1)
    return Frame3(u1, u2, cross(u1, u2))
