"""Shared planar types, error classes and angle helpers.

Point sets are carried as ``(n, 2)`` float64 arrays; :func:`as_point_set`
is the single gate that validates them. Rows keep their order because
indices carry identity when sets are matched.
"""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np
from numpy.typing import ArrayLike, NDArray

__all__ = [
    "AdaptationFailed",
    "DegenerateInput",
    "InvalidInput",
    "LineCoeffs",
    "Point2",
    "RotadaptError",
    "SizeMismatch",
    "VerticalLine",
    "as_permutation",
    "as_point_set",
    "derive_seed",
    "rotation_matrix",
    "wrap_angle",
]


class RotadaptError(ValueError):
    """Base class for every error raised by this package."""


class InvalidInput(RotadaptError):
    pass


class SizeMismatch(RotadaptError):
    pass


class DegenerateInput(RotadaptError):
    pass


class VerticalLine(RotadaptError):
    """A rotated line became vertical and has no slope/intercept form."""

    def __init__(self, theta: float, slope: float):
        self.theta = theta
        self.slope = slope
        super().__init__(
            f"rotating slope a={slope!r} by theta={theta!r} gives a vertical line"
        )


class AdaptationFailed(RotadaptError):
    pass


class Point2(NamedTuple):
    x: float
    y: float


class LineCoeffs(NamedTuple):
    """Line ``y = a*x + b``."""

    a: float
    b: float

    def __call__(self, x):
        return self.a * np.asarray(x, dtype=float) + self.b


def as_point_set(points: ArrayLike, name: str = "points") -> NDArray[np.float64]:
    """Validate and convert to a non-empty, finite ``(n, 2)`` float array."""
    arr = np.asarray(points, dtype=np.float64)
    if arr.ndim == 1 and arr.shape == (2,):
        arr = arr[None, :]
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise InvalidInput(f"{name} must have shape (n, 2), got {arr.shape}")
    if arr.shape[0] == 0:
        raise InvalidInput(f"{name} is empty")
    if not np.all(np.isfinite(arr)):
        raise InvalidInput(f"{name} contains non-finite coordinates")
    return arr


def as_permutation(perm: ArrayLike) -> NDArray[np.intp]:
    perm = np.asarray(perm, dtype=np.intp)
    if perm.ndim != 1 or not np.array_equal(np.sort(perm), np.arange(perm.size)):
        raise InvalidInput("not a permutation of 0..n-1")
    return perm


def wrap_angle(theta: float) -> float:
    """Map ``theta`` to its representative in ``(-pi, pi]``."""
    theta = float(theta)
    if not math.isfinite(theta):
        raise InvalidInput(f"angle must be finite, got {theta!r}")
    wrapped = math.remainder(theta, 2.0 * math.pi)
    if wrapped <= -math.pi:
        wrapped += 2.0 * math.pi
    return wrapped + 0.0  # drop negative zero


def rotation_matrix(theta: float) -> NDArray[np.float64]:
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, -s], [s, c]])


def derive_seed(master: int, *keys: int) -> int:
    """Independent 64-bit seed for the stream addressed by ``keys`` under ``master``.

    Counter-based, so any sub-task can be reseeded on its own (and run in
    any order or process) without touching its siblings.
    """
    ss = np.random.SeedSequence(entropy=int(master), spawn_key=tuple(int(k) for k in keys))
    return int(ss.generate_state(1, dtype=np.uint64)[0])
