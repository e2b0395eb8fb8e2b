"""Planar rotations of points and lines, and least-squares rotation fitting."""

from __future__ import annotations

import math

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .core import (
    DegenerateInput,
    InvalidInput,
    LineCoeffs,
    Point2,
    SizeMismatch,
    VerticalLine,
    as_point_set,
    rotation_matrix,
    wrap_angle,
)

__all__ = [
    "VERTICAL_TOL",
    "estimate_rotation_svd",
    "fit_rotation_matrix",
    "rotate_line",
    "rotate_point",
    "rotate_set",
]

VERTICAL_TOL = 1e-12


def rotate_point(pt, theta: float) -> Point2:
    x, y = pt
    c, s = math.cos(theta), math.sin(theta)
    return Point2(x * c - y * s, x * s + y * c)


def rotate_set(points: ArrayLike, theta: float) -> NDArray[np.float64]:
    """Rotate every row about the origin; row order is preserved."""
    pts = as_point_set(points)
    return pts @ rotation_matrix(theta).T


def fit_rotation_matrix(
    source: ArrayLike, target: ArrayLike, center: bool = True
) -> NDArray[np.float64]:
    """Proper rotation ``R`` minimising ``sum ||R (s_i - s_bar) - (t_i - t_bar)||^2``.

    Both sets are centred, then ``R = V diag(1, det(V U^T)) U^T`` from the
    SVD ``H = U S V^T`` of the cross-covariance ``H = sum (s_i - s_bar)(t_i - t_bar)^T``.
    The determinant factor rules out reflections.

    With ``center=False`` the rotation is pinned to the origin and the
    means are not subtracted, i.e. ``sum ||R s_i - t_i||^2`` is minimised.
    """
    src = as_point_set(source, "source")
    tgt = as_point_set(target, "target")
    if src.shape[0] != tgt.shape[0]:
        raise SizeMismatch(f"source has {src.shape[0]} points, target has {tgt.shape[0]}")
    if src.shape[0] < 2:
        raise DegenerateInput("need at least two matched pairs")
    if np.all(src == src[0]):
        raise DegenerateInput("all source points coincide")
    if center:
        src = src - src.mean(axis=0)
        tgt = tgt - tgt.mean(axis=0)
    h = src.T @ tgt
    u, _, vt = np.linalg.svd(h)
    v = vt.T
    d = np.sign(np.linalg.det(v @ u.T))
    if d == 0:
        d = 1.0
    return v @ np.diag([1.0, d]) @ u.T


def estimate_rotation_svd(source: ArrayLike, target: ArrayLike, center: bool = True) -> float:
    """Angle in ``(-pi, pi]`` of the rotation taking matched ``source`` rows onto ``target`` rows."""
    r = fit_rotation_matrix(source, target, center)
    return wrap_angle(math.atan2(r[1, 0], r[0, 0]))


def rotate_line(line, theta: float) -> LineCoeffs:
    """Coefficients of the line ``y = a x + b`` after rotating it by ``theta`` about the origin.

    ``a' = (a cos t + sin t) / (cos t - a sin t)`` and ``b' = b / (cos t - a sin t)``.
    Raises :class:`VerticalLine` when the denominator is within ``VERTICAL_TOL`` of zero.
    """
    a, b = line
    if not (math.isfinite(a) and math.isfinite(b) and math.isfinite(theta)):
        raise InvalidInput("line coefficients and angle must be finite")
    c, s = math.cos(theta), math.sin(theta)
    denom = c - a * s
    if abs(denom) <= VERTICAL_TOL:
        raise VerticalLine(theta, a)
    return LineCoeffs((a * c + s) / denom, b / denom)
