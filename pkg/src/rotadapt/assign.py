"""Exact discrete optimal transport between equal-size uniform point clouds.

With uniform weights on two sets of the same size the Monge problem is a
linear assignment problem, solved here exactly with a shortest augmenting
path (Hungarian) method. Among several optimal permutations the
lexicographically smallest one is returned, so results never depend on
floating-point accident in the search order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike, NDArray

from ._kernels import hungarian
from .core import InvalidInput, SizeMismatch, as_permutation, as_point_set

__all__ = [
    "TransportPlan",
    "cost_matrix",
    "optimal_transport",
    "pnorm",
    "solve_assignment",
]


@dataclass(frozen=True)
class TransportPlan:
    """Source row ``i`` is sent to target row ``assignment[i]``."""

    assignment: NDArray[np.intp]
    total_cost: float

    def __post_init__(self):
        perm = as_permutation(self.assignment)
        perm.setflags(write=False)
        object.__setattr__(self, "assignment", perm)
        if not (self.total_cost >= 0.0):
            raise InvalidInput(f"total cost must be >= 0, got {self.total_cost}")

    @property
    def n(self) -> int:
        return int(self.assignment.size)

    def is_identity(self) -> bool:
        return bool(np.array_equal(self.assignment, np.arange(self.n)))


def _check_order(p: float) -> float:
    p = float(p)
    if math.isnan(p) or p < 1.0:
        raise InvalidInput(f"norm order must be >= 1, got {p}")
    return p


def pnorm(diff: NDArray[np.float64], p: float) -> NDArray[np.float64]:
    """p-norm along the last axis (size 2); ``p = inf`` is the max-norm."""
    p = _check_order(p)
    ad = np.abs(diff)
    if p == 1.0:
        return ad.sum(axis=-1)
    if p == 2.0:
        return np.hypot(ad[..., 0], ad[..., 1])
    if math.isinf(p):
        return ad.max(axis=-1)
    m = ad.max(axis=-1)
    safe = np.where(m > 0, m, 1.0)
    scaled = ad / safe[..., None]
    return m * np.sum(scaled**p, axis=-1) ** (1.0 / p)


def cost_matrix(source: ArrayLike, target: ArrayLike, p: float = 2.0) -> NDArray[np.float64]:
    """``C[i, j] = ||target[j] - source[i]||_p`` (the norm, not its p-th power)."""
    p = _check_order(p)
    src = as_point_set(source, "source")
    tgt = as_point_set(target, "target")
    if src.shape[0] != tgt.shape[0]:
        raise SizeMismatch(f"source has {src.shape[0]} points, target has {tgt.shape[0]}")
    return pnorm(tgt[None, :, :] - src[:, None, :], p)


def _check_cost(cost: ArrayLike) -> NDArray[np.float64]:
    c = np.asarray(cost, dtype=np.float64)
    if c.ndim != 2 or c.shape[0] != c.shape[1] or c.shape[0] == 0:
        raise InvalidInput(f"cost matrix must be square and non-empty, got shape {c.shape}")
    if not np.all(np.isfinite(c)):
        raise InvalidInput("cost matrix has non-finite entries")
    if np.any(c < 0):
        raise InvalidInput("cost matrix has negative entries")
    return c


def _reroute(i, j, col_of_row, row_of_col, tight, fixed_col):
    """Try to give column ``j`` to row ``i`` while keeping a perfect tight matching.

    Searches an alternating path from the row currently holding ``j`` to
    the column currently held by ``i``, avoiding columns already fixed.
    Applies the cycle and returns True on success.
    """
    goal = col_of_row[i]
    start = row_of_col[j]
    seen = fixed_col.copy()
    seen[j] = True
    # stack entries: (row, candidate columns iterator); parent links give the path
    parent_col = {}
    stack = [(start, iter(np.flatnonzero(tight[start])))]
    while stack:
        row, cols = stack[-1]
        for col in cols:
            if seen[col]:
                continue
            seen[col] = True
            parent_col[col] = row
            if col == goal:
                # walk back: each row on the path takes the column found after it
                c_ = col
                while True:
                    r_ = parent_col[c_]
                    prev = col_of_row[r_]
                    col_of_row[r_] = c_
                    row_of_col[c_] = r_
                    if r_ == start:
                        break
                    c_ = prev
                col_of_row[i] = j
                row_of_col[j] = i
                return True
            nxt = row_of_col[col]
            stack.append((nxt, iter(np.flatnonzero(tight[nxt]))))
            break
        else:
            stack.pop()
    return False


def _lexicographic_min(col_of_row, tight):
    n = col_of_row.size
    col_of_row = col_of_row.copy()
    row_of_col = np.empty(n, dtype=np.intp)
    row_of_col[col_of_row] = np.arange(n)
    fixed_col = np.zeros(n, dtype=bool)
    for i in range(n):
        for j in np.flatnonzero(tight[i]):
            if j >= col_of_row[i]:
                break
            if fixed_col[j]:
                continue
            if _reroute(i, j, col_of_row, row_of_col, tight, fixed_col):
                break
        fixed_col[col_of_row[i]] = True
    return col_of_row


def solve_assignment(cost: ArrayLike) -> TransportPlan:
    """Minimum-cost permutation for a square non-negative cost matrix.

    Ties are broken towards the lexicographically smallest permutation:
    optimal permutations are exactly the perfect matchings on edges with
    zero reduced cost, and those are searched row by row.
    """
    c = _check_cost(cost)
    n = c.shape[0]
    col_of_row, u, v = hungarian(c)
    col_of_row = col_of_row.astype(np.intp)
    reduced = c - u[:, None] - v[None, :]
    scale = max(1.0, float(np.max(c)))
    tight = reduced <= 16.0 * n * np.finfo(float).eps * scale
    tight[np.arange(n), col_of_row] = True
    if np.count_nonzero(tight) > n:
        col_of_row = _lexicographic_min(col_of_row, tight)
    total = math.fsum(c[np.arange(n), col_of_row])
    return TransportPlan(col_of_row, total)


def optimal_transport(source: ArrayLike, target: ArrayLike, p: float = 2.0) -> TransportPlan:
    """Optimal transport plan between two equal-size uniform empirical measures.

    For ``p >= 2`` and an exact rotation between the sets this plan is often,
    but not always, the identity; the recovery degrades with the rotation
    angle and the number of points.
    """
    return solve_assignment(cost_matrix(source, target, p))
