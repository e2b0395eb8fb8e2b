"""K-means with k-means++ seeding, used to compress the source set to n_t centroids."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike, NDArray

from ._kernels import nearest_centroid
from .core import DegenerateInput, InvalidInput, as_point_set

__all__ = ["KMeansConfig", "kmeans", "kmeans_plusplus", "lloyd", "inertia"]


@dataclass(frozen=True)
class KMeansConfig:
    k: int = 1
    max_iter: int = 300
    tol: float = 1e-9
    seed: int = 0
    n_init: int = 1

    def __post_init__(self):
        if self.k < 1:
            raise InvalidInput(f"k must be >= 1, got {self.k}")
        if self.max_iter < 1:
            raise InvalidInput(f"max_iter must be >= 1, got {self.max_iter}")
        if not self.tol > 0:
            raise InvalidInput(f"tol must be > 0, got {self.tol}")
        if self.n_init < 1:
            raise InvalidInput(f"n_init must be >= 1, got {self.n_init}")
        if not 0 <= self.seed < 2**64:
            raise InvalidInput(f"seed must be an unsigned 64-bit integer, got {self.seed}")


def _sq_dists(data, centroids):
    # (n, k) squared Euclidean distances
    dx = data[:, 0:1] - centroids[:, 0]
    dy = data[:, 1:2] - centroids[:, 1]
    dx *= dx
    dy *= dy
    dx += dy
    return dx


def inertia(data: ArrayLike, centroids: ArrayLike) -> float:
    """Sum of squared distances from each point to its nearest centroid."""
    data = as_point_set(data, "data")
    centroids = as_point_set(centroids, "centroids")
    return float(_sq_dists(data, centroids).min(axis=1).sum())


def kmeans_plusplus(data: NDArray[np.float64], k: int, rng: np.random.Generator) -> NDArray[np.float64]:
    """k-means++ seeding; rows of the result are in selection order."""
    n = data.shape[0]
    centers = np.empty((k, 2))
    first = int(rng.integers(n))
    centers[0] = data[first]
    closest = np.sum((data - centers[0]) ** 2, axis=1)
    for c in range(1, k):
        total = closest.sum()
        if not total > 0:
            raise DegenerateInput(f"only {c} distinct points, need {k}")
        r = rng.random() * total
        idx = int(np.searchsorted(np.cumsum(closest), r, side="right"))
        idx = min(idx, n - 1)
        # guard against landing on a zero-weight point through rounding
        if closest[idx] == 0:
            idx = int(np.flatnonzero(closest > 0)[-1])
        centers[c] = data[idx]
        np.minimum(closest, np.sum((data - centers[c]) ** 2, axis=1), out=closest)
    return centers


def lloyd(
    data: NDArray[np.float64],
    centroids: NDArray[np.float64],
    max_iter: int = 300,
    tol: float = 1e-9,
) -> tuple[NDArray[np.float64], list[float]]:
    """Lloyd iterations from the given centroids.

    Returns the final centroids and the inertia measured at the start of
    every iteration plus the final value. An empty cluster is moved onto
    the point farthest from its current centroid.
    """
    data = np.ascontiguousarray(data, dtype=np.float64)
    centroids = np.array(centroids, dtype=np.float64)
    k = centroids.shape[0]
    labels = np.empty(data.shape[0], dtype=np.int64)
    nearest = np.empty(data.shape[0])
    history = []
    for _ in range(max_iter):
        history.append(nearest_centroid(data, centroids, labels, nearest))
        counts = np.bincount(labels, minlength=k)
        for empty in np.flatnonzero(counts == 0):
            far = int(np.argmax(nearest))
            counts[labels[far]] -= 1
            labels[far] = empty
            counts[empty] = 1
            nearest[far] = 0.0
        new = np.column_stack(
            (
                np.bincount(labels, weights=data[:, 0], minlength=k),
                np.bincount(labels, weights=data[:, 1], minlength=k),
            )
        ) / counts[:, None]
        shift = float(np.sum((new - centroids) ** 2))
        centroids = new
        if shift < tol:
            break
    history.append(nearest_centroid(data, centroids, labels, nearest))
    return centroids, history


def kmeans(data: ArrayLike, config: KMeansConfig) -> NDArray[np.float64]:
    """Cluster ``data`` into ``config.k`` centroids (Euclidean distance).

    Deterministic for a given seed. With ``n_init > 1`` the run with the
    lowest inertia wins, earliest run on ties.
    """
    data = as_point_set(data, "data")
    k = config.k
    if k > data.shape[0]:
        raise DegenerateInput(f"fewer than k={k} points to cluster")
    # k-means++ itself raises DegenerateInput when fewer than k points are distinct
    rng = np.random.default_rng(config.seed)
    best, best_inertia = None, np.inf
    for _ in range(config.n_init):
        init = kmeans_plusplus(data, k, rng)
        centroids, history = lloyd(data, init, config.max_iter, config.tol)
        if history[-1] < best_inertia:
            best, best_inertia = centroids, history[-1]
    return best
