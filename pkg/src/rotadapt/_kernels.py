"""Compiled inner loops for the assignment solver and Lloyd iterations."""

import numba
import numpy as np


@numba.njit(cache=True)
def nearest_centroid(data, centroids, labels, nearest):
    """Fill ``labels``/``nearest`` with each point's closest centroid and squared distance.

    Returns the inertia. Ties go to the lowest centroid index.
    """
    n = data.shape[0]
    k = centroids.shape[0]
    total = 0.0
    for i in range(n):
        x = data[i, 0]
        y = data[i, 1]
        best = np.inf
        arg = 0
        for j in range(k):
            dx = x - centroids[j, 0]
            dy = y - centroids[j, 1]
            d = dx * dx + dy * dy
            if d < best:
                best = d
                arg = j
        labels[i] = arg
        nearest[i] = best
        total += best
    return total


@numba.njit(cache=True)
def hungarian(c):
    """Shortest augmenting path assignment with potentials, O(n^3).

    Returns ``(col_of_row, u, v)`` with ``c[i, j] - u[i] - v[j] >= 0`` for
    every pair and equality on the matching.
    """
    n = c.shape[0]
    # index 0 is a virtual row/column; real ones are 1..n
    u = np.zeros(n + 1)
    v = np.zeros(n + 1)
    row_of = np.zeros(n + 1, dtype=np.int64)
    way = np.zeros(n + 1, dtype=np.int64)
    minv = np.empty(n + 1)
    used = np.empty(n + 1, dtype=np.bool_)
    for i in range(1, n + 1):
        row_of[0] = i
        j0 = 0
        minv[:] = np.inf
        used[:] = False
        while True:
            used[j0] = True
            i0 = row_of[j0]
            delta = np.inf
            j1 = 0
            for j in range(1, n + 1):
                if not used[j]:
                    cur = c[i0 - 1, j - 1] - u[i0] - v[j]
                    if cur < minv[j]:
                        minv[j] = cur
                        way[j] = j0
                    if minv[j] < delta:
                        delta = minv[j]
                        j1 = j
            for j in range(n + 1):
                if used[j]:
                    u[row_of[j]] += delta
                    v[j] -= delta
                else:
                    minv[j] -= delta
            j0 = j1
            if row_of[j0] == 0:
                break
        while j0 != 0:
            j1 = way[j0]
            row_of[j0] = row_of[j1]
            j0 = j1
    col_of_row = np.empty(n, dtype=np.int64)
    for j in range(1, n + 1):
        col_of_row[row_of[j] - 1] = j - 1
    return col_of_row, u[1:].copy(), v[1:].copy()
