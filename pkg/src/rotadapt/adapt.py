"""Regression adaptation from a large source domain to a small rotated target domain.

``estimate_angle`` compresses the source with K-means to as many centroids
as there are target points, matches centroids to targets by optimal
transport, and fits the rotation between the matched pairs.
``adapt_regression`` repeats that on bootstrap subsets of the source,
rotates the source regression line by each estimated angle, and keeps the
componentwise median of the rotated coefficients.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .assign import TransportPlan, optimal_transport
from .cluster import KMeansConfig, kmeans
from .core import (
    AdaptationFailed,
    DegenerateInput,
    InvalidInput,
    LineCoeffs,
    VerticalLine,
    as_point_set,
    derive_seed,
)
from .rotation import estimate_rotation_svd, rotate_line

__all__ = [
    "AdaptationConfig",
    "AdaptationReport",
    "AngleEstimate",
    "IterationRecord",
    "adapt_regression",
    "adapt_regression_report",
    "bootstrap_subset",
    "estimate_angle",
    "fit_ols",
    "median",
]


@dataclass(frozen=True)
class AdaptationConfig:
    """Tunables of the angle estimation and the bootstrap loop.

    ``kmeans.k`` and ``kmeans.seed`` are overridden internally: k is always
    the target size and the clustering seed is derived from ``seed``.

    ``center_rotation=False`` fits the rotation about the origin, which is
    the rotation centre the domains are assumed to share. Centring both
    matched sets first makes the fit ignore that centre and throws away the
    constraint the source line carries.
    """

    n_repetitions: int = 100
    bootstrap_proportion: float = 0.5
    norm_order: float = 2.0
    kmeans: KMeansConfig = field(default_factory=KMeansConfig)
    seed: int = 0
    max_bootstrap_retries: int = 10
    bootstrap_replace: bool = True
    center_rotation: bool = False

    def __post_init__(self):
        if self.n_repetitions < 1:
            raise InvalidInput(f"n_repetitions must be >= 1, got {self.n_repetitions}")
        if not 0.0 < self.bootstrap_proportion <= 1.0:
            raise InvalidInput(
                f"bootstrap_proportion must be in (0, 1], got {self.bootstrap_proportion}"
            )
        if math.isnan(self.norm_order) or self.norm_order < 1.0:
            raise InvalidInput(f"norm_order must be >= 1, got {self.norm_order}")
        if self.max_bootstrap_retries < 0:
            raise InvalidInput("max_bootstrap_retries must be >= 0")
        if not 0 <= self.seed < 2**64:
            raise InvalidInput(f"seed must be an unsigned 64-bit integer, got {self.seed}")


@dataclass(frozen=True)
class AngleEstimate:
    theta_hat: float
    plan: TransportPlan
    centroids: NDArray[np.float64]


@dataclass(frozen=True)
class IterationRecord:
    index: int
    theta_hat: float | None = None
    line: LineCoeffs | None = None
    n_distinct: int = 0
    attempts: int = 0
    failure: str | None = None


@dataclass(frozen=True)
class AdaptationReport:
    line: LineCoeffs
    source_fit: LineCoeffs
    iterations: tuple[IterationRecord, ...]

    @property
    def n_failed(self) -> int:
        return sum(rec.failure is not None for rec in self.iterations)

    @property
    def thetas(self) -> list[float | None]:
        return [rec.theta_hat for rec in self.iterations]


def median(values) -> float:
    """Median; even lengths take the midpoint of the two middle values."""
    arr = np.asarray(values, dtype=np.float64).ravel()
    if arr.size == 0:
        raise InvalidInput("median of an empty sequence")
    if np.isnan(arr).any():
        raise InvalidInput("median of a sequence containing NaN")
    return float(np.median(arr))


def fit_ols(data: ArrayLike) -> LineCoeffs:
    """Least-squares line ``y = a x + b`` through the points."""
    pts = as_point_set(data, "data")
    if pts.shape[0] < 2:
        raise DegenerateInput("need at least two points to fit a line")
    x, y = pts[:, 0], pts[:, 1]
    xm, ym = x.mean(), y.mean()
    dx = x - xm
    sxx = float(dx @ dx)
    if sxx == 0.0 or np.all(x == x[0]):
        raise DegenerateInput("all x values are equal; slope undefined")
    a = float(dx @ (y - ym)) / sxx
    return LineCoeffs(a, float(ym - a * xm))


def estimate_angle(source: ArrayLike, target: ArrayLike, config: AdaptationConfig | None = None) -> AngleEstimate:
    """Rotation angle from ``source`` to ``target``.

    The source is clustered into ``len(target)`` centroids, each centroid is
    matched to one target point by optimal transport under the
    ``config.norm_order`` norm, and the rotation between the matched pairs
    is fitted by SVD.
    """
    config = config or AdaptationConfig()
    src = as_point_set(source, "source")
    tgt = as_point_set(target, "target")
    n_t = tgt.shape[0]
    if n_t < 2:
        raise DegenerateInput(f"target needs at least 2 points, got {n_t}")
    if src.shape[0] < n_t:
        raise DegenerateInput(f"source has {src.shape[0]} points, fewer than target's {n_t}")
    km = replace(config.kmeans, k=n_t, seed=derive_seed(config.seed, 0))
    centroids = kmeans(src, km)
    plan = optimal_transport(centroids, tgt, config.norm_order)
    theta_hat = estimate_rotation_svd(centroids, tgt[plan.assignment], config.center_rotation)
    return AngleEstimate(theta_hat, plan, centroids)


def bootstrap_subset(
    source: NDArray[np.float64],
    proportion: float,
    rng: np.random.Generator,
    replace_: bool = True,
    min_size: int = 1,
) -> NDArray[np.float64]:
    """Draw ``ceil(proportion * n)`` source rows and drop duplicate points.

    When that size is below ``min_size`` (the number of centroids needed),
    ``min_size`` rows are drawn without replacement instead. The result is
    sorted lexicographically by (x, y).
    """
    uniq, inverse = np.unique(source, axis=0, return_inverse=True)
    return _bootstrap_from(uniq, inverse.ravel(), proportion, rng, replace_, min_size)


def _bootstrap_from(uniq, inverse, proportion, rng, replace_, min_size=1):
    n = inverse.size
    m = max(1, math.ceil(proportion * n))
    if m < min_size:
        idx = rng.choice(n, size=min(min_size, n), replace=False)
    elif replace_:
        idx = rng.integers(n, size=m)
    else:
        idx = rng.choice(n, size=m, replace=False)
    return uniq[np.unique(inverse[idx])]


def _one_iteration(uniq, inverse, tgt, config, index, source_fit):
    n_t = tgt.shape[0]
    rng = np.random.default_rng(derive_seed(config.seed, index, 0))
    attempts = 0
    subset = None
    for attempts in range(1, config.max_bootstrap_retries + 2):
        subset = _bootstrap_from(uniq, inverse, config.bootstrap_proportion, rng,
                                 config.bootstrap_replace, n_t)
        if subset.shape[0] >= n_t:
            break
    n_distinct = subset.shape[0]
    if n_distinct < n_t:
        return IterationRecord(index, n_distinct=n_distinct, attempts=attempts,
                               failure="bootstrap")
    est = estimate_angle(subset, tgt, replace(config, seed=derive_seed(config.seed, index, 1)))
    try:
        line = rotate_line(source_fit, est.theta_hat)
    except VerticalLine:
        return IterationRecord(index, theta_hat=est.theta_hat, n_distinct=n_distinct,
                               attempts=attempts, failure="vertical")
    return IterationRecord(index, theta_hat=est.theta_hat, line=line,
                           n_distinct=n_distinct, attempts=attempts)


def adapt_regression_report(
    source: ArrayLike, target: ArrayLike, config: AdaptationConfig | None = None
) -> AdaptationReport:
    """Run the bootstrap adaptation and keep every per-iteration result.

    Iterations whose bootstrap never reaches ``len(target)`` distinct points,
    or whose rotated line is vertical, are dropped before the medians.
    """
    config = config or AdaptationConfig()
    src = as_point_set(source, "source")
    tgt = as_point_set(target, "target")
    if tgt.shape[0] < 2:
        raise DegenerateInput(f"target needs at least 2 points, got {tgt.shape[0]}")
    uniq, inverse = np.unique(src, axis=0, return_inverse=True)
    inverse = inverse.ravel()
    if uniq.shape[0] < tgt.shape[0]:
        raise DegenerateInput(
            f"source has fewer distinct points than the target size {tgt.shape[0]}"
        )
    source_fit = fit_ols(src)
    records = tuple(
        _one_iteration(uniq, inverse, tgt, config, i, source_fit) for i in range(config.n_repetitions)
    )
    good = [rec.line for rec in records if rec.line is not None]
    if not good:
        reasons = sorted({rec.failure for rec in records})
        raise AdaptationFailed(
            f"all {config.n_repetitions} iterations failed ({', '.join(reasons)})"
        )
    line = LineCoeffs(median([g.a for g in good]), median([g.b for g in good]))
    return AdaptationReport(line, source_fit, records)


def adapt_regression(source: ArrayLike, target: ArrayLike, config: AdaptationConfig | None = None) -> LineCoeffs:
    """Source regression line carried over to the target domain."""
    return adapt_regression_report(source, target, config).line
