"""Synthetic line data and the two Monte-Carlo comparisons.

Every trial compares a regression fitted on the small target sample alone
against the source line adapted by :func:`~rotadapt.adapt.adapt_regression`,
both scored on a held-out sample drawn from the target model. Seeds are
derived from ``(master seed, cell index, run index)`` so that results do
not depend on how trials are scheduled across worker processes.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import NamedTuple, Sequence

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .adapt import AdaptationConfig, adapt_regression, fit_ols
from .core import AdaptationFailed, InvalidInput, as_point_set, derive_seed, wrap_angle

__all__ = [
    "DomainSpec",
    "ExperimentResult",
    "NS_SWEEP_VALUES",
    "TrialOutcome",
    "GRID_SIGMAS",
    "GRID_THETAS",
    "NEAR_VERTICAL_OFFSET",
    "generate_domain",
    "mse",
    "run_ns_sweep",
    "run_single_trial",
    "run_theta_sigma_grid",
    "variation",
]

NS_SWEEP_VALUES = (10, 10**2, 10**3, 10**4, 10**5, 10**6)
NEAR_VERTICAL_OFFSET = 0.01
GRID_THETAS = (
    math.pi / 6,
    2 * math.pi / 6,
    3 * math.pi / 6 - NEAR_VERTICAL_OFFSET,
    4 * math.pi / 6,
    5 * math.pi / 6,
)
GRID_SIGMAS = (0.1, 0.2, 0.5, 1.0, 2.0, 5.0)


@dataclass(frozen=True)
class DomainSpec:
    """Points ``y = tan(theta) x + eps`` with ``x ~ U(x_range)`` and ``eps ~ N(0, sigma^2)``."""

    theta: float = 0.0
    sigma: float = 1.0
    n: int = 100
    x_range: tuple[float, float] = (0.0, 10.0)
    seed: int = 0

    def __post_init__(self):
        if not self.sigma >= 0:
            raise InvalidInput(f"sigma must be >= 0, got {self.sigma}")
        if self.n < 1:
            raise InvalidInput(f"n must be >= 1, got {self.n}")
        lo, hi = self.x_range
        if not lo < hi:
            raise InvalidInput(f"x_range must satisfy low < high, got {self.x_range}")
        theta = wrap_angle(self.theta)
        if abs(abs(theta) - math.pi / 2) < 1e-9:
            raise InvalidInput(f"theta={self.theta} gives a vertical line (infinite slope)")


def generate_domain(spec: DomainSpec) -> NDArray[np.float64]:
    rng = np.random.default_rng(spec.seed)
    lo, hi = spec.x_range
    x = rng.uniform(lo, hi, spec.n)
    eps = rng.normal(0.0, spec.sigma, spec.n) if spec.sigma > 0 else np.zeros(spec.n)
    slope = math.tan(wrap_angle(spec.theta))
    return np.column_stack((x, slope * x + eps))


def mse(line, test: ArrayLike) -> float:
    """Mean squared vertical residual of ``line`` on ``test``."""
    a, b = line
    pts = as_point_set(test, "test")
    r = pts[:, 1] - a * pts[:, 0] - b
    return float(np.mean(r * r))


def variation(mse_target_only: float, mse_adapted: float) -> float:
    """Relative gain ``mse_target_only / mse_adapted - 1``; positive when adaptation wins.

    A perfect adapted fit gives ``inf`` unless the target-only fit is perfect too (then 0).
    """
    if mse_adapted == 0.0:
        return 0.0 if mse_target_only == 0.0 else math.inf
    return mse_target_only / mse_adapted - 1.0


class TrialOutcome(NamedTuple):
    mse_target_only: float
    mse_adapted: float


def run_single_trial(
    theta: float,
    sigma: float,
    n_s: int,
    n_t: int,
    n_test: int = 1000,
    config: AdaptationConfig | None = None,
    seed: int = 0,
    x_range: tuple[float, float] = (0.0, 10.0),
) -> TrialOutcome:
    config = config or AdaptationConfig()
    source = generate_domain(DomainSpec(0.0, sigma, n_s, x_range, derive_seed(seed, 0)))
    target = generate_domain(DomainSpec(theta, sigma, n_t, x_range, derive_seed(seed, 1)))
    test = generate_domain(DomainSpec(theta, sigma, n_test, x_range, derive_seed(seed, 2)))
    adapted = adapt_regression(source, target, replace(config, seed=derive_seed(seed, 3)))
    return TrialOutcome(mse(fit_ols(target), test), mse(adapted, test))


@dataclass(frozen=True)
class ExperimentResult:
    """Summary of one grid cell; medians are over runs that did not fail."""

    cell: dict
    median_mse_target_only: float
    median_mse_adapted: float
    median_variation: float
    n_runs: int
    n_failed: int
    mse_target_only: tuple[float, ...] = field(default=(), repr=False)
    mse_adapted: tuple[float, ...] = field(default=(), repr=False)
    variations: tuple[float, ...] = field(default=(), repr=False)

    def quartiles(self, which: str = "adapted") -> tuple[float, float]:
        values = {"adapted": self.mse_adapted, "target_only": self.mse_target_only,
                  "variation": self.variations}[which]
        if not values:
            return (math.nan, math.nan)
        q1, q3 = np.quantile(np.asarray(values), [0.25, 0.75])
        return float(q1), float(q3)


def _trial_task(args):
    kwargs, seed = args
    try:
        return run_single_trial(seed=seed, **kwargs)
    except AdaptationFailed:
        return None


def _summarise(cell, outcomes) -> ExperimentResult:
    ok = [o for o in outcomes if o is not None]
    n_failed = len(outcomes) - len(ok)
    if ok:
        t = tuple(o.mse_target_only for o in ok)
        a = tuple(o.mse_adapted for o in ok)
        v = tuple(variation(x, y) for x, y in ok)
        med = (float(np.median(t)), float(np.median(a)), float(np.median(v)))
    else:
        t = a = v = ()
        med = (math.nan, math.nan, math.nan)
    return ExperimentResult(cell, *med, n_runs=len(outcomes), n_failed=n_failed,
                            mse_target_only=t, mse_adapted=a, variations=v)


def _run_cells(cells, runs, seed, jobs):
    """``cells`` is a list of (cell label, run_single_trial kwargs)."""
    if runs < 1:
        raise InvalidInput(f"runs must be >= 1, got {runs}")
    tasks = [
        (kwargs, derive_seed(seed, ci, r))
        for ci, (_, kwargs) in enumerate(cells)
        for r in range(runs)
    ]
    if jobs is not None and jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            outcomes = list(pool.map(_trial_task, tasks, chunksize=max(1, len(tasks) // (8 * jobs))))
    else:
        outcomes = [_trial_task(t) for t in tasks]
    return [
        _summarise(label, outcomes[ci * runs:(ci + 1) * runs])
        for ci, (label, _) in enumerate(cells)
    ]


def run_ns_sweep(
    ns_values: Sequence[int] = NS_SWEEP_VALUES,
    runs: int = 1000,
    theta: float = math.pi / 4,
    n_t: int = 10,
    sigma: float = 1.0,
    config: AdaptationConfig | None = None,
    seed: int = 0,
    n_test: int = 1000,
    x_range: tuple[float, float] = (0.0, 10.0),
    jobs: int | None = None,
) -> list[ExperimentResult]:
    """Vary the source size with angle, noise and target size held fixed."""
    if len(ns_values) == 0:
        raise InvalidInput("ns_values is empty")
    config = config or AdaptationConfig()
    cells = [
        ({"n_s": int(n_s)},
         dict(theta=theta, sigma=sigma, n_s=int(n_s), n_t=n_t, n_test=n_test,
              config=config, x_range=x_range))
        for n_s in ns_values
    ]
    return _run_cells(cells, runs, seed, jobs)


def run_theta_sigma_grid(
    thetas: Sequence[float] = GRID_THETAS,
    sigmas: Sequence[float] = GRID_SIGMAS,
    runs: int = 100,
    n_s: int = 1000,
    n_t: int = 50,
    config: AdaptationConfig | None = None,
    seed: int = 0,
    n_test: int = 1000,
    x_range: tuple[float, float] = (0.0, 10.0),
    jobs: int | None = None,
) -> list[ExperimentResult]:
    """Median variation on every (theta, sigma) cell, theta-major order."""
    if len(thetas) == 0 or len(sigmas) == 0:
        raise InvalidInput("theta and sigma grids must be non-empty")
    config = config or AdaptationConfig()
    cells = [
        ({"theta": float(th), "sigma": float(sg)},
         dict(theta=th, sigma=sg, n_s=n_s, n_t=n_t, n_test=n_test, config=config,
              x_range=x_range))
        for th in thetas
        for sg in sigmas
    ]
    return _run_cells(cells, runs, seed, jobs)
