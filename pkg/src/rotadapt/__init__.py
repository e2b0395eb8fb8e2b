"""Domain adaptation of 2D linear regression under an unknown rotation.

The rotation is recovered by K-means compression of the source, exact
optimal transport (linear assignment) against the target, and an SVD
rotation fit; the source regression line is then rotated into the target
domain.
"""

__version__ = "0.1.0"

from .adapt import (
    AdaptationConfig,
    AdaptationReport,
    AngleEstimate,
    adapt_regression,
    adapt_regression_report,
    estimate_angle,
    fit_ols,
    median,
)
from .assign import TransportPlan, cost_matrix, optimal_transport, solve_assignment
from .cluster import KMeansConfig, kmeans
from .core import (
    AdaptationFailed,
    DegenerateInput,
    InvalidInput,
    LineCoeffs,
    Point2,
    RotadaptError,
    SizeMismatch,
    VerticalLine,
    rotation_matrix,
    wrap_angle,
)
from .rotation import estimate_rotation_svd, rotate_line, rotate_point, rotate_set
from .sim import (
    DomainSpec,
    ExperimentResult,
    generate_domain,
    mse,
    run_ns_sweep,
    run_single_trial,
    run_theta_sigma_grid,
)

__all__ = [
    "AdaptationConfig",
    "AdaptationFailed",
    "AdaptationReport",
    "AngleEstimate",
    "DegenerateInput",
    "DomainSpec",
    "ExperimentResult",
    "InvalidInput",
    "KMeansConfig",
    "LineCoeffs",
    "Point2",
    "RotadaptError",
    "SizeMismatch",
    "TransportPlan",
    "VerticalLine",
    "adapt_regression",
    "adapt_regression_report",
    "cost_matrix",
    "estimate_angle",
    "estimate_rotation_svd",
    "fit_ols",
    "generate_domain",
    "kmeans",
    "median",
    "mse",
    "optimal_transport",
    "rotate_line",
    "rotate_point",
    "rotate_set",
    "rotation_matrix",
    "run_ns_sweep",
    "run_single_trial",
    "run_theta_sigma_grid",
    "solve_assignment",
    "wrap_angle",
]
