"""Isotonic estimation of a squared-radius distribution from projected data.

Given squared projected radii of a spherically symmetric 3-D point cloud,
this package estimates the distribution function of the squared 3-D radius
with naive plug-in and shape-constrained (isotonized) estimators, builds
pointwise bootstrap confidence intervals, and ships Monte Carlo harnesses
that check the nonstandard sqrt(n / log n) limit behavior at desk scale.
"""

__version__ = "0.1.0"

from .asymptotics import (
    CoverageReport,
    McReport,
    coverage_study,
    limit_variance,
    mc_sampling_distribution,
)
from .bootstrap import (
    BootstrapPlan,
    CiResult,
    bootstrap_roots,
    build_ci,
    ci_curve,
    convergence_scale,
    resample,
)
from .errors import IngestionError, InvalidInputError, SingularEvaluationError
from .estimators import (
    EstimatorKind,
    SquaredRadiusSample,
    eval_estimator,
    gcm_cdf,
    integrated_naive_cdf,
    integrated_naive_tail,
    isotonic_cdf,
    isotonic_tail,
    naive_cdf,
    naive_tail,
)
from .geometry import (
    KnotCurve,
    StepFunction,
    gcm_lower_hull,
    lcm_upper_hull,
    right_derivative,
    step_integral,
)
from .models import gaussian3d, sample_y, truth, uniform_ball
from .streams import derive_seed, substream

__all__ = [
    "__version__",
    "BootstrapPlan",
    "CiResult",
    "CoverageReport",
    "EstimatorKind",
    "IngestionError",
    "InvalidInputError",
    "KnotCurve",
    "McReport",
    "SingularEvaluationError",
    "SquaredRadiusSample",
    "StepFunction",
    "bootstrap_roots",
    "build_ci",
    "ci_curve",
    "convergence_scale",
    "coverage_study",
    "derive_seed",
    "eval_estimator",
    "gaussian3d",
    "gcm_cdf",
    "gcm_lower_hull",
    "integrated_naive_cdf",
    "integrated_naive_tail",
    "isotonic_cdf",
    "isotonic_tail",
    "lcm_upper_hull",
    "limit_variance",
    "mc_sampling_distribution",
    "naive_cdf",
    "naive_tail",
    "resample",
    "right_derivative",
    "sample_y",
    "step_integral",
    "substream",
    "truth",
    "uniform_ball",
]
