"""Conventional bootstrap and pointwise confidence intervals.

Resamples are drawn from the empirical distribution of the data (sampling
with replacement).  The root for a replicate is the difference between the
estimator on the resample and on the original data at the evaluation
point; intervals invert the root quantiles around the point estimate.

Replicate ``b`` always uses the random substream keyed by ``(seed, b)``,
so root vectors are bit-identical regardless of execution order or worker
count.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidInputError
from .estimators import (
    EstimatorKind,
    SquaredRadiusSample,
    _naive_cdf_many,
    _naive_tail_many,
    fit_step_estimator,
    nudge_off_data,
)
from .parallel import parallel_map
from .streams import substream

__all__ = [
    "BootstrapPlan",
    "CiResult",
    "resample",
    "convergence_scale",
    "bootstrap_roots",
    "build_ci",
    "ci_curve",
    "BOOTSTRAP_GCM_REFINEMENT",
]

# coarser integrated-CDF grid inside resampling loops; the self-convergence
# of the GCM estimator bounds the induced error
BOOTSTRAP_GCM_REFINEMENT = 4

INTERVAL_STYLES = ("root-basic", "percentile")


@dataclass(frozen=True)
class BootstrapPlan:
    """Replicate count, miscoverage, target kind/point, seed and style."""

    B: int
    alpha: float
    kind: EstimatorKind
    x0: float
    seed: int
    interval_style: str = "root-basic"
    gcm_refinement: int = BOOTSTRAP_GCM_REFINEMENT

    def __post_init__(self):
        if int(self.B) != self.B or self.B < 1:
            raise InvalidInputError("B must be an integer >= 1")
        if not (0.0 < self.alpha < 1.0):
            raise InvalidInputError("alpha must lie strictly inside (0, 1)")
        if not isinstance(self.kind, EstimatorKind):
            raise InvalidInputError("kind must be an EstimatorKind")
        if not (np.isfinite(self.x0) and self.x0 > 0):
            raise InvalidInputError("x0 must be finite and > 0")
        if self.interval_style not in INTERVAL_STYLES:
            raise InvalidInputError(f"interval_style must be one of {INTERVAL_STYLES}")


@dataclass(frozen=True, eq=False)
class CiResult:
    """Point estimate with a bootstrap interval and its root vector.

    ``convergence_scale`` records sqrt(log n / n) for diagnostics; it
    cancels between root and interval and never enters the bounds.
    """

    point_estimate: float
    lower: float
    upper: float
    roots: np.ndarray = field(repr=False)
    convergence_scale: float


def resample(sample: SquaredRadiusSample, rng: np.random.Generator) -> SquaredRadiusSample:
    """Sample ``n`` values with replacement from the observed values."""
    idx = rng.integers(0, sample.n, sample.n)
    return SquaredRadiusSample(sample.y[idx])


def convergence_scale(n: int) -> float:
    """The nonstandard normalization sqrt(log n / n), natural logarithm."""
    if int(n) != n or n < 2:
        raise InvalidInputError("n must be an integer >= 2")
    return math.sqrt(math.log(n) / n)


def _eval_with_nudge(kind, sample, xs, gcm_refinement):
    """Evaluate an estimator at points, nudging naive kinds off resampled
    data values.  Returns (values, number of nudged points)."""
    xs = np.atleast_1d(np.asarray(xs, dtype=float))
    nudged = 0
    if kind.is_naive:
        pts = np.empty_like(xs)
        for i, x in enumerate(xs):
            pts[i], k = nudge_off_data(sample, x)
            nudged += 1 if k else 0
        f = _naive_tail_many if kind is EstimatorKind.NAIVE_TAIL else _naive_cdf_many
        return f(sample, pts), nudged
    step = fit_step_estimator(kind, sample, gcm_refinement)
    return step(xs), 0


def _root_batch(args):
    sample, kind, xs, seed, b_range, gcm_refinement = args
    center, _ = _eval_with_nudge(kind, sample, xs, gcm_refinement)
    rows = np.empty((len(b_range), len(xs)))
    nudged = 0
    for i, b in enumerate(b_range):
        star = resample(sample, substream(seed, b))
        est, k = _eval_with_nudge(kind, star, xs, gcm_refinement)
        rows[i] = est - center
        nudged += k
    return rows, nudged


def _root_matrix(sample, kind, xs, B, seed, gcm_refinement, threads=1):
    """B x len(xs) matrix of roots, plus the count of nudged evaluations."""
    chunks = _index_chunks(B, threads)
    results = parallel_map(
        _root_batch,
        [(sample, kind, xs, seed, rng, gcm_refinement) for rng in chunks],
        threads,
    )
    roots = np.vstack([r for r, _ in results])
    nudged = sum(k for _, k in results)
    return roots, nudged


def _index_chunks(total: int, threads: int) -> list[range]:
    if threads <= 1:
        return [range(total)]
    step = max(1, math.ceil(total / (4 * threads)))
    return [range(i, min(i + step, total)) for i in range(0, total, step)]


def bootstrap_roots(sample: SquaredRadiusSample, plan: BootstrapPlan, threads: int = 1) -> np.ndarray:
    """Root vector ``est*(x0) - est(x0)`` over ``plan.B`` resamples."""
    roots, _ = _root_matrix(
        sample, plan.kind, [plan.x0], plan.B, plan.seed, plan.gcm_refinement, threads
    )
    return roots[:, 0]


def _order_statistic(sorted_roots: np.ndarray, p: float) -> float:
    # ceil(p*B) order statistic, 1-based, no interpolation; the tiny nudge
    # keeps exact-integer products from rounding up a rank
    b = sorted_roots.size
    rank = math.ceil(p * b - 1e-9)
    return float(sorted_roots[min(max(rank, 1), b) - 1])


def build_ci(point_estimate: float, roots, alpha: float, style: str = "root-basic") -> CiResult:
    """Interval from root quantiles.

    ``root-basic`` reflects the roots around the estimate:
    ``[est - q_{1-a/2}, est - q_{a/2}]``; ``percentile`` adds them instead.
    Quantiles are plain order statistics of rank ``ceil(p B)``.
    """
    roots = np.asarray(roots, dtype=float)
    if roots.size == 0:
        raise InvalidInputError("roots must be nonempty")
    if not (0.0 < alpha < 1.0):
        raise InvalidInputError("alpha must lie strictly inside (0, 1)")
    if style not in INTERVAL_STYLES:
        raise InvalidInputError(f"style must be one of {INTERVAL_STYLES}")
    srt = np.sort(roots)
    q_lo = _order_statistic(srt, alpha / 2)
    q_hi = _order_statistic(srt, 1 - alpha / 2)
    if style == "root-basic":
        lower, upper = point_estimate - q_hi, point_estimate - q_lo
    else:
        lower, upper = point_estimate + q_lo, point_estimate + q_hi
    return CiResult(
        point_estimate=float(point_estimate),
        lower=float(lower),
        upper=float(upper),
        roots=roots,
        convergence_scale=float("nan"),
    )


def ci_curve(
    sample: SquaredRadiusSample,
    kind: EstimatorKind,
    grid,
    B: int,
    alpha: float,
    seed: int,
    style: str = "root-basic",
    gcm_refinement: int = BOOTSTRAP_GCM_REFINEMENT,
    threads: int = 1,
) -> list[CiResult]:
    """Pointwise intervals along a grid.

    Each replicate draws one resample and evaluates the whole curve on it,
    so the band comes from ``B`` resampled curves and preserves the
    dependence across grid points.
    """
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size == 0:
        raise InvalidInputError("grid must be a nonempty 1-d array")
    if np.any(grid <= 0) or not np.all(np.isfinite(grid)):
        raise InvalidInputError("grid points must be finite and > 0")
    if np.any(np.diff(grid) <= 0):
        raise InvalidInputError("grid must be strictly increasing")
    results, _ = ci_curve_with_diagnostics(
        sample, kind, grid, B, alpha, seed, style, gcm_refinement, threads
    )
    return results


def ci_curve_with_diagnostics(
    sample, kind, grid, B, alpha, seed, style="root-basic",
    gcm_refinement=BOOTSTRAP_GCM_REFINEMENT, threads=1,
):
    """Like :func:`ci_curve`, also returning the nudged-evaluation count."""
    grid = np.asarray(grid, dtype=float)
    scale = convergence_scale(sample.n) if sample.n >= 2 else float("nan")
    center, nudged_center = _eval_with_nudge(kind, sample, grid, gcm_refinement)
    roots, nudged = _root_matrix(sample, kind, grid, B, seed, gcm_refinement, threads)
    out = []
    for j in range(grid.size):
        ci = build_ci(center[j], roots[:, j], alpha, style)
        out.append(
            CiResult(
                point_estimate=ci.point_estimate,
                lower=ci.lower,
                upper=ci.upper,
                roots=ci.roots,
                convergence_scale=scale,
            )
        )
    return out, nudged + nudged_center
