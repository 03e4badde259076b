"""Estimators of the squared-radius distribution from projected data.

The observable is the squared projected radius ``Y = X1^2 + X2^2`` of a
spherically symmetric point in 3-D.  Writing ``F`` for the distribution
function of the squared 3-D radius and ``V`` for the tail transform (pi^2
times the upper-tail integral of the radial density), the estimators are:

* ``naive_tail``       unbiased plug-in estimate of ``V``; it has infinite
                       spikes at the data points and is not monotone.
* ``isotonic_tail``    L2 projection of the naive tail estimate onto
                       nonincreasing functions, computed as the right
                       derivative of the LCM of its integral.
* ``naive_cdf``        plug-in estimate of ``F`` obtained from the naive
                       tail estimate; closed form via arcsines.
* ``isotonic_cdf``     nondecreasing estimate of ``F`` induced by the
                       isotonic tail estimate; a pure-jump function.
* ``gcm_cdf``          nondecreasing L2 projection of the naive CDF
                       estimate, computed as the right derivative of the
                       GCM of its running integral on an evaluation grid.

``integrated_naive_tail`` and ``integrated_naive_cdf`` are the exact
running integrals of the two naive estimators (closed forms; both stay
finite across the spike locations) and are the curves whose hulls define
the isotonized estimators.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError, SingularEvaluationError
from .geometry import KnotCurve, StepFunction, gcm_lower_hull, lcm_upper_hull, right_derivative

__all__ = [
    "SquaredRadiusSample",
    "EstimatorKind",
    "naive_tail",
    "integrated_naive_tail",
    "isotonic_tail",
    "naive_cdf",
    "isotonic_cdf",
    "integrated_naive_cdf",
    "gcm_cdf",
    "eval_estimator",
    "fit_step_estimator",
    "nudge_off_data",
    "DEFAULT_GRID_REFINEMENT",
]

DEFAULT_GRID_REFINEMENT = 16

_CHUNK = 256  # grid rows per broadcast block in pairwise kernels


@dataclass(frozen=True, eq=False)
class SquaredRadiusSample:
    """Sorted sample of squared projected radii with tied values merged.

    ``y`` is the full sorted sample; ``unique``/``counts`` hold the distinct
    values and their multiplicities.  All values must be strictly positive
    and finite.
    """

    y: np.ndarray

    def __post_init__(self):
        y = np.asarray(self.y, dtype=float).ravel()
        if y.size == 0:
            raise InvalidInputError("sample must be nonempty")
        if not np.all(np.isfinite(y)):
            raise InvalidInputError("sample values must be finite")
        if np.any(y <= 0):
            raise InvalidInputError("sample values must be strictly positive")
        y = np.sort(y)
        unique, counts = np.unique(y, return_counts=True)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "unique", unique)
        object.__setattr__(self, "counts", counts)

    @property
    def n(self) -> int:
        return self.y.size

    @property
    def max_value(self) -> float:
        return float(self.y[-1])

    def is_data_point(self, x: float) -> bool:
        i = np.searchsorted(self.unique, x)
        return i < self.unique.size and self.unique[i] == x

    def edf(self) -> StepFunction:
        """Empirical distribution function of the squared projected radii."""
        values = np.cumsum(self.counts) / self.n
        return StepFunction(
            knots=self.unique,
            values=values,
            left_value=0.0,
            domain_start=0.0,
            monotone="nondecreasing",
        )


class EstimatorKind(enum.Enum):
    """The five estimators this package exposes."""

    NAIVE_TAIL = "naive-tail"
    ISO_TAIL = "iso-tail"
    NAIVE_CDF = "naive-cdf"
    ISO_CDF = "iso-cdf"
    GCM_CDF = "gcm-cdf"

    @property
    def is_cdf(self) -> bool:
        return self in (EstimatorKind.NAIVE_CDF, EstimatorKind.ISO_CDF, EstimatorKind.GCM_CDF)

    @property
    def is_naive(self) -> bool:
        return self in (EstimatorKind.NAIVE_TAIL, EstimatorKind.NAIVE_CDF)

    @property
    def naive_partner(self) -> "EstimatorKind | None":
        """The unconstrained estimator of the same target, if this one is
        shape-constrained."""
        if self is EstimatorKind.ISO_TAIL:
            return EstimatorKind.NAIVE_TAIL
        if self in (EstimatorKind.ISO_CDF, EstimatorKind.GCM_CDF):
            return EstimatorKind.NAIVE_CDF
        return None


def _check_eval_point(x: float, name: str = "x") -> float:
    x = float(x)
    if not np.isfinite(x) or x < 0:
        raise InvalidInputError(f"{name} must be finite and >= 0")
    return x


def naive_tail(sample: SquaredRadiusSample, y: float) -> float:
    """Unbiased plug-in estimate of the tail transform at ``y``.

    Mean of ``1/sqrt(Y_i - y)`` over data points above ``y``.  The value at
    a data point is infinite, which is reported as an error.
    """
    y = _check_eval_point(y, "y")
    if sample.is_data_point(y):
        raise SingularEvaluationError(f"naive tail estimate is infinite at data point {y!r}")
    return float(_naive_tail_many(sample, np.array([y]))[0])


def _naive_tail_many(sample: SquaredRadiusSample, ys: np.ndarray) -> np.ndarray:
    z, c = sample.unique, sample.counts
    out = np.empty(ys.shape, dtype=float)
    for i0 in range(0, ys.size, _CHUNK):
        blk = ys[i0 : i0 + _CHUNK, None]
        diff = z[None, :] - blk
        mask = diff > 0
        with np.errstate(invalid="ignore", divide="ignore"):
            terms = np.where(mask, 1.0 / np.sqrt(np.where(mask, diff, 1.0)), 0.0)
        out[i0 : i0 + _CHUNK] = terms @ c
    return out / sample.n


def _integrated_tail_kernel(xs: np.ndarray, z: np.ndarray, c: np.ndarray, n: int) -> np.ndarray:
    """``(2/n) sum_i [sqrt(Y_i) - sqrt((Y_i - x)_+)]`` for sorted ``xs``.

    Sorting lets each block skip the columns with ``y <= x`` entirely, which
    halves the pairwise work when evaluating at the sample's own knots.
    """
    total_sqrt = float(np.sqrt(z) @ c)
    k = np.searchsorted(z, xs, side="right")
    out = np.full(xs.shape, total_sqrt)
    for i0 in range(0, xs.size, _CHUNK):
        i1 = min(i0 + _CHUNK, xs.size)
        lo = k[i0]
        zz, cc = z[lo:], c[lo:]
        if zz.size == 0:
            continue
        blk = xs[i0:i1, None]
        d = zz[None, :] - blk
        np.maximum(d, 0.0, out=d)
        np.sqrt(d, out=d)
        out[i0:i1] -= d @ cc
    return out * (2.0 / n)


def integrated_naive_tail(sample: SquaredRadiusSample, x) -> float | np.ndarray:
    """Running integral of the naive tail estimate from 0 to ``x``.

    Equals ``(2/n) sum_i [sqrt(Y_i) - sqrt((Y_i - x)_+)]``: nondecreasing,
    0 at 0, constant for ``x`` beyond the largest observation.
    """
    scalar = np.isscalar(x) or np.ndim(x) == 0
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    if not np.all(np.isfinite(xs)) or np.any(xs < 0):
        raise InvalidInputError("x must be finite and >= 0")
    order = np.argsort(xs, kind="stable")
    out = np.empty(xs.shape, dtype=float)
    out[order] = _integrated_tail_kernel(xs[order], sample.unique, sample.counts, sample.n)
    return float(out[0]) if scalar else out


def isotonic_tail(sample: SquaredRadiusSample) -> StepFunction:
    """Nonincreasing L2 projection of the naive tail estimate.

    Right derivative of the LCM of the integrated naive tail estimate.
    The integral is convex between consecutive data values, so its LCM is
    determined by the values at ``{0} + distinct data values`` alone.
    """
    knots = np.concatenate([[0.0], sample.unique])
    heights = np.concatenate([[0.0], integrated_naive_tail(sample, sample.unique)])
    step = right_derivative(lcm_upper_hull(KnotCurve(knots, heights)))
    # Hull comparisons are on exact cross products; the slope divisions can
    # disagree by one ulp, so repair sign and order at that scale.
    values = np.minimum.accumulate(np.maximum(step.values, 0.0))
    return StepFunction(
        knots=step.knots,
        values=values,
        left_value=float(values[0]),
        domain_start=0.0,
        monotone="nonincreasing",
    )


def naive_cdf(sample: SquaredRadiusSample, x: float) -> float:
    """Plug-in estimate of the squared-radius distribution function.

    Closed form ``(2/pi) [ mean_i arcsin sqrt(min(1, x/Y_i))
    - sqrt(x) * naive_tail(x) ]``; 0 at 0, exactly 1 above the largest
    observation, and generally not monotone in between.
    """
    x = _check_eval_point(x)
    if sample.is_data_point(x):
        raise SingularEvaluationError(f"naive CDF estimate diverges at data point {x!r}")
    return float(_naive_cdf_many(sample, np.array([x]))[0])


def _naive_cdf_many(sample: SquaredRadiusSample, xs: np.ndarray) -> np.ndarray:
    z, c = sample.unique, sample.counts
    out = np.empty(xs.shape, dtype=float)
    for i0 in range(0, xs.size, _CHUNK):
        blk = xs[i0 : i0 + _CHUNK, None]
        # arcsin sqrt(min(1, x/y)) == arctan2(sqrt(min(x, y)), sqrt((y - x)+))
        arc = np.arctan2(
            np.sqrt(np.minimum(blk, z[None, :])),
            np.sqrt(np.maximum(z[None, :] - blk, 0.0)),
        ) @ c
        out[i0 : i0 + _CHUNK] = arc
    out /= sample.n
    out -= np.sqrt(xs) * _naive_tail_many(sample, xs)
    return (2.0 / np.pi) * out


def isotonic_cdf(sample: SquaredRadiusSample, clamp: bool = False) -> StepFunction:
    """Nondecreasing CDF estimate induced by the isotonic tail estimate.

    A pure-jump function: ``1 + (2/pi) * sum over jump locations z > x of
    sqrt(z) * (jump of the isotonic tail at z)``.  Jumps strictly above the
    evaluation point count, making the result right-continuous.  The value
    beyond the largest observation is exactly 1; near 0 the value may be
    negative, and ``clamp=True`` replaces it with ``max(., 0)``.
    """
    tail = isotonic_tail(sample)
    k, v = tail.knots, tail.values
    jump_at = k[1:]
    jumps = np.diff(v)
    contrib = np.sqrt(jump_at) * jumps
    # reverse cumulative sum: value on [k_j, k_{j+1}) collects jumps beyond k_j
    tail_sums = np.concatenate([np.cumsum(contrib[::-1])[::-1], [0.0]])
    values_full = 1.0 + (2.0 / np.pi) * tail_sums
    f = StepFunction(
        knots=jump_at,
        values=values_full[1:],
        left_value=float(values_full[0]),
        domain_start=0.0,
        monotone="nondecreasing",
    )
    if clamp:
        f = StepFunction(
            knots=f.knots,
            values=np.maximum(f.values, 0.0),
            left_value=max(f.left_value, 0.0),
            domain_start=0.0,
            monotone="nondecreasing",
        )
    return f


def _integrated_cdf_kernel(xs: np.ndarray, z: np.ndarray, c: np.ndarray, n: int) -> np.ndarray:
    """Sum of per-observation antiderivatives of the naive CDF estimate.

    For one observation at ``y`` the antiderivative of its contribution is
    ``(x - 1.5 y) arcsin sqrt(x/y) + 1.5 sqrt(x (y - x))`` while ``x < y``
    and ``pi (x/2 - 0.75 y)`` afterwards; both branches meet at ``x = y``.
    ``xs`` must be sorted ascending.  The hot loop below runs inside every
    resampling replicate, hence the preallocated buffers and in-place ops.
    """
    cum_c = np.concatenate([[0.0], np.cumsum(c)])
    cum_cz = np.concatenate([[0.0], np.cumsum(c * z)])
    k = np.searchsorted(z, xs, side="right")
    out = np.pi * (0.5 * xs * cum_c[k] - 0.75 * cum_cz[k])
    for i0 in range(0, xs.size, _CHUNK):
        i1 = min(i0 + _CHUNK, xs.size)
        lo = k[i0]  # xs sorted, so z[lo:] covers every y > x in this block
        zz, cc = z[lo:], c[lo:]
        if zz.size == 0:
            continue
        blk = xs[i0:i1, None]
        sx = np.sqrt(blk)
        d = zz[None, :] - blk
        m = d > 0.0
        np.maximum(d, 0.0, out=d)
        np.sqrt(d, out=d)                  # sqrt((y - x)+)
        # arcsin sqrt(x/y) == arctan2(sqrt(x), sqrt(y - x)) on y > x, and
        # arctan2 is several times faster than arcsin
        ang = np.arctan2(sx, d)
        t = blk - 1.5 * zz[None, :]
        t *= ang
        d *= 1.5 * sx                      # 1.5 sqrt(x (y - x)+)
        t += d
        t *= m                             # only y > x contributes here
        out[i0:i1] += t @ cc
    return out * (2.0 / (np.pi * n))


def integrated_naive_cdf(sample: SquaredRadiusSample, x) -> float | np.ndarray:
    """Running integral of the naive CDF estimate from 0 to ``x``.

    Exact closed form (see ``_integrated_cdf_kernel``); continuous
    everywhere despite the integrable spikes of the naive CDF estimate,
    and with unit slope beyond the largest observation.
    """
    scalar = np.isscalar(x) or np.ndim(x) == 0
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    if not np.all(np.isfinite(xs)) or np.any(xs < 0):
        raise InvalidInputError("x must be finite and >= 0")
    order = np.argsort(xs, kind="stable")
    out = np.empty(xs.shape, dtype=float)
    out[order] = _integrated_cdf_kernel(xs[order], sample.unique, sample.counts, sample.n)
    return float(out[0]) if scalar else out


def _gcm_grid(sample: SquaredRadiusSample, refinement: int) -> np.ndarray:
    base = np.concatenate([[0.0], sample.unique])
    if refinement <= 0:
        return base
    frac = np.arange(1, refinement + 1) / (refinement + 1)
    interior = base[:-1, None] + np.diff(base)[:, None] * frac[None, :]
    return np.unique(np.concatenate([base, interior.ravel()]))


def gcm_cdf(
    sample: SquaredRadiusSample,
    grid_refinement: int = DEFAULT_GRID_REFINEMENT,
    clamp: bool = False,
) -> StepFunction:
    """Nondecreasing L2 projection of the naive CDF estimate.

    Right derivative of the GCM of the integrated naive CDF estimate,
    computed on a grid of the distinct data values plus ``grid_refinement``
    equally spaced interior points per gap.  The integral has exact unit
    slope beyond the largest observation and the GCM touches it there, so
    the value on ``[max(Y), inf)`` is exactly 1.  The touch points of the
    GCM need not be data values, which is why the grid is refined; a finer
    grid changes the result less and less (self-convergence).

    ``clamp=True`` clips to ``[0, 1]``, which yields a valid distribution
    function.
    """
    if int(grid_refinement) != grid_refinement or grid_refinement < 1:
        raise InvalidInputError("grid_refinement must be an integer >= 1")
    grid = _gcm_grid(sample, int(grid_refinement))
    heights = integrated_naive_cdf(sample, grid)
    hull = gcm_lower_hull(KnotCurve(grid, heights))
    # chord slopes are <= 1 and nondecreasing up to division rounding
    slopes = np.maximum.accumulate(np.minimum(hull.slopes(), 1.0))
    values = np.concatenate([slopes, [1.0]])
    if clamp:
        values = np.clip(values, 0.0, 1.0)
    return StepFunction(
        knots=hull.knots,
        values=values,
        left_value=float(values[0]),
        domain_start=0.0,
        monotone="nondecreasing",
    )


def fit_step_estimator(
    kind: EstimatorKind,
    sample: SquaredRadiusSample,
    gcm_refinement: int = DEFAULT_GRID_REFINEMENT,
) -> StepFunction:
    """Construct the step-function estimator for a shape-constrained kind."""
    if kind is EstimatorKind.ISO_TAIL:
        return isotonic_tail(sample)
    if kind is EstimatorKind.ISO_CDF:
        return isotonic_cdf(sample)
    if kind is EstimatorKind.GCM_CDF:
        return gcm_cdf(sample, grid_refinement=gcm_refinement)
    raise InvalidInputError(f"{kind} is not a step-function estimator")


def eval_estimator(
    kind: EstimatorKind,
    sample: SquaredRadiusSample,
    x0: float,
    gcm_refinement: int = DEFAULT_GRID_REFINEMENT,
) -> float:
    """Evaluate any estimator kind at a single point ``x0 > 0``."""
    x0 = float(x0)
    if not np.isfinite(x0) or x0 <= 0:
        raise InvalidInputError("x0 must be finite and > 0")
    if kind is EstimatorKind.NAIVE_TAIL:
        return naive_tail(sample, x0)
    if kind is EstimatorKind.NAIVE_CDF:
        return naive_cdf(sample, x0)
    return float(fit_step_estimator(kind, sample, gcm_refinement)(x0))


def nudge_off_data(sample: SquaredRadiusSample, x0: float) -> tuple[float, int]:
    """Move ``x0`` off the data by the smallest representable offsets.

    Returns the perturbed point and the number of one-ulp nudges applied
    (0 when ``x0`` is already evaluable).
    """
    nudges = 0
    x = float(x0)
    while sample.is_data_point(x):
        x = float(np.nextafter(x, np.inf))
        nudges += 1
    return x, nudges
