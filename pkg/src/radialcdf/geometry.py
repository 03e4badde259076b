"""Step functions, knot curves, and exact upper/lower hulls.

Every isotonized estimator in this package is the right derivative of a
least concave majorant (LCM) or a greatest convex minorant (GCM) of some
piecewise-linear curve.  This module provides those three primitives plus
exact integration of piecewise-constant functions.

Conventions:

* ``StepFunction`` is right-continuous: its value at a knot is the value of
  the piece starting there.
* ``KnotCurve`` interpolates linearly between knots and extends as a
  constant beyond the first/last knot.
* Hulls are computed by a single stack pass over the sorted knots (the
  monotone-chain algorithm), which is exact and needs no tolerance.
  Adjacent segments of equal slope are merged, so hull representations are
  canonical and can be compared exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidInputError

__all__ = [
    "StepFunction",
    "KnotCurve",
    "lcm_upper_hull",
    "gcm_lower_hull",
    "right_derivative",
    "step_integral",
]


def _as_sorted_array(values, name: str) -> np.ndarray:
    arr = np.asarray(values, dtype=float)
    if arr.ndim != 1:
        raise InvalidInputError(f"{name} must be one-dimensional")
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError(f"{name} must be finite")
    if arr.size > 1 and not np.all(np.diff(arr) > 0):
        raise InvalidInputError(f"{name} must be strictly increasing")
    return arr


def _classify_monotone(values: np.ndarray) -> str | None:
    if values.size <= 1:
        return "nonincreasing"
    d = np.diff(values)
    if np.all(d <= 0):
        return "nonincreasing"
    if np.all(d >= 0):
        return "nondecreasing"
    return None


@dataclass(frozen=True, eq=False)
class StepFunction:
    """Right-continuous piecewise-constant function on ``[domain_start, inf)``.

    ``values[j]`` is the value on ``[knots[j], knots[j+1])``; the last value
    extends to infinity.  ``left_value`` is the value on
    ``[domain_start, knots[0])`` when that interval is nonempty.  A
    ``monotone`` tag of ``"nonincreasing"`` or ``"nondecreasing"`` is
    verified against the value sequence at construction.
    """

    knots: np.ndarray
    values: np.ndarray
    left_value: float
    domain_start: float = 0.0
    monotone: str | None = field(default=None)

    def __post_init__(self):
        knots = _as_sorted_array(self.knots, "knots")
        values = np.asarray(self.values, dtype=float)
        if values.shape != knots.shape:
            raise InvalidInputError("values must match knots in length")
        if not np.all(np.isfinite(values)):
            raise InvalidInputError("values must be finite")
        if not np.isfinite(self.left_value):
            raise InvalidInputError("left_value must be finite")
        if not (np.isfinite(self.domain_start) and self.domain_start >= 0):
            raise InvalidInputError("domain_start must be finite and >= 0")
        if knots.size and self.domain_start > knots[0]:
            raise InvalidInputError("domain_start must not exceed the first knot")
        object.__setattr__(self, "knots", knots)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "left_value", float(self.left_value))
        object.__setattr__(self, "domain_start", float(self.domain_start))
        if self.monotone is not None:
            if self.monotone not in ("nonincreasing", "nondecreasing"):
                raise InvalidInputError("monotone must be 'nonincreasing' or 'nondecreasing'")
            seq = values
            if knots.size and self.domain_start < knots[0]:
                seq = np.concatenate([[self.left_value], values])
            d = np.diff(seq)
            ok = np.all(d <= 0) if self.monotone == "nonincreasing" else np.all(d >= 0)
            if not ok:
                raise InvalidInputError(f"values are not {self.monotone}")

    def __call__(self, x):
        x_arr = np.asarray(x, dtype=float)
        if np.any(x_arr < self.domain_start):
            raise InvalidInputError("evaluation below domain_start")
        if self.knots.size == 0:
            out = np.full_like(x_arr, self.left_value, dtype=float)
        else:
            idx = np.searchsorted(self.knots, x_arr, side="right")
            out = np.where(idx == 0, self.left_value, self.values[np.maximum(idx - 1, 0)])
        return float(out) if np.isscalar(x) or x_arr.ndim == 0 else out

    def integral(self, a: float, b: float) -> float:
        return step_integral(self, a, b)

    def piece_edges(self) -> np.ndarray:
        """Breakpoints including the domain start: pieces live between them."""
        return np.concatenate([[self.domain_start], self.knots])


@dataclass(frozen=True, eq=False)
class KnotCurve:
    """Piecewise-linear curve through ``(knots, heights)``.

    Evaluation interpolates linearly between knots and is constant beyond
    the first and last knot.
    """

    knots: np.ndarray
    heights: np.ndarray

    def __post_init__(self):
        knots = _as_sorted_array(self.knots, "knots")
        if knots.size == 0:
            raise InvalidInputError("a KnotCurve needs at least one knot")
        heights = np.asarray(self.heights, dtype=float)
        if heights.shape != knots.shape:
            raise InvalidInputError("heights must match knots in length")
        if not np.all(np.isfinite(heights)):
            raise InvalidInputError("heights must be finite")
        object.__setattr__(self, "knots", knots)
        object.__setattr__(self, "heights", heights)

    def __call__(self, x):
        out = np.interp(np.asarray(x, dtype=float), self.knots, self.heights)
        return float(out) if np.isscalar(x) or np.ndim(x) == 0 else out

    def slopes(self) -> np.ndarray:
        if self.knots.size < 2:
            return np.empty(0)
        return np.diff(self.heights) / np.diff(self.knots)


def _upper_hull_indices(x: np.ndarray, y: np.ndarray) -> list[int]:
    # Stack pass: keep index j only while the turn at the stack top stays
    # strictly concave; equality merges collinear segments.
    stack = [0]
    for j in range(1, len(x)):
        while len(stack) >= 2:
            i1, i2 = stack[-2], stack[-1]
            if (y[i2] - y[i1]) * (x[j] - x[i2]) <= (y[j] - y[i2]) * (x[i2] - x[i1]):
                stack.pop()
            else:
                break
        stack.append(j)
    return stack


def lcm_upper_hull(curve: KnotCurve) -> KnotCurve:
    """Least concave majorant of the points of ``curve``.

    The result keeps a subset of the input knots (endpoints always), has
    strictly decreasing slopes after merging, and lies on or above every
    input point.
    """
    if curve.knots.size < 2:
        raise InvalidInputError("hull needs at least 2 knots")
    keep = _upper_hull_indices(curve.knots, curve.heights)
    return KnotCurve(curve.knots[keep], curve.heights[keep])


def gcm_lower_hull(curve: KnotCurve) -> KnotCurve:
    """Greatest convex minorant; mirror image of :func:`lcm_upper_hull`."""
    if curve.knots.size < 2:
        raise InvalidInputError("hull needs at least 2 knots")
    upper = lcm_upper_hull(KnotCurve(curve.knots, -curve.heights))
    return KnotCurve(upper.knots, -upper.heights)


def right_derivative(hull: KnotCurve) -> StepFunction:
    """Right derivative of a hull as a step function.

    The value on ``[knots[j], knots[j+1])`` is the segment slope; beyond the
    last knot the hull is constant, so the value there is 0.
    """
    if hull.knots.size < 2:
        raise InvalidInputError("right_derivative needs at least 2 knots")
    slopes = hull.slopes()
    values = np.concatenate([slopes, [0.0]])
    return StepFunction(
        knots=hull.knots,
        values=values,
        left_value=float(values[0]),
        domain_start=float(hull.knots[0]),
        monotone=_classify_monotone(values),
    )


def step_integral(f: StepFunction, a: float, b: float) -> float:
    """Exact integral of a step function over ``[a, b]``."""
    if not (np.isfinite(a) and np.isfinite(b)):
        raise InvalidInputError("integration limits must be finite")
    if a > b:
        raise InvalidInputError("integration needs a <= b")
    if a < f.domain_start:
        raise InvalidInputError("integration below domain_start")
    if a == b:
        return 0.0
    edges = np.concatenate([[a], f.knots[(f.knots > a) & (f.knots < b)], [b]])
    mids = 0.5 * (edges[:-1] + edges[1:])
    return float(np.sum(f(mids) * np.diff(edges)))
