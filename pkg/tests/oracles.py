"""Independent reference implementations used only by the tests.

Nothing in here touches the package's hull or closed-form code paths:
hulls are found by exhaustive search, integrals by adaptive quadrature
with singularity-killing substitutions, and monotone fits by scipy's
compiled PAVA.
"""

from itertools import combinations

import numpy as np
from scipy.integrate import quad
from scipy.optimize import isotonic_regression


def lcm_values_by_subsets(x, y, tol=1e-12):
    """Least concave majorant at the input knots, by exhaustive search.

    Enumerates every knot subset containing the endpoints, keeps the
    concave interpolants that majorize all points, and returns the
    pointwise minimum.
    """
    x = np.asarray(x, float)
    y = np.asarray(y, float)
    m = x.size
    interior = range(1, m - 1)
    best = np.full(m, np.inf)
    for r in range(m - 1):
        for combo in combinations(interior, r):
            idx = [0, *combo, m - 1]
            xs, ys = x[idx], y[idx]
            slopes = np.diff(ys) / np.diff(xs)
            if slopes.size > 1 and np.any(np.diff(slopes) > tol):
                continue  # not concave
            vals = np.interp(x, xs, ys)
            if np.any(vals < y - tol):
                continue  # fails to majorize
            best = np.minimum(best, vals)
    return best


def lcm_values_by_chords(x, y):
    """Least concave majorant at the knots via the max-chord identity.

    A concave majorant is above the chord of any bracketing pair, and the
    hull attains the maximum, so hull(x_j) = max over i <= j <= k of the
    chord through points i and k evaluated at x_j (pairs (j, j) give y_j).
    """
    x = np.asarray(x, float)
    y = np.asarray(y, float)
    m = x.size
    out = y.copy()
    for j in range(m):
        xi, yi = x[: j + 1, None], y[: j + 1, None]
        xk, yk = x[None, j:], y[None, j:]
        denom = xk - xi
        with np.errstate(invalid="ignore", divide="ignore"):
            chord = yi + (yk - yi) * (x[j] - xi) / denom
        chord = np.where(denom > 0, chord, -np.inf)
        cand = max(float(np.max(chord)) if chord.size else -np.inf, float(y[j]))
        out[j] = cand
    return out


def gcm_values_by_chords(x, y):
    return -lcm_values_by_chords(x, -np.asarray(y, float))


def pava_decreasing(values, weights):
    """Weighted nonincreasing isotonic fit via scipy's compiled PAVA."""
    res = isotonic_regression(np.asarray(values, float),
                              weights=np.asarray(weights, float),
                              increasing=False)
    return np.asarray(res.x)


def naive_tail_ref(y, x):
    y = np.asarray(y, float)
    m = y > x
    return float(np.sum(1.0 / np.sqrt(y[m] - x)) / y.size)


def naive_cdf_by_quadrature(y, x):
    """Naive CDF estimate via quadrature of its defining tail integral.

    Uses 1 + (2/pi) [ -sqrt(x) Vn(x) - integral_x^inf Vn(u)/(2 sqrt(u)) du ]
    where the integral is split at the data points and each subinterval is
    substituted as u = b - t^2 so the 1/sqrt(b - u) spike of Vn becomes a
    bounded integrand.
    """
    yv = np.sort(np.asarray(y, float))
    cuts = [float(x)] + [float(v) for v in yv if v > x]
    total = 0.0
    for a, b in zip(cuts[:-1], cuts[1:]):
        val, _ = quad(
            lambda t, b=b: naive_tail_ref(yv, b - t * t) / (2.0 * np.sqrt(b - t * t)) * 2.0 * t,
            0.0, np.sqrt(b - a), limit=200, epsabs=1e-11, epsrel=1e-11,
        )
        total += val
    return 1.0 + (2.0 / np.pi) * (-np.sqrt(x) * naive_tail_ref(yv, x) - total)


def integrated_cdf_by_quadrature(y, x, naive_cdf_fn):
    """Integral of the naive CDF estimate by singularity-split quadrature.

    ``naive_cdf_fn(x)`` must evaluate the estimate away from data points;
    the substitution z = b - t^2 per subinterval absorbs the integrable
    spike at the right endpoint.
    """
    yv = np.sort(np.asarray(y, float))
    cuts = [0.0] + [float(v) for v in yv if v < x] + [float(x)]
    total = 0.0
    for a, b in zip(cuts[:-1], cuts[1:]):
        if b <= a:
            continue
        val, _ = quad(
            lambda t, b=b: naive_cdf_fn(b - t * t) * 2.0 * t,
            0.0, np.sqrt(b - a), limit=200, epsabs=1e-11, epsrel=1e-11,
        )
        total += val
    return total
