"""Analytic ground-truth models and exact forward samplers.

A radial model describes a spherically symmetric point in 3-D through the
density ``rho`` of its squared norm.  Everything else follows analytically:

* ``squared_radius_density(z) = 2 pi sqrt(z) rho(z)`` and its CDF,
* the projected squared radius ``Y = X1^2 + X2^2`` with density
  ``projected_density`` (an Abel transform of ``rho``) and CDF
  ``projected_cdf``,
* the tail transform ``tail_transform(y) = pi^2 * integral_y^inf rho``,
  the nonincreasing function the estimators target, and its integral
  ``integrated_tail_transform``.

Sampling uses the exact representation ``Y = Z (1 - W^2)`` with ``Z`` drawn
by inverse CDF and ``W`` uniform on (-1, 1): for a uniformly distributed
direction the third coordinate is ``sqrt(Z) W``, so no trigonometry is
needed and the law of ``Y`` is exactly the projected law.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import special

from .errors import InvalidInputError
from .estimators import EstimatorKind, SquaredRadiusSample

__all__ = ["RadialModel", "UniformBall", "IsotropicGaussian", "uniform_ball", "gaussian3d",
           "sample_y", "truth", "model_from_name"]


@dataclass(frozen=True)
class RadialModel:
    """Base for analytic models; subclasses implement the evaluators.

    All evaluators accept scalars or arrays.  ``support_end`` is the upper
    end of the squared-radius support (``inf`` when unbounded).
    """

    name: str
    scale: float

    def __post_init__(self):
        if not (np.isfinite(self.scale) and self.scale > 0):
            raise InvalidInputError("scale must be a positive real")

    # subclasses override everything below
    @property
    def support_end(self) -> float:
        raise NotImplementedError

    def radial_density(self, s):
        raise NotImplementedError

    def squared_radius_density(self, z):
        return 2 * np.pi * np.sqrt(z) * self.radial_density(z)

    def squared_radius_cdf(self, z):
        raise NotImplementedError

    def squared_radius_ppf(self, u):
        raise NotImplementedError

    def projected_density(self, y):
        raise NotImplementedError

    def projected_cdf(self, y):
        raise NotImplementedError

    def tail_transform(self, y):
        raise NotImplementedError

    def integrated_tail_transform(self, x):
        raise NotImplementedError


class UniformBall(RadialModel):
    """Uniform distribution on the ball of radius ``scale``."""

    def __init__(self, radius: float):
        super().__init__(name="ball", scale=float(radius))

    @property
    def support_end(self) -> float:
        return self.scale**2

    def radial_density(self, s):
        s = np.asarray(s, dtype=float)
        r3 = self.scale**3
        return np.where((s >= 0) & (s <= self.support_end), 3.0 / (4 * np.pi * r3), 0.0)

    def squared_radius_cdf(self, z):
        z = np.asarray(z, dtype=float)
        return np.clip(z / self.support_end, 0.0, 1.0) ** 1.5

    def squared_radius_ppf(self, u):
        return self.support_end * np.asarray(u, dtype=float) ** (2.0 / 3.0)

    def projected_density(self, y):
        y = np.asarray(y, dtype=float)
        rem = np.maximum(self.support_end - y, 0.0)
        return np.where(y >= 0, 1.5 * np.sqrt(rem) / self.scale**3, 0.0)

    def projected_cdf(self, y):
        y = np.asarray(y, dtype=float)
        rem = np.clip((self.support_end - y) / self.support_end, 0.0, 1.0)
        return np.where(y >= 0, 1.0 - rem**1.5, 0.0)

    def tail_transform(self, y):
        y = np.asarray(y, dtype=float)
        rem = np.maximum(self.support_end - y, 0.0)
        return (3 * np.pi / (4 * self.scale**3)) * rem

    def integrated_tail_transform(self, x):
        x = np.asarray(x, dtype=float)
        r2 = self.support_end
        xc = np.minimum(x, r2)
        return (3 * np.pi / (4 * self.scale**3)) * (r2 * xc - 0.5 * xc**2)


class IsotropicGaussian(RadialModel):
    """Isotropic 3-D normal with standard deviation ``scale`` per axis.

    The squared radius is ``scale^2`` times a chi-square with 3 degrees of
    freedom; the projected squared radius is exponential with mean
    ``2 scale^2``.
    """

    def __init__(self, sigma: float):
        super().__init__(name="gaussian3d", scale=float(sigma))

    @property
    def support_end(self) -> float:
        return np.inf

    @property
    def _s2(self) -> float:
        return self.scale**2

    def radial_density(self, s):
        s = np.asarray(s, dtype=float)
        return np.where(s >= 0, np.exp(-s / (2 * self._s2)) / (2 * np.pi * self._s2) ** 1.5, 0.0)

    def squared_radius_cdf(self, z):
        z = np.asarray(z, dtype=float)
        return special.gammainc(1.5, np.maximum(z, 0.0) / (2 * self._s2))

    def squared_radius_ppf(self, u):
        return 2 * self._s2 * special.gammaincinv(1.5, np.asarray(u, dtype=float))

    def projected_density(self, y):
        y = np.asarray(y, dtype=float)
        return np.where(y >= 0, np.exp(-y / (2 * self._s2)) / (2 * self._s2), 0.0)

    def projected_cdf(self, y):
        y = np.asarray(y, dtype=float)
        return np.where(y >= 0, 1.0 - np.exp(-y / (2 * self._s2)), 0.0)

    def tail_transform(self, y):
        y = np.asarray(y, dtype=float)
        return np.sqrt(np.pi / 2) / self.scale * np.exp(-np.maximum(y, 0.0) / (2 * self._s2))

    def integrated_tail_transform(self, x):
        x = np.asarray(x, dtype=float)
        return self.scale * np.sqrt(2 * np.pi) * (1.0 - np.exp(-np.maximum(x, 0.0) / (2 * self._s2)))


def uniform_ball(radius: float) -> UniformBall:
    """Uniform-ball model; squared-radius support is ``[0, radius^2]``."""
    if not (np.isfinite(radius) and radius > 0):
        raise InvalidInputError("radius must be a positive real")
    return UniformBall(radius)


def gaussian3d(sigma: float) -> IsotropicGaussian:
    """Isotropic Gaussian model with per-axis standard deviation ``sigma``."""
    if not (np.isfinite(sigma) and sigma > 0):
        raise InvalidInputError("sigma must be a positive real")
    return IsotropicGaussian(sigma)


_MODEL_FACTORIES = {"ball": uniform_ball, "gaussian3d": gaussian3d}


def model_from_name(name: str, scale: float) -> RadialModel:
    try:
        factory = _MODEL_FACTORIES[name]
    except KeyError:
        raise InvalidInputError(
            f"unknown model {name!r}; choose from {sorted(_MODEL_FACTORIES)}"
        ) from None
    return factory(scale)


def sample_y(model: RadialModel, n: int, rng: np.random.Generator) -> SquaredRadiusSample:
    """Draw ``n`` squared projected radii from the model's projected law."""
    if int(n) != n or n < 1:
        raise InvalidInputError("n must be a positive integer")
    n = int(n)
    z = model.squared_radius_ppf(rng.random(n))
    w = rng.uniform(-1.0, 1.0, n)
    return SquaredRadiusSample(z * (1.0 - w * w))


def truth(model: RadialModel, kind: EstimatorKind, x0: float) -> float:
    """Analytic value targeted by an estimator kind at ``x0``."""
    if kind.is_cdf:
        return float(model.squared_radius_cdf(x0))
    return float(model.tail_transform(x0))
