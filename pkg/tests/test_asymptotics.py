import math

import numpy as np
import pytest

from radialcdf.asymptotics import (
    coverage_study,
    limit_variance,
    mc_sampling_distribution,
)
from radialcdf.errors import InvalidInputError
from radialcdf.estimators import EstimatorKind
from radialcdf.models import gaussian3d, uniform_ball
from radialcdf.streams import derive_seed

BALL = uniform_ball(1.0)
G_HALF = 1.5 * math.sqrt(0.5)  # projected density of the unit ball at 0.5


class TestLimitVariance:
    def test_ball_values(self):
        assert limit_variance(EstimatorKind.NAIVE_TAIL, 0.5, BALL) == pytest.approx(
            1.0606602, abs=1e-6
        )
        assert limit_variance(EstimatorKind.ISO_TAIL, 0.5, BALL) == pytest.approx(
            0.5303301, abs=1e-6
        )

    @pytest.mark.parametrize("model", [BALL, uniform_ball(2.0), gaussian3d(1.3)])
    @pytest.mark.parametrize("x0", [0.1, 0.5, 0.9])
    def test_half_variance_identities(self, model, x0):
        naive_t = limit_variance(EstimatorKind.NAIVE_TAIL, x0, model)
        iso_t = limit_variance(EstimatorKind.ISO_TAIL, x0, model)
        naive_c = limit_variance(EstimatorKind.NAIVE_CDF, x0, model)
        iso_c = limit_variance(EstimatorKind.ISO_CDF, x0, model)
        gcm_c = limit_variance(EstimatorKind.GCM_CDF, x0, model)
        assert iso_t / naive_t == 0.5
        assert iso_c / naive_c == 0.5
        assert iso_c == gcm_c

    def test_cdf_formula(self):
        assert limit_variance(EstimatorKind.NAIVE_CDF, 0.5, BALL) == pytest.approx(
            4 / math.pi**2 * 0.5 * G_HALF
        )

    def test_zero_density_rejected(self):
        with pytest.raises(InvalidInputError):
            limit_variance(EstimatorKind.ISO_TAIL, 1.5, BALL)


class TestMcSamplingDistribution:
    def test_smoke_two_reps(self):
        rep = mc_sampling_distribution(BALL, EstimatorKind.ISO_TAIL, n=60, x0=0.5,
                                       reps=2, seed=1)
        assert rep.reps == 2 and rep.n == 60
        assert rep.theoretical_variance == pytest.approx(G_HALF / 2)

    def test_reports_are_reproducible(self):
        a = mc_sampling_distribution(BALL, EstimatorKind.ISO_CDF, n=80, x0=0.4,
                                     reps=10, seed=3)
        b = mc_sampling_distribution(BALL, EstimatorKind.ISO_CDF, n=80, x0=0.4,
                                     reps=10, seed=3)
        assert a == b

    def test_ratio_only_for_constrained_kinds(self):
        naive = mc_sampling_distribution(BALL, EstimatorKind.NAIVE_TAIL, n=60, x0=0.5,
                                         reps=5, seed=2)
        iso = mc_sampling_distribution(BALL, EstimatorKind.ISO_TAIL, n=60, x0=0.5,
                                       reps=5, seed=2)
        assert naive.variance_ratio_iso_over_naive is None
        assert iso.variance_ratio_iso_over_naive is not None

    def test_centering_at_moderate_n(self):
        rep = mc_sampling_distribution(BALL, EstimatorKind.ISO_TAIL, n=500, x0=0.5,
                                       reps=300, seed=11)
        band = 4 * math.sqrt(rep.standardized_variance / rep.reps)
        assert abs(rep.standardized_mean) < band

    def test_iso_variance_tracks_limit(self):
        rep = mc_sampling_distribution(BALL, EstimatorKind.ISO_TAIL, n=500, x0=0.5,
                                       reps=300, seed=12)
        assert 0.6 * rep.theoretical_variance < rep.standardized_variance \
            < 1.7 * rep.theoretical_variance

    def test_validation(self):
        with pytest.raises(InvalidInputError):
            mc_sampling_distribution(BALL, EstimatorKind.ISO_TAIL, n=60, x0=0.5,
                                     reps=1, seed=0)
        with pytest.raises(InvalidInputError):
            mc_sampling_distribution(BALL, EstimatorKind.ISO_TAIL, n=60, x0=-1.0,
                                     reps=5, seed=0)

    def test_to_dict_round(self):
        rep = mc_sampling_distribution(BALL, EstimatorKind.GCM_CDF, n=50, x0=0.5,
                                       reps=3, seed=5)
        d = rep.to_dict()
        assert d["kind"] == "gcm-cdf"
        assert set(d) >= {
            "standardized_mean", "standardized_variance", "theoretical_variance",
            "ks_distance_to_normal", "variance_ratio_iso_over_naive",
        }

    def test_sampling_ks_to_limit_decreases_with_n(self):
        # slow-rate sanity check on the isotonic tail estimator; the naive
        # kinds stall here because their standardized errors keep a
        # quadratic tail that the KS distance to the limit normal sees
        chain = []
        for n in (200, 1000, 5000):
            vals = [
                mc_sampling_distribution(
                    BALL, EstimatorKind.ISO_TAIL, n, 0.5, reps=60,
                    seed=derive_seed(91, mac),
                ).ks_distance_to_normal
                for mac in range(20)
            ]
            chain.append(float(np.mean(vals)))
        assert chain[0] > chain[1] > chain[2]


class TestCoverageStudy:
    def test_nominal_field(self):
        rep = coverage_study(BALL, EstimatorKind.ISO_CDF, n=50, x0=0.5, B=20,
                             alpha=0.2, reps=5, seed=2)
        assert rep.nominal == pytest.approx(0.8)
        assert 0.0 <= rep.empirical <= 1.0
        assert rep.mean_interval_width > 0

    def test_half_alpha_coverage(self):
        # with alpha = 0.5 the empirical coverage sits near 1/2
        reps = 150
        rep = coverage_study(BALL, EstimatorKind.ISO_CDF, n=150, x0=0.5, B=120,
                             alpha=0.5, reps=reps, seed=21)
        se = math.sqrt(0.25 / reps)
        assert abs(rep.empirical - 0.5) < 3 * se

    def test_deterministic_across_threads(self):
        kw = dict(n=60, x0=0.5, B=25, alpha=0.1, reps=8, seed=13)
        a = coverage_study(BALL, EstimatorKind.ISO_TAIL, **kw, threads=1)
        b = coverage_study(BALL, EstimatorKind.ISO_TAIL, **kw, threads=3)
        assert a == b
