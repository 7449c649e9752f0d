"""The seeded Monte Carlo engine and the prediction comparator."""

import math

import numpy as np
import pytest

from randsteps.montecarlo import (
    GEOMETRIES,
    ComparisonReport,
    ExperimentSpec,
    MonteCarloEstimate,
    compare,
    estimate,
)
from randsteps.predictors import Prediction, prediction_for
from randsteps.sampling import Spectrum


class TestExperimentSpec:
    def test_geometries_exported(self):
        assert "sphere" in GEOMETRIES and "operator_product" in GEOMETRIES

    def test_rejects_unknown_geometry(self):
        with pytest.raises(ValueError, match="unknown geometry"):
            ExperimentSpec("torus", 5, (0.5,), 10, 1)

    def test_rejects_bad_trials(self):
        with pytest.raises(ValueError, match="trials"):
            ExperimentSpec("sphere", 5, (0.5,), 0, 1)

    def test_rejects_bad_seed(self):
        with pytest.raises(ValueError, match="64-bit"):
            ExperimentSpec("sphere", 5, (0.5,), 10, -1)

    def test_rejects_small_sphere_dimension(self):
        with pytest.raises(ValueError, match=">= 3"):
            ExperimentSpec("sphere", 2, (0.5,), 10, 1)

    def test_rejects_observable_outside_operator(self):
        with pytest.raises(ValueError, match="observable"):
            ExperimentSpec("sphere", 5, (0.5,), 10, 1, observable="cosine")

    def test_operator_defaults_to_cosine(self):
        spec = ExperimentSpec("operator", 3, Spectrum([1.0, 2.0, 3.0]), 10, 1)
        assert spec.observable == "cosine"

    def test_operator_spectrum_length_checked(self):
        with pytest.raises(ValueError, match="does not match"):
            ExperimentSpec("operator", 4, Spectrum([1.0, 2.0, 3.0]), 10, 1)

    def test_operator_takes_one_spectrum(self):
        s = Spectrum([1.0, 2.0])
        with pytest.raises(ValueError, match="exactly one"):
            ExperimentSpec("operator", 2, [s, s], 10, 1)

    def test_monomial_kind_checked(self):
        with pytest.raises(ValueError, match="monomial"):
            ExperimentSpec("monomial", 5, "x1_6", 10, 1)

    def test_marginal_power_checked(self):
        with pytest.raises(ValueError, match="positive integer"):
            ExperimentSpec("marginal", 5, 0, 10, 1)

    def test_schedule_canonicalized(self):
        spec = ExperimentSpec("flat", 5, [1, 2], 10, 1)
        assert spec.schedule == (1.0, 2.0)


class TestEstimate:
    def test_worker_count_never_changes_results(self):
        spec = ExperimentSpec("sphere", 10, (0.7, 1.1), 5000, 77)
        one = estimate(spec, workers=1)
        assert estimate(spec, workers=2) == one
        assert estimate(spec, workers=8) == one

    def test_rerun_bitwise(self):
        spec = ExperimentSpec("hyperbolic", 8, (0.5, 0.5), 3000, 13)
        assert estimate(spec) == estimate(spec)

    def test_seed_changes_results(self):
        a = estimate(ExperimentSpec("flat", 10, (1.0, 1.0), 2000, 1))
        b = estimate(ExperimentSpec("flat", 10, (1.0, 1.0), 2000, 2))
        assert a.mean != b.mean

    def test_single_step_sphere_deterministic(self):
        est = estimate(ExperimentSpec("sphere", 12, (math.pi / 3,), 100, 5))
        assert est.mean == math.cos(math.pi / 3)
        assert est.sample_std == 0.0
        assert est.std_error == 0.0

    def test_std_error_scales_with_trials(self):
        small = estimate(ExperimentSpec("flat", 20, (1.0, 1.0, 1.0), 4096, 31))
        large = estimate(ExperimentSpec("flat", 20, (1.0, 1.0, 1.0), 16384, 31))
        assert small.std_error / large.std_error == pytest.approx(2.0, rel=0.05)

    def test_single_trial_flagged(self):
        est = estimate(ExperimentSpec("flat", 6, (1.0, 2.0), 1, 9))
        assert est.insufficient_trials
        assert est.sample_std == 0.0 and est.std_error == 0.0

    def test_marginal_squares_the_monomial_coordinate(self):
        # same seed, same draws: E[t^2] sampling is the x1_sq monomial
        mono = estimate(ExperimentSpec("monomial", 10, "x1_sq", 3000, 44))
        marg = estimate(ExperimentSpec("marginal", 10, 2, 3000, 44))
        assert mono.mean == marg.mean

    def test_operator_scalar_spectrum_exact(self):
        spec = ExperimentSpec("operator", 5, Spectrum((1.0,) * 5), 500, 3)
        est = estimate(spec)
        assert est.mean == 1.0 and est.sample_std == 0.0

    def test_monomial_moment_agrees(self):
        spec = ExperimentSpec("monomial", 10, "x1_sq", 40000, 91)
        est = estimate(spec)
        assert abs(est.mean - 0.1) < 5 * est.std_error


class TestCompare:
    def test_pass_on_deterministic_exact_match(self):
        pred = prediction_for("sphere", (math.pi / 3,), 12)
        est = estimate(ExperimentSpec("sphere", 12, (math.pi / 3,), 50, 5))
        report = compare(pred, est)
        assert report.verdict == "pass"
        assert report.z_mean == 0.0
        assert report.std_ratio is None  # sigma_exact is 0 for one step

    def test_zero_std_error_mismatch_is_infinite_z(self):
        pred = Prediction("x", 0.9, sigma_exact=None, sigma_bound=None, deviation_order="o")
        est = MonteCarloEstimate(mean=1.0, sample_std=0.0, std_error=0.0, trials=100, seed=1)
        report = compare(pred, est)
        assert report.verdict == "fail"
        assert report.z_mean == math.inf

    def test_std_gate(self):
        pred = Prediction("x", 0.0, sigma_exact=1.0, sigma_bound=None, deviation_order="o")
        good = MonteCarloEstimate(mean=0.0, sample_std=1.05, std_error=0.01, trials=100, seed=1)
        bad = MonteCarloEstimate(mean=0.0, sample_std=1.5, std_error=0.01, trials=100, seed=1)
        assert compare(pred, good).verdict == "pass"
        report = compare(pred, bad)
        assert report.verdict == "fail"
        assert report.std_ratio == pytest.approx(1.5)

    def test_require_std_without_sigma_is_indeterminate(self):
        pred = Prediction("x", 0.0, sigma_exact=None, sigma_bound=None, deviation_order="o")
        est = MonteCarloEstimate(mean=0.0, sample_std=1.0, std_error=0.01, trials=100, seed=1)
        assert compare(pred, est, require_std=True).verdict == "indeterminate"
        assert compare(pred, est).verdict == "pass"

    def test_std_comparison_needs_two_trials(self):
        pred = Prediction("x", 0.0, sigma_exact=1.0, sigma_bound=None, deviation_order="o")
        est = MonteCarloEstimate(
            mean=0.0, sample_std=0.0, std_error=0.0, trials=1, seed=1,
            insufficient_trials=True,
        )
        with pytest.raises(ValueError, match="2 trials"):
            compare(pred, est)

    def test_rejects_bad_thresholds(self):
        pred = Prediction("x", 0.0, sigma_exact=None, sigma_bound=None, deviation_order="o")
        est = MonteCarloEstimate(mean=0.0, sample_std=1.0, std_error=0.1, trials=10, seed=1)
        with pytest.raises(ValueError, match="z_threshold"):
            compare(pred, est, z_threshold=0.0)
        with pytest.raises(ValueError, match="std_tolerance"):
            compare(pred, est, std_tolerance=-1.0)

    def test_z_threshold_boundary(self):
        pred = Prediction("x", 0.0, sigma_exact=None, sigma_bound=None, deviation_order="o")
        est = MonteCarloEstimate(mean=0.39, sample_std=1.0, std_error=0.1, trials=100, seed=1)
        assert compare(pred, est, z_threshold=4.0).verdict == "pass"
        est2 = MonteCarloEstimate(mean=0.41, sample_std=1.0, std_error=0.1, trials=100, seed=1)
        assert compare(pred, est2, z_threshold=4.0).verdict == "fail"

    def test_report_carries_inputs(self):
        pred = prediction_for("flat", (1.0, 1.0), 50)
        est = estimate(ExperimentSpec("flat", 50, (1.0, 1.0), 5000, 17))
        report = compare(pred, est)
        assert isinstance(report, ComparisonReport)
        assert report.prediction is pred
        assert report.estimate is est
        assert report.verdict == "pass"


class TestMonteCarloEstimateValidation:
    def test_rejects_negative_spread(self):
        with pytest.raises(ValueError, match=">= 0"):
            MonteCarloEstimate(mean=0.0, sample_std=-1.0, std_error=0.0, trials=2, seed=1)

    def test_rejects_std_error_above_sample_std(self):
        with pytest.raises(ValueError, match="exceed"):
            MonteCarloEstimate(mean=0.0, sample_std=0.1, std_error=0.2, trials=2, seed=1)
