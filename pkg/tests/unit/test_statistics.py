import math

import pytest
import numpy as np
from src.domain.entities import Estimate
from src.domain.statistics import binomial_sigma, pooled_estimate, wilson_interval


class TestWilsonInterval:
    """Test the Wilson score interval"""

    def test_interval_brackets_proportion(self):
        """Test the point estimate lies inside its interval"""
        estimate = wilson_interval(470, 1000)

        assert estimate.value == 0.47
        assert estimate.lower < 0.47 < estimate.upper
        assert estimate.upper - estimate.lower == pytest.approx(2 * 1.96 * binomial_sigma(0.47, 1000), rel=0.02)

    def test_bounds_are_python_floats(self):
        """Test that no numpy scalar leaks into the estimate"""
        estimate = wilson_interval(3, 10)

        assert type(estimate.lower) is float
        assert type(estimate.upper) is float

    def test_extreme_proportions_stay_in_unit_interval(self):
        """Test all or no successes"""
        assert wilson_interval(0, 50).lower == pytest.approx(0.0, abs=1e-12)
        assert wilson_interval(50, 50).upper == pytest.approx(1.0)
        assert wilson_interval(50, 50).lower > 0.9

    def test_no_trials(self):
        """Test that zero trials give the uninformative interval"""
        estimate = wilson_interval(0, 0)

        assert (estimate.lower, estimate.upper) == (0.0, 1.0)

    def test_invalid_counts(self):
        """Test more successes than trials is rejected"""
        with pytest.raises(ValueError, match="successes <= trials"):
            wilson_interval(11, 10)

    def test_invalid_confidence(self):
        """Test confidence must lie strictly between 0 and 1"""
        with pytest.raises(ValueError, match="Confidence"):
            wilson_interval(1, 10, confidence=1.0)

    @pytest.mark.parametrize("probability", [0.05, 0.47, 0.87])
    def test_coverage(self, probability):
        """Test the 95% interval covers the true proportion in at least 93% of 1000 resimulations"""
        # Arrange
        trials = 10_000
        rng = np.random.default_rng(20240611)
        successes = rng.binomial(trials, probability, size=1000)

        # Act
        covered = sum(wilson_interval(int(k), trials).contains(probability) for k in successes)

        # Assert
        assert covered >= 930


class TestPooledEstimate:
    """Test the equal-weight pooled correctness"""

    def test_equal_weight_value(self):
        """Test each parity counts once whatever its number of rounds"""
        pooled = pooled_estimate(wilson_interval(90, 100), wilson_interval(500, 1000))

        assert pooled.value == pytest.approx(0.7)
        assert pooled.successes == 590
        assert pooled.trials == 1100

    def test_half_widths_combine_in_quadrature(self):
        """Test the interval of the mean of two identical estimates shrinks by sqrt(2)"""
        single = wilson_interval(600, 1000)

        pooled = pooled_estimate(single, single)

        assert pooled.value == pytest.approx(single.value)
        assert pooled.value - pooled.lower == pytest.approx((single.value - single.lower) / math.sqrt(2))
        assert pooled.upper - pooled.value == pytest.approx((single.upper - single.value) / math.sqrt(2))

    def test_interval_within_averaged_bounds(self):
        """Test the pooled interval is never wider than the average of the two intervals"""
        first, second = wilson_interval(95, 100), wilson_interval(330, 500)

        pooled = pooled_estimate(first, second)

        assert pooled.lower >= 0.5 * (first.lower + second.lower)
        assert pooled.upper <= 0.5 * (first.upper + second.upper)

    def test_clipped_to_unit_interval(self):
        """Test the pooled bounds never leave [0, 1]"""
        certain = Estimate(value=1.0, lower=0.9, upper=1.0, successes=10, trials=10)

        pooled = pooled_estimate(certain, certain)

        assert 0.0 <= pooled.lower <= pooled.upper <= 1.0
