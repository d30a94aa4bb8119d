import math

from scipy import stats

from ..entities import Estimate


def wilson_interval(successes: int, trials: int, confidence: float = 0.95) -> Estimate:
    """Binomial proportion with its Wilson score interval"""
    if not 0.0 < confidence < 1.0:
        raise ValueError("Confidence level must lie in (0, 1)")
    if successes < 0 or trials < 0 or successes > trials:
        raise ValueError("Need 0 <= successes <= trials")
    if trials == 0:
        return Estimate(value=0.0, lower=0.0, upper=1.0, successes=0, trials=0)

    z = float(stats.norm.ppf(1.0 - (1.0 - confidence) / 2.0))
    p_hat = successes / trials
    denominator = 1.0 + z**2 / trials
    center = (p_hat + z**2 / (2.0 * trials)) / denominator
    margin = (z / denominator) * math.sqrt(p_hat * (1.0 - p_hat) / trials + z**2 / (4.0 * trials**2))
    return Estimate(
        value=p_hat,
        lower=max(0.0, center - margin),
        upper=min(1.0, center + margin),
        successes=int(successes),
        trials=int(trials),
    )


def pooled_estimate(first: Estimate, second: Estimate) -> Estimate:
    """Equal-weight mean of two independent proportions.

    Each parity counts once regardless of how many conclusive rounds it has.
    The lower and upper half-widths of the two Wilson intervals are combined
    in quadrature and halved, as for the mean of two independent estimates.
    """
    value = 0.5 * (first.value + second.value)
    below = 0.5 * math.hypot(first.value - first.lower, second.value - second.lower)
    above = 0.5 * math.hypot(first.upper - first.value, second.upper - second.value)
    return Estimate(
        value=value,
        lower=max(0.0, value - below),
        upper=min(1.0, value + above),
        successes=first.successes + second.successes,
        trials=first.trials + second.trials,
    )


def binomial_sigma(probability: float, trials: int) -> float:
    return math.sqrt(probability * (1.0 - probability) / trials)
