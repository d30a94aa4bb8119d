"""Source characterization experiments run through the optics engine.

HOM: both arms feed one balanced splitter watched by two detectors.
HBT: a single arm feeds the same splitter. Correlations are zero-delay
coincidences normalized by coincidences between uncorrelated pulses.
"""
from typing import Tuple

from ..entities import Detector, HomMeasurement, OutcomeDistribution, SourceParams, UncertainValue
from ..errors import DomainError
from ..optics import OpticalNetwork, distribution_for_overlap
from ..source import hom_visibility, indistinguishability_from_visibility


DEFAULT_EFFICIENCY = 0.01


def _two_detector_network(efficiency: float, arm_survival: Tuple[float, float]) -> OpticalNetwork:
    if not 0.0 < efficiency <= 1.0:
        raise DomainError("Detection efficiency must lie in (0, 1]")
    return OpticalNetwork(
        arm_survival=arm_survival,
        bs1_split_ratio=0.5,
        upper_detection=(efficiency, 0.0),
        lower_detection=(efficiency, 0.0),
    )


def _normalized_correlation(distribution: OutcomeDistribution) -> float:
    coincidences = distribution.coincidence_probability(Detector.A, Detector.C)
    uncorrelated = distribution.click_probability(Detector.A) * distribution.click_probability(Detector.C)
    return coincidences / uncorrelated


def simulate_hom_measurement(
    source: SourceParams, efficiency: float = DEFAULT_EFFICIENCY
) -> HomMeasurement:
    """g2 at zero delay for parallel and orthogonal input polarizations.

    The signal pair interferes with the bare overlap M whatever the source's
    overlap convention, so the estimator chain inverts this experiment.
    """
    network = _two_detector_network(efficiency, (1.0, 1.0))
    parallel = distribution_for_overlap(source, network, source.indistinguishability)
    orthogonal = distribution_for_overlap(source, network, 0.0)
    return HomMeasurement(
        g2_parallel=UncertainValue(_normalized_correlation(parallel)),
        g2_perp=UncertainValue(_normalized_correlation(orthogonal)),
    )


def simulate_hbt_g2(source: SourceParams, efficiency: float = DEFAULT_EFFICIENCY) -> float:
    network = _two_detector_network(efficiency, (1.0, 0.0))
    return _normalized_correlation(distribution_for_overlap(source, network, 0.0))


def recover_indistinguishability(
    source: SourceParams, efficiency: float = DEFAULT_EFFICIENCY
) -> UncertainValue:
    """Run both experiments and apply the estimator chain to the simulated correlations"""
    visibility = hom_visibility(simulate_hom_measurement(source, efficiency))
    return indistinguishability_from_visibility(visibility, simulate_hbt_g2(source, efficiency))
