from typing import Dict, Iterable, Optional

from ..entities import Arm, CountsTable, Detector, DETECTOR_PAIRS, SetupConfig
from ..errors import DomainError


SAME_SPLITTER_PAIRS = ("AB", "CD")


def path_survival(config: SetupConfig, arm: Arm, detector: Detector) -> float:
    """Survival from a verifier to one detector, split ratios excluded"""
    return (
        config.arm_transmission(arm)
        * config.beamsplitters["BS1"].excess_transmission
        * config.downstream_splitter(detector).excess_transmission
        * config.detector_spec(detector).efficiency
    )


def normalized_coincidences(
    counts: CountsTable, pairs: Optional[Iterable[str]] = None
) -> Dict[str, float]:
    """CC_ij / (SC_i SC_j) per detector pair"""
    result = {}
    for pair in pairs or DETECTOR_PAIRS:
        key = "".join(sorted(pair.upper()))
        for label in key:
            if counts.singles[label] == 0:
                raise DomainError(f"Detector {label} has zero singles, cannot normalize pair {key}")
        result[key] = counts.coincidences[key] / (counts.singles[key[0]] * counts.singles[key[1]])
    return result


def conditional_answers(counts: CountsTable) -> Dict[str, float]:
    """P(0|concl.) and P(1|concl.) from raw two-fold coincidences"""
    total = sum(counts.coincidences.values())
    if total == 0:
        raise DomainError("No coincidences recorded")
    zero = sum(counts.coincidences[pair] for pair in SAME_SPLITTER_PAIRS)
    return {"0": zero / total, "1": (total - zero) / total}
