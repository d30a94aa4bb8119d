import math
from typing import List, Tuple, Union

from ..entities import (
    Arm,
    HomMeasurement,
    PhotonKind,
    SourceParams,
    UncertainValue,
    two_photon_probability,
)
from ..errors import DomainError


Number = Union[float, UncertainValue]


def _as_uncertain(value: Number) -> UncertainValue:
    if isinstance(value, UncertainValue):
        return value
    return UncertainValue(float(value))


def _require_g2(g2: float):
    if not 0.0 <= g2 < 1.0:
        raise DomainError(f"g2 must lie in [0, 1), got {g2}")


def hom_visibility(measurement: HomMeasurement) -> UncertainValue:
    """V = (g_perp - g_par) / g_perp with first-order uncertainty"""
    g_par = measurement.g2_parallel
    g_perp = measurement.g2_perp
    if g_perp.value <= 0.0:
        raise DomainError("g2 for orthogonal polarizations must be positive")
    value = (g_perp.value - g_par.value) / g_perp.value
    d_par = -1.0 / g_perp.value
    d_perp = g_par.value / g_perp.value**2
    uncertainty = math.hypot(d_par * g_par.uncertainty, d_perp * g_perp.uncertainty)
    return UncertainValue(value, uncertainty)


def indistinguishability_from_visibility(visibility: Number, g2: Number) -> UncertainValue:
    """M = V (1 + 2 g2)"""
    v = _as_uncertain(visibility)
    g = _as_uncertain(g2)
    _require_g2(g.value)
    value = v.value * (1.0 + 2.0 * g.value)
    uncertainty = math.hypot((1.0 + 2.0 * g.value) * v.uncertainty, 2.0 * v.value * g.uncertainty)
    return UncertainValue(value, uncertainty)


def visibility_from_indistinguishability(indistinguishability: float, g2: float) -> float:
    """V = M / (1 + 2 g2)"""
    _require_g2(g2)
    return indistinguishability / (1.0 + 2.0 * g2)


EmissionProfile = List[Tuple[Tuple[PhotonKind, ...], float]]


def emission_profile(params: SourceParams, arm: Arm) -> EmissionProfile:
    """Per-pulse photon content of one arm: a signal photon, plus a noise photon with probability p2"""
    p2 = two_photon_probability(params.g2)
    profile: EmissionProfile = [((PhotonKind.SIGNAL,), 1.0 - p2)]
    if p2 > 0.0:
        profile.append(((PhotonKind.SIGNAL, PhotonKind.NOISE), p2))
    return profile
