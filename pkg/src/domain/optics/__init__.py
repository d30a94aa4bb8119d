"""Photon propagation through the prover's three-splitter, four-detector network.

A photon leaving BS1 through the upper port reaches BS2 (detectors A, B), the
lower port feeds BS3 (detectors C, D). Distributions over click patterns are
16-vectors indexed by detector bit mask; independent photons combine by
OR-convolution because detectors have threshold semantics.
"""
from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np

from ..entities import (
    Arm,
    ClickPattern,
    Detector,
    DETECTORS,
    NO_PATTERN,
    OutcomeDistribution,
    PATTERN_COUNT,
    PhotonKind,
    PhotonRecord,
    PolarizationQubit,
    RoundSpec,
    SetupConfig,
    SourceParams,
)
from ..errors import DomainError, PreconditionError
from ..randomness import RoundStream
from ..source import emission_profile


OR_TABLE = np.bitwise_or.outer(np.arange(PATTERN_COUNT), np.arange(PATTERN_COUNT))
VACUUM = np.eye(PATTERN_COUNT)[0]
DETECTOR_BITS = np.array([int(d) for d in DETECTORS])

# Port codes used by the sampler
NO_PORT, UPPER_PORT, LOWER_PORT = 0, 1, 2

# Layout of the optics slice of a round stream
_NOISE_EMISSION = slice(0, 2)
_SIGNAL_SURVIVAL = slice(2, 4)
_NOISE_SURVIVAL = slice(4, 6)
_SIGNAL_ROUTING = slice(6, 8)
_NOISE_ROUTING = slice(8, 10)
_PAIR_OUTCOME = 10
_DOWNSTREAM = slice(11, 15)
_DARK_CLICKS = slice(15, 19)
OPTICS_UNIFORMS = 20


def or_convolve(first: np.ndarray, second: np.ndarray) -> np.ndarray:
    """Pattern distribution of the union of two independent click sets"""
    combined = np.zeros(PATTERN_COUNT)
    np.add.at(combined, OR_TABLE, np.outer(first, second))
    return combined


def _require_normalized(qubit: PolarizationQubit):
    norm = abs(qubit.h) ** 2 + abs(qubit.v) ** 2
    if abs(norm - 1.0) > 1e-12:
        raise PreconditionError(f"Polarization qubit is not normalized (norm {norm!r})")


def polarization_overlap(q0: PolarizationQubit, q1: PolarizationQubit) -> float:
    """|<q0|q1>|^2"""
    _require_normalized(q0)
    _require_normalized(q1)
    return min(1.0, abs(q0.inner(q1)) ** 2)


def two_photon_bs_distribution(T: float, overlap: float) -> Tuple[float, float, float]:
    """(both-upper, both-lower, split) for one interfering pair entering opposite ports"""
    if not 0.0 < T < 1.0:
        raise DomainError(f"Split ratio must lie in (0, 1), got {T}")
    if not 0.0 <= overlap <= 1.0:
        raise DomainError(f"Overlap must lie in [0, 1], got {overlap}")
    R = 1.0 - T
    bunched = T * R * (1.0 + overlap)
    split = T * T + R * R - 2.0 * T * R * overlap
    return bunched, bunched, split


@dataclass(frozen=True)
class OpticalNetwork:
    """Per-photon survival and routing probabilities of the prover's network"""
    arm_survival: Tuple[float, float]
    bs1_split_ratio: float
    upper_detection: Tuple[float, float]
    lower_detection: Tuple[float, float]
    dark_click_probabilities: Tuple[float, float, float, float] = (0.0, 0.0, 0.0, 0.0)

    def __post_init__(self):
        if not 0.0 < self.bs1_split_ratio < 1.0:
            raise DomainError("BS1 split ratio must lie in (0, 1)")
        for first, second in (self.upper_detection, self.lower_detection):
            if first < 0 or second < 0 or first + second > 1.0 + 1e-12:
                raise DomainError("Port detection probabilities must form a sub-distribution")

    @classmethod
    def from_setup(cls, setup: SetupConfig) -> "OpticalNetwork":
        bs1 = setup.beamsplitters["BS1"]
        bs2 = setup.beamsplitters["BS2"]
        bs3 = setup.beamsplitters["BS3"]
        efficiency = {d: setup.detector_spec(d).efficiency for d in DETECTORS}
        return cls(
            arm_survival=tuple(
                setup.arm_transmission(arm) * bs1.excess_transmission for arm in (Arm.V0, Arm.V1)
            ),
            bs1_split_ratio=bs1.split_ratio_upper,
            upper_detection=(
                bs2.split_ratio_upper * bs2.excess_transmission * efficiency[Detector.A],
                bs2.split_ratio_lower * bs2.excess_transmission * efficiency[Detector.B],
            ),
            lower_detection=(
                bs3.split_ratio_upper * bs3.excess_transmission * efficiency[Detector.C],
                bs3.split_ratio_lower * bs3.excess_transmission * efficiency[Detector.D],
            ),
            dark_click_probabilities=tuple(
                setup.detector_spec(d).dark_click_probability for d in DETECTORS
            ),
        )

    def upper_probability(self, arm: Arm) -> float:
        """Chance a lone photon from this arm leaves BS1 through the upper port"""
        if arm is Arm.V0:
            return self.bs1_split_ratio
        return 1.0 - self.bs1_split_ratio

    def port_vector(self, port: int) -> np.ndarray:
        if port == UPPER_PORT:
            (p_first, p_second), (first, second) = self.upper_detection, (Detector.A, Detector.B)
        else:
            (p_first, p_second), (first, second) = self.lower_detection, (Detector.C, Detector.D)
        vector = np.zeros(PATTERN_COUNT)
        vector[int(first)] = p_first
        vector[int(second)] = p_second
        vector[0] = 1.0 - p_first - p_second
        return vector

    def single_photon_vector(self, arm: Arm) -> np.ndarray:
        """Pattern distribution of a lone photon that reached BS1"""
        up = self.upper_probability(arm)
        return up * self.port_vector(UPPER_PORT) + (1.0 - up) * self.port_vector(LOWER_PORT)

    def independent_photon_vector(self, arm: Arm) -> np.ndarray:
        """Lone photon including its arm loss"""
        survival = self.arm_survival[0 if arm is Arm.V0 else 1]
        return survival * self.single_photon_vector(arm) + (1.0 - survival) * VACUUM

    def pair_vector(self, overlap: float) -> np.ndarray:
        """Two signal photons that both reached BS1 and interfere there"""
        upper = self.port_vector(UPPER_PORT)
        lower = self.port_vector(LOWER_PORT)
        both_upper, both_lower, split = two_photon_bs_distribution(self.bs1_split_ratio, overlap)
        return (
            both_upper * or_convolve(upper, upper)
            + both_lower * or_convolve(lower, lower)
            + split * or_convolve(upper, lower)
        )

    def dark_count_vector(self) -> np.ndarray:
        vector = VACUUM.copy()
        for bit, p in zip(DETECTOR_BITS, self.dark_click_probabilities):
            if p > 0.0:
                click = np.zeros(PATTERN_COUNT)
                click[0], click[bit] = 1.0 - p, p
                vector = or_convolve(vector, click)
        return vector


def signal_photons(round: RoundSpec) -> Tuple[PhotonRecord, PhotonRecord]:
    return (
        PhotonRecord.signal(Arm.V0, round.qubit_0),
        PhotonRecord.signal(Arm.V1, round.qubit_1),
    )


def round_overlap(source: SourceParams, round: RoundSpec) -> float:
    """Mode overlap with which the two signal photons of a round interfere"""
    first, second = signal_photons(round)
    return min(1.0, first.mode_overlap(second, source.interfering_overlap))


def distribution_for_overlap(
    source: SourceParams, network: OpticalNetwork, overlap: float
) -> OutcomeDistribution:
    """Exhaustive enumeration of emissions, losses and routings for a given signal overlap"""
    eta0, eta1 = network.arm_survival
    signals = (
        eta0 * eta1 * network.pair_vector(overlap)
        + eta0 * (1.0 - eta1) * network.single_photon_vector(Arm.V0)
        + (1.0 - eta0) * eta1 * network.single_photon_vector(Arm.V1)
        + (1.0 - eta0) * (1.0 - eta1) * VACUUM
    )
    total = signals
    for arm in (Arm.V0, Arm.V1):
        # noise photons never interfere, so each one is an independent factor
        contamination = np.zeros(PATTERN_COUNT)
        for photons, probability in emission_profile(source, arm):
            outcome = VACUUM
            for kind in photons:
                if kind is PhotonKind.NOISE:
                    outcome = or_convolve(outcome, network.independent_photon_vector(arm))
            contamination = contamination + probability * outcome
        total = or_convolve(total, contamination)
    total = or_convolve(total, network.dark_count_vector())
    return OutcomeDistribution(total)


def exact_outcome_distribution(
    source: SourceParams, setup: SetupConfig, round: RoundSpec
) -> OutcomeDistribution:
    """Deterministic click-pattern distribution of one round"""
    network = OpticalNetwork.from_setup(setup)
    return distribution_for_overlap(source, network, round_overlap(source, round))


def sample_patterns(
    source: SourceParams,
    network: OpticalNetwork,
    overlaps: np.ndarray,
    uniforms: np.ndarray,
) -> np.ndarray:
    """Click masks for a batch of rounds, one row of optics uniforms per round"""
    overlaps = np.asarray(overlaps, dtype=float)
    u = np.asarray(uniforms, dtype=float)
    if u.ndim != 2 or u.shape[1] < OPTICS_UNIFORMS or u.shape[0] != overlaps.shape[0]:
        raise ValueError("Need one row of optics uniforms per round")
    n = u.shape[0]
    T = network.bs1_split_ratio
    eta = np.array(network.arm_survival)
    upper = np.array([T, 1.0 - T])

    noise_emitted = u[:, _NOISE_EMISSION] < source.p2
    signal_alive = u[:, _SIGNAL_SURVIVAL] < eta
    noise_alive = noise_emitted & (u[:, _NOISE_SURVIVAL] < eta)

    # photon columns: signal V0, signal V1, noise V0, noise V1
    ports = np.full((n, 4), NO_PORT, dtype=np.int8)
    ports[:, 0:2] = np.where(
        signal_alive, np.where(u[:, _SIGNAL_ROUTING] < upper, UPPER_PORT, LOWER_PORT), NO_PORT
    )
    ports[:, 2:4] = np.where(
        noise_alive, np.where(u[:, _NOISE_ROUTING] < upper, UPPER_PORT, LOWER_PORT), NO_PORT
    )

    pair = signal_alive.all(axis=1)
    bunched = T * (1.0 - T) * (1.0 + overlaps)
    v = u[:, _PAIR_OUTCOME]
    both_upper = pair & (v < bunched)
    both_lower = pair & (v >= bunched) & (v < 2.0 * bunched)
    split = pair & (v >= 2.0 * bunched)
    ports[both_upper, 0:2] = UPPER_PORT
    ports[both_lower, 0:2] = LOWER_PORT
    ports[split, 0] = UPPER_PORT
    ports[split, 1] = LOWER_PORT

    (p_a, p_b), (p_c, p_d) = network.upper_detection, network.lower_detection
    is_upper = ports == UPPER_PORT
    is_lower = ports == LOWER_PORT
    first_probability = np.where(is_upper, p_a, np.where(is_lower, p_c, 0.0))
    second_probability = np.where(is_upper, p_b, np.where(is_lower, p_d, 0.0))
    first_bit = np.where(is_upper, int(Detector.A), int(Detector.C))
    second_bit = np.where(is_upper, int(Detector.B), int(Detector.D))
    w = u[:, _DOWNSTREAM]
    hit_first = w < first_probability
    hit_second = ~hit_first & (w < first_probability + second_probability)
    bits = np.where(hit_first, first_bit, 0) | np.where(hit_second, second_bit, 0)
    masks = np.bitwise_or.reduce(bits, axis=1)

    dark = u[:, _DARK_CLICKS] < np.array(network.dark_click_probabilities)
    masks |= np.bitwise_or.reduce(np.where(dark, DETECTOR_BITS, 0), axis=1)
    return masks.astype(np.int16)


def sample_outcome(
    source: SourceParams, setup: SetupConfig, round: RoundSpec, rng_stream: RoundStream
) -> ClickPattern:
    """One click pattern drawn with the round's own optics uniforms"""
    network = OpticalNetwork.from_setup(setup)
    masks = sample_patterns(
        source,
        network,
        np.array([round_overlap(source, round)]),
        rng_stream.optics[np.newaxis, :],
    )
    return ClickPattern(int(masks[0]))


def empirical_distribution(masks: Sequence[int]) -> OutcomeDistribution:
    """Relative frequencies of the recorded click patterns; rounds without a pattern are skipped"""
    masks = np.asarray(masks, dtype=np.int64)
    masks = masks[masks != NO_PATTERN]
    if len(masks) == 0:
        raise PreconditionError("No click patterns recorded")
    counts = np.bincount(masks, minlength=PATTERN_COUNT)
    return OutcomeDistribution(counts / counts.sum())
