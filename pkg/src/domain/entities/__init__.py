import math
from dataclasses import dataclass, field, replace
from enum import Enum, IntFlag
from typing import Dict, Iterable, Iterator, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.constants import speed_of_light
from scipy.optimize import brentq

from ..errors import ConfigError, DomainError, PreconditionError, UnsupportedRegimeError


NORMALIZATION_TOLERANCE = 1e-12
DISTRIBUTION_TOLERANCE = 1e-10
PATTERN_COUNT = 16


class Arm(str, Enum):
    """Verifier arm feeding one input of BS1"""
    V0 = "V0"
    V1 = "V1"


class Detector(IntFlag):
    """Threshold detector label, usable as a bit in a click mask"""
    A = 1
    B = 2
    C = 4
    D = 8


DETECTORS: Tuple[Detector, ...] = (Detector.A, Detector.B, Detector.C, Detector.D)
DETECTOR_PAIRS: Tuple[str, ...] = ("AB", "AC", "AD", "BC", "BD", "CD")
UPPER_DETECTORS = (Detector.A, Detector.B)
LOWER_DETECTORS = (Detector.C, Detector.D)


class PhotonKind(str, Enum):
    SIGNAL = "signal"
    NOISE = "noise"


class Basis(str, Enum):
    """Polarization basis of a protocol round"""
    HV = "HV"
    DA = "DA"
    RL = "RL"


class Parity(str, Enum):
    PARALLEL = "parallel"
    ORTHOGONAL = "orthogonal"


class ProverAnswer(str, Enum):
    """Classical response z sent back to both verifiers"""
    ZERO = "0"
    ONE = "1"
    INCONCLUSIVE = "inc"


class Verdict(str, Enum):
    ACCEPT = "accept"
    REJECT = "reject"
    INDETERMINATE = "indeterminate"


# Integer codes used in columnar transcripts
BASES: Tuple[Basis, ...] = (Basis.HV, Basis.DA, Basis.RL)
PARITIES: Tuple[Parity, ...] = (Parity.PARALLEL, Parity.ORTHOGONAL)
ANSWERS: Tuple[ProverAnswer, ...] = (
    ProverAnswer.ZERO,
    ProverAnswer.ONE,
    ProverAnswer.INCONCLUSIVE,
)
NO_PATTERN = -1


def two_photon_probability(g2: float) -> float:
    """Per-pulse two-photon probability p2 solving g2 = 2 p2 / (1 + p2)^2"""
    if not 0.0 <= g2 <= 0.5:
        raise UnsupportedRegimeError(
            f"g2 = {g2} has no two-photon probability in [0, 1); supported range is [0, 0.5]"
        )
    if g2 == 0.0:
        return 0.0
    return brentq(lambda p: 2.0 * p / (1.0 + p) ** 2 - g2, 0.0, 1.0, xtol=1e-15)


@dataclass(frozen=True)
class PolarizationQubit:
    """Pure single-photon polarization state in the H/V basis"""
    h: complex
    v: complex

    def __post_init__(self):
        object.__setattr__(self, "h", complex(self.h))
        object.__setattr__(self, "v", complex(self.v))
        norm = abs(self.h) ** 2 + abs(self.v) ** 2
        if abs(norm - 1.0) > NORMALIZATION_TOLERANCE:
            raise PreconditionError(f"Polarization qubit is not normalized (norm {norm!r})")

    def inner(self, other: "PolarizationQubit") -> complex:
        """<self|other>"""
        return self.h.conjugate() * other.h + self.v.conjugate() * other.v

    @classmethod
    def from_label(cls, label: str) -> "PolarizationQubit":
        try:
            h, v = _LABELLED_STATES[label]
        except KeyError:
            raise ValueError(f"Unknown polarization label '{label}'") from None
        return cls(h, v)


_S = 1.0 / math.sqrt(2.0)
_LABELLED_STATES: Dict[str, Tuple[complex, complex]] = {
    "H": (1.0, 0.0),
    "V": (0.0, 1.0),
    "D": (_S, _S),
    "A": (_S, -_S),
    "R": (_S, 1j * _S),
    "L": (_S, -1j * _S),
}
BASIS_STATES: Dict[Basis, Tuple[str, str]] = {
    Basis.HV: ("H", "V"),
    Basis.DA: ("D", "A"),
    Basis.RL: ("R", "L"),
}


SIGNAL_OVERLAP_CLASS = 0


@dataclass(frozen=True)
class PhotonRecord:
    """A photon entering the prover's network"""
    origin_arm: Arm
    kind: PhotonKind
    polarization: PolarizationQubit
    overlap_class: Optional[int] = None

    def __post_init__(self):
        if self.kind is PhotonKind.NOISE and self.overlap_class is not None:
            raise ValueError("Noise photons cannot share a temporal overlap class")
        if self.kind is PhotonKind.SIGNAL and self.overlap_class is None:
            raise ValueError("Signal photons need a temporal overlap class")

    @classmethod
    def signal(cls, arm: Arm, polarization: PolarizationQubit) -> "PhotonRecord":
        return cls(arm, PhotonKind.SIGNAL, polarization, SIGNAL_OVERLAP_CLASS)

    def mode_overlap(self, other: "PhotonRecord", indistinguishability: float) -> float:
        """Total mode overlap with another photon: temporal overlap times polarization overlap"""
        if self.overlap_class is None or self.overlap_class != other.overlap_class:
            return 0.0
        return indistinguishability * abs(self.polarization.inner(other.polarization)) ** 2


def _check_probability(name: str, value: float, *, open_low: bool = False, open_high: bool = False):
    low_ok = value > 0.0 if open_low else value >= 0.0
    high_ok = value < 1.0 if open_high else value <= 1.0
    if not (low_ok and high_ok) or math.isnan(value):
        low = "(" if open_low else "["
        high = ")" if open_high else "]"
        raise DomainError(f"{name} must lie in {low}0, 1{high}, got {value}")


@dataclass(frozen=True)
class BeamSplitterSpec:
    """Lossy beam splitter: upper-port split ratio T and lumped excess transmission"""
    split_ratio_upper: float
    excess_transmission: float = 1.0

    def __post_init__(self):
        _check_probability("Split ratio", self.split_ratio_upper, open_low=True, open_high=True)
        _check_probability("Excess transmission", self.excess_transmission, open_low=True)

    @property
    def split_ratio_lower(self) -> float:
        return 1.0 - self.split_ratio_upper


@dataclass(frozen=True)
class DetectorSpec:
    """Threshold detector with overall efficiency and dark-click probability per gate"""
    efficiency: float
    dark_click_probability: float = 0.0

    def __post_init__(self):
        _check_probability("Detector efficiency", self.efficiency)
        _check_probability("Dark click probability", self.dark_click_probability, open_high=True)


@dataclass(frozen=True)
class DetectorCharacterization:
    """Measured detector channel, efficiency relative to detector A"""
    fiber_transmission: float
    relative_efficiency: float
    dark_click_probability: float = 0.0

    def __post_init__(self):
        _check_probability("Detector fiber transmission", self.fiber_transmission)
        _check_probability("Relative detector efficiency", self.relative_efficiency)
        _check_probability("Dark click probability", self.dark_click_probability, open_high=True)


@dataclass(frozen=True)
class ArmTransmission:
    """Component transmissions of one verifier arm"""
    switch: float
    delay_stage: float
    polarization_modulator: float
    fiber: float

    def __post_init__(self):
        for name in ("switch", "delay_stage", "polarization_modulator", "fiber"):
            _check_probability(f"Arm {name} transmission", getattr(self, name))

    @property
    def total(self) -> float:
        return self.switch * self.delay_stage * self.polarization_modulator * self.fiber


@dataclass(frozen=True, order=True)
class ClickPattern:
    """Set of detectors that clicked in one pulse slot, stored as a bit mask"""
    mask: int

    def __post_init__(self):
        if not 0 <= int(self.mask) < PATTERN_COUNT:
            raise ValueError(f"Click mask must lie in [0, 15], got {self.mask}")
        object.__setattr__(self, "mask", int(self.mask))

    @classmethod
    def from_detectors(cls, detectors: Iterable[Detector]) -> "ClickPattern":
        mask = 0
        for detector in detectors:
            mask |= int(detector)
        return cls(mask)

    @classmethod
    def from_labels(cls, labels: str) -> "ClickPattern":
        labels = labels.strip()
        if labels in ("", "-"):
            return cls(0)
        try:
            return cls.from_detectors(Detector[label] for label in labels.upper())
        except KeyError:
            raise ValueError(f"Unknown detector in pattern '{labels}'") from None

    @property
    def detectors(self) -> Tuple[Detector, ...]:
        return tuple(d for d in DETECTORS if self.mask & d)

    @property
    def cardinality(self) -> int:
        return bin(self.mask).count("1")

    @property
    def labels(self) -> str:
        return "".join(d.name for d in self.detectors) or "-"

    def __contains__(self, detector: Detector) -> bool:
        return bool(self.mask & detector)

    def __str__(self) -> str:
        return self.labels


ALL_PATTERNS: Tuple[ClickPattern, ...] = tuple(ClickPattern(m) for m in range(PATTERN_COUNT))


@dataclass(frozen=True, eq=False)
class OutcomeDistribution:
    """Probability of each of the 16 click patterns, indexed by mask"""
    probabilities: np.ndarray

    def __post_init__(self):
        probabilities = np.array(self.probabilities, dtype=float)
        if probabilities.shape != (PATTERN_COUNT,):
            raise ValueError(f"Outcome distribution needs {PATTERN_COUNT} entries")
        if (probabilities < -DISTRIBUTION_TOLERANCE).any():
            raise DomainError("Outcome probabilities must be nonnegative")
        total = probabilities.sum()
        if abs(total - 1.0) > DISTRIBUTION_TOLERANCE:
            raise DomainError(f"Outcome probabilities sum to {total!r}, not 1")
        probabilities = np.clip(probabilities, 0.0, None)
        probabilities.setflags(write=False)
        object.__setattr__(self, "probabilities", probabilities)

    def probability(self, pattern: Union[ClickPattern, str]) -> float:
        if isinstance(pattern, str):
            pattern = ClickPattern.from_labels(pattern)
        return float(self.probabilities[pattern.mask])

    def click_probability(self, detector: Detector) -> float:
        return float(sum(p for mask, p in enumerate(self.probabilities) if mask & detector))

    def coincidence_probability(self, first: Detector, second: Detector) -> float:
        both = int(first) | int(second)
        return float(sum(p for mask, p in enumerate(self.probabilities) if mask & both == both))

    def total_variation(self, other: "OutcomeDistribution") -> float:
        return 0.5 * float(np.abs(self.probabilities - other.probabilities).sum())

    def relabel(self, mapping: Mapping[Detector, Detector]) -> "OutcomeDistribution":
        relabelled = np.zeros(PATTERN_COUNT)
        for mask, p in enumerate(self.probabilities):
            target = ClickPattern.from_detectors(mapping.get(d, d) for d in ClickPattern(mask).detectors)
            relabelled[target.mask] += p
        return OutcomeDistribution(relabelled)

    def as_dict(self) -> Dict[str, float]:
        return {pattern.labels: float(self.probabilities[pattern.mask]) for pattern in ALL_PATTERNS}


@dataclass(frozen=True)
class UncertainValue:
    """Value with symmetric first-order uncertainty"""
    value: float
    uncertainty: float = 0.0

    def __post_init__(self):
        if self.uncertainty < 0:
            raise ValueError("Uncertainty cannot be negative")

    def __str__(self) -> str:
        return f"{self.value:.3f} ± {self.uncertainty:.3f}"


@dataclass(frozen=True)
class HomMeasurement:
    """Zero-delay HOM correlations for parallel and orthogonal input polarizations"""
    g2_parallel: UncertainValue
    g2_perp: UncertainValue

    def __post_init__(self):
        for name in ("g2_parallel", "g2_perp"):
            value = getattr(self, name)
            if not isinstance(value, UncertainValue):
                object.__setattr__(self, name, UncertainValue(float(value)))


OVERLAP_CONVENTIONS = ("bare", "effective")


@dataclass(frozen=True)
class SourceParams:
    """Imperfect single-photon source: purity via g2, pairwise indistinguishability M"""
    g2: float
    indistinguishability: float
    brightness: Optional[float] = None
    overlap_convention: str = "bare"
    g2_uncertainty: float = 0.0
    indistinguishability_uncertainty: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.g2 < 1.0:
            raise DomainError(f"g2 must lie in [0, 1), got {self.g2}")
        _check_probability("Indistinguishability", self.indistinguishability)
        if self.brightness is not None:
            _check_probability("Brightness", self.brightness)
        if self.overlap_convention not in OVERLAP_CONVENTIONS:
            raise ValueError(
                f"Overlap convention must be one of {', '.join(OVERLAP_CONVENTIONS)}"
            )
        if self.g2_uncertainty < 0 or self.indistinguishability_uncertainty < 0:
            raise DomainError("Source parameter uncertainties cannot be negative")

    @property
    def has_uncertainty(self) -> bool:
        return self.g2_uncertainty > 0 or self.indistinguishability_uncertainty > 0

    @classmethod
    def ideal(cls) -> "SourceParams":
        return cls(g2=0.0, indistinguishability=1.0)

    @classmethod
    def from_purity(
        cls, purity: float, indistinguishability: float, overlap_convention: str = "bare"
    ) -> "SourceParams":
        return cls(
            g2=1.0 - purity,
            indistinguishability=indistinguishability,
            overlap_convention=overlap_convention,
        )

    @property
    def purity(self) -> float:
        return 1.0 - self.g2

    @property
    def p2(self) -> float:
        return two_photon_probability(self.g2)

    @property
    def interfering_overlap(self) -> float:
        """Temporal overlap with which the signal pair interferes"""
        if self.overlap_convention == "effective":
            return self.indistinguishability / (1.0 + 2.0 * self.g2)
        return self.indistinguishability


@dataclass(frozen=True)
class Geometry:
    """Positions on a line (meters) and classical signal speed"""
    v0_position_m: float
    prover_position_m: float
    v1_position_m: float
    signal_speed_m_per_s: float = 2.0e8

    def __post_init__(self):
        if not self.v0_position_m < self.prover_position_m < self.v1_position_m:
            raise ValueError("Geometry requires V0 < P < V1 on a line")
        if not 0.0 < self.signal_speed_m_per_s <= speed_of_light:
            raise ValueError("Signal speed must lie in (0, c]")

    def verifier_position(self, arm: Arm) -> float:
        return self.v0_position_m if arm is Arm.V0 else self.v1_position_m

    def time_of_flight(self, arm: Arm, position: Optional[float] = None) -> float:
        """Travel time between a verifier and a point (default: the claimed prover position)"""
        if position is None:
            position = self.prover_position_m
        return abs(self.verifier_position(arm) - position) / self.signal_speed_m_per_s


@dataclass(frozen=True)
class SpaceTimePoint:
    """Event on the line: position x (meters) at time t (seconds)"""
    x: float
    t: float

    def can_signal(self, other: "SpaceTimePoint", speed_m_per_s: float, tolerance_s: float = 0.0) -> bool:
        """Whether a signal at the given speed leaving this event reaches other in time"""
        return self.t + abs(other.x - self.x) / speed_m_per_s <= other.t + tolerance_s


@dataclass(frozen=True)
class ProtocolSettings:
    """Round schedule and timing constraints"""
    enabled_bases: Tuple[Basis, ...] = (Basis.HV,)
    tolerance_s: float = 1e-9
    processing_time_s: float = 0.0
    round_period_s: float = 1e-6

    def __post_init__(self):
        bases = tuple(Basis(b) for b in self.enabled_bases)
        if not bases:
            raise ConfigError("protocol.enabled_bases", "at least one basis must be enabled")
        if len(set(bases)) != len(bases):
            raise ConfigError("protocol.enabled_bases", "bases must be distinct")
        object.__setattr__(self, "enabled_bases", bases)
        if self.tolerance_s < 0 or self.processing_time_s < 0:
            raise ValueError("Timing tolerance and processing time cannot be negative")
        if self.round_period_s <= 0:
            raise ValueError("Round period must be positive")


BEAMSPLITTERS = ("BS1", "BS2", "BS3")


@dataclass(frozen=True)
class SetupConfig:
    """Optical network, source and geometry of one experiment"""
    name: str
    arms: Mapping[Arm, ArmTransmission]
    beamsplitters: Mapping[str, BeamSplitterSpec]
    detectors: Mapping[Detector, DetectorCharacterization]
    source: SourceParams
    geometry: Geometry
    protocol: ProtocolSettings = field(default_factory=ProtocolSettings)
    detector_abs_scale: float = 0.30

    def __post_init__(self):
        if set(self.arms) != {Arm.V0, Arm.V1}:
            raise ValueError("Setup needs transmissions for arms V0 and V1")
        if set(self.beamsplitters) != set(BEAMSPLITTERS):
            raise ValueError("Setup needs beam splitters BS1, BS2 and BS3")
        if set(self.detectors) != set(DETECTORS):
            raise ValueError("Setup needs detectors A, B, C and D")
        _check_probability("Detector absolute scale", self.detector_abs_scale, open_low=True)

    @classmethod
    def lossless_balanced(
        cls, source: Optional[SourceParams] = None, name: str = "lossless-balanced"
    ) -> "SetupConfig":
        unity = ArmTransmission(1.0, 1.0, 1.0, 1.0)
        return cls(
            name=name,
            arms={Arm.V0: unity, Arm.V1: unity},
            beamsplitters={bs: BeamSplitterSpec(0.5, 1.0) for bs in BEAMSPLITTERS},
            detectors={d: DetectorCharacterization(1.0, 1.0) for d in DETECTORS},
            source=source or SourceParams.ideal(),
            geometry=Geometry(0.0, 100.0, 200.0),
            detector_abs_scale=1.0,
        )

    def arm_transmission(self, arm: Arm) -> float:
        return self.arms[arm].total

    def downstream_splitter(self, detector: Detector) -> BeamSplitterSpec:
        return self.beamsplitters["BS2" if detector in UPPER_DETECTORS else "BS3"]

    def detector_spec(self, detector: Detector) -> DetectorSpec:
        channel = self.detectors[detector]
        return DetectorSpec(
            efficiency=channel.fiber_transmission * channel.relative_efficiency * self.detector_abs_scale,
            dark_click_probability=channel.dark_click_probability,
        )

    def with_source(self, source: SourceParams) -> "SetupConfig":
        return replace(self, source=source)

    def with_protocol(self, **changes) -> "SetupConfig":
        return replace(self, protocol=replace(self.protocol, **changes))


@dataclass(frozen=True)
class RoundSpec:
    """Verifier preparation of one round"""
    basis: Basis
    parity: Parity
    qubit_0: PolarizationQubit
    qubit_1: PolarizationQubit

    def __post_init__(self):
        overlap = self.polarization_overlap
        expected = 1.0 if self.parity is Parity.PARALLEL else 0.0
        if abs(overlap - expected) > NORMALIZATION_TOLERANCE:
            raise ValueError(
                f"{self.parity.value} round needs polarization overlap {expected}, got {overlap}"
            )

    @classmethod
    def build(cls, basis: Basis, parity: Parity, first_state: int = 0) -> "RoundSpec":
        """first_state selects which basis state photon 0 carries"""
        labels = BASIS_STATES[basis]
        second_state = first_state if parity is Parity.PARALLEL else 1 - first_state
        return cls(
            basis=basis,
            parity=parity,
            qubit_0=PolarizationQubit.from_label(labels[first_state]),
            qubit_1=PolarizationQubit.from_label(labels[second_state]),
        )

    @property
    def polarization_overlap(self) -> float:
        return abs(self.qubit_0.inner(self.qubit_1)) ** 2


@dataclass(frozen=True)
class TranscriptEntry:
    """One round as seen by the verifiers"""
    round_index: int
    round: RoundSpec
    pattern: Optional[ClickPattern]
    answer_v0: ProverAnswer
    answer_v1: ProverAnswer
    t_v0: float
    t_v1: float


@dataclass(frozen=True, eq=False)
class Transcript:
    """Columnar transcript of a protocol run, ordered by round index"""
    round_index: np.ndarray
    basis: np.ndarray
    parity: np.ndarray
    first_state: np.ndarray
    pattern: np.ndarray
    answer_v0: np.ndarray
    answer_v1: np.ndarray
    t_v0: np.ndarray
    t_v1: np.ndarray

    def __len__(self) -> int:
        return len(self.round_index)

    def __getitem__(self, i: int) -> TranscriptEntry:
        pattern = int(self.pattern[i])
        return TranscriptEntry(
            round_index=int(self.round_index[i]),
            round=RoundSpec.build(
                BASES[self.basis[i]], PARITIES[self.parity[i]], int(self.first_state[i])
            ),
            pattern=None if pattern == NO_PATTERN else ClickPattern(pattern),
            answer_v0=ANSWERS[self.answer_v0[i]],
            answer_v1=ANSWERS[self.answer_v1[i]],
            t_v0=float(self.t_v0[i]),
            t_v1=float(self.t_v1[i]),
        )

    def __iter__(self) -> Iterator[TranscriptEntry]:
        for i in range(len(self)):
            yield self[i]

    @classmethod
    def concatenate(cls, parts: Sequence["Transcript"]) -> "Transcript":
        names = cls.__dataclass_fields__.keys()
        return cls(**{name: np.concatenate([getattr(p, name) for p in parts]) for name in names})


@dataclass(frozen=True)
class Estimate:
    """Binomial proportion with a Wilson score interval"""
    value: float
    lower: float
    upper: float
    successes: int
    trials: int

    def contains(self, target: float, margin: float = 0.0) -> bool:
        return bool(self.lower - margin <= target <= self.upper + margin)


@dataclass(frozen=True)
class VerificationReport:
    """Verifier-side statistics of a run"""
    counts: Mapping[Parity, Mapping[ProverAnswer, int]]
    p0_parallel_conclusive: Estimate
    p1_orthogonal_conclusive: Estimate
    inconclusive_parallel: Estimate
    inconclusive_orthogonal: Estimate
    pooled_conclusive_correctness: Estimate
    rounds: int
    round_check_failures: int = 0
    confidence: float = 0.95
    locc_bound: float = 2.0 / 3.0

    @property
    def secure_against_locc(self) -> bool:
        return bool(self.pooled_conclusive_correctness.lower > self.locc_bound)

    @property
    def round_checks_passed(self) -> bool:
        return self.round_check_failures == 0

    def parity_rounds(self, parity: Parity) -> int:
        return sum(self.counts[parity].values())

    def conclusive_rounds(self, parity: Parity) -> int:
        counts = self.counts[parity]
        return counts[ProverAnswer.ZERO] + counts[ProverAnswer.ONE]

    def conditional_probabilities(self, parity: Parity) -> Dict[ProverAnswer, float]:
        total = self.parity_rounds(parity)
        if total == 0:
            return {answer: 0.0 for answer in ANSWERS}
        return {answer: self.counts[parity][answer] / total for answer in ANSWERS}


@dataclass(frozen=True)
class VerificationPolicy:
    """Thresholds applied by the verifiers after n rounds"""
    expected_inconclusive: Mapping[Parity, float]
    min_conclusive: int = 100
    locc_bound: float = 2.0 / 3.0
    perp_margin: float = 0.10
    inconclusive_margin: float = 0.05

    def __post_init__(self):
        if set(self.expected_inconclusive) != set(PARITIES):
            raise ValueError("Policy needs an expected inconclusive rate for both parities")
        for rate in self.expected_inconclusive.values():
            _check_probability("Expected inconclusive rate", rate)
        if self.min_conclusive < 1:
            raise ValueError("Minimum conclusive rounds must be at least 1")
        if self.perp_margin < 0 or self.inconclusive_margin < 0:
            raise ValueError("Policy margins cannot be negative")

    @classmethod
    def ideal(cls, **overrides) -> "VerificationPolicy":
        """Bands around the lossless ideal honest prover"""
        return cls(
            expected_inconclusive={Parity.PARALLEL: 0.5, Parity.ORTHOGONAL: 0.25},
            **overrides,
        )


@dataclass(frozen=True)
class VerificationResult:
    verdict: Verdict
    violations: Tuple[str, ...] = ()
    clauses: Mapping[str, bool] = field(default_factory=dict)

    @property
    def accepted(self) -> bool:
        return self.verdict is Verdict.ACCEPT


@dataclass(frozen=True)
class CountsTable:
    """Coincidence counts per unordered detector pair and singles per detector"""
    coincidences: Mapping[str, int]
    singles: Mapping[str, int]
    duration_s: float = 0.0

    def __post_init__(self):
        coincidences = {pair: 0 for pair in DETECTOR_PAIRS}
        for pair, count in self.coincidences.items():
            key = "".join(sorted(pair.upper()))
            if key not in coincidences:
                raise ValueError(f"Unknown detector pair '{pair}'")
            coincidences[key] = _count(count, pair)
        singles = {d.name: 0 for d in DETECTORS}
        for label, count in self.singles.items():
            if label.upper() not in singles:
                raise ValueError(f"Unknown detector '{label}'")
            singles[label.upper()] = _count(count, label)
        if self.duration_s < 0:
            raise ValueError("Duration cannot be negative")
        object.__setattr__(self, "coincidences", coincidences)
        object.__setattr__(self, "singles", singles)

    def coincidence(self, first: Detector, second: Detector) -> int:
        return self.coincidences["".join(sorted(first.name + second.name))]

    def merge(self, other: "CountsTable") -> "CountsTable":
        return CountsTable(
            coincidences={p: self.coincidences[p] + other.coincidences[p] for p in DETECTOR_PAIRS},
            singles={d: self.singles[d] + other.singles[d] for d in self.singles},
            duration_s=self.duration_s + other.duration_s,
        )

    @classmethod
    def from_patterns(cls, patterns: Iterable, duration_s: float = 0.0) -> "CountsTable":
        masks = np.asarray(
            [p.mask if isinstance(p, ClickPattern) else p for p in patterns], dtype=np.int64
        )
        masks = masks[masks != NO_PATTERN]
        histogram = np.bincount(masks, minlength=PATTERN_COUNT).astype(float)
        return cls._from_pattern_weights(histogram, duration_s)

    @classmethod
    def from_distribution(
        cls, distribution: OutcomeDistribution, rounds: int, duration_s: float = 0.0
    ) -> "CountsTable":
        """Expected counts over a number of rounds, rounded to integers"""
        return cls._from_pattern_weights(distribution.probabilities * rounds, duration_s)

    @classmethod
    def _from_pattern_weights(cls, weights: np.ndarray, duration_s: float) -> "CountsTable":
        masks = np.arange(PATTERN_COUNT)
        coincidences = {}
        for pair in DETECTOR_PAIRS:
            both = int(Detector[pair[0]]) | int(Detector[pair[1]])
            coincidences[pair] = int(round(weights[(masks & both) == both].sum()))
        singles = {d.name: int(round(weights[(masks & int(d)) != 0].sum())) for d in DETECTORS}
        return cls(coincidences=coincidences, singles=singles, duration_s=duration_s)


def _count(value, key: str) -> int:
    if isinstance(value, bool) or int(value) != value or value < 0:
        raise ValueError(f"Count for '{key}' must be a nonnegative integer, got {value}")
    return int(value)


class BasisPolicy(str, Enum):
    """How the two adversaries choose their measurement bases"""
    SHARED_UNIFORM = "shared-uniform"
    INDEPENDENT_UNIFORM = "independent-uniform"
    FIXED = "fixed"


class ResponseRule(str, Enum):
    """Joint rule mapping both measurement records to a common answer"""
    DIRECT = "direct"
    MIMIC_HONEST = "mimic-honest"
    CLAIM_LOSS = "claim-loss"
    CLAIM_LOSS_MIMIC = "claim-loss-mimic"
    BLIND_CLAIM_LOSS = "blind-claim-loss"
    ALWAYS_ZERO = "always-zero"
    ALWAYS_ONE = "always-one"
    COIN_FLIP = "coin-flip"


BASIS_AWARE_RULES = frozenset({ResponseRule.CLAIM_LOSS, ResponseRule.CLAIM_LOSS_MIMIC})


@dataclass(frozen=True)
class AttackerStrategy:
    """Intercept-measure strategy of two LOCC adversaries"""
    name: str
    basis_policy: BasisPolicy
    response_rule: ResponseRule
    fixed_basis: Optional[Basis] = None
    learns_basis_after_measurement: bool = False
    classical_exchanges: int = 1
    description: str = ""

    def __post_init__(self):
        if not self.name or not self.name.strip():
            raise ValueError("Strategy name cannot be empty")
        if self.basis_policy is BasisPolicy.FIXED and self.fixed_basis is None:
            raise ValueError("Fixed basis policy needs a basis")
        if self.response_rule in BASIS_AWARE_RULES and not self.learns_basis_after_measurement:
            raise ValueError(
                f"Response rule '{self.response_rule.value}' needs to learn the round basis"
            )
        if self.classical_exchanges != 1:
            raise ValueError("LOCC adversaries exchange exactly one classical message per round")


@dataclass(frozen=True)
class AttackReport:
    """Outcome of substituting the adversaries for the prover"""
    strategy: AttackerStrategy
    enabled_bases: Tuple[Basis, ...]
    rounds: int
    parity_guess_success: Estimate
    analytic_bound: float
    timing_feasible: bool
    verification_report: VerificationReport
    verification: VerificationResult

    @property
    def p0_parallel_conclusive(self) -> Estimate:
        return self.verification_report.p0_parallel_conclusive

    @property
    def p1_orthogonal_conclusive(self) -> Estimate:
        return self.verification_report.p1_orthogonal_conclusive

    @property
    def pooled_conclusive_correctness(self) -> Estimate:
        return self.verification_report.pooled_conclusive_correctness

    @property
    def exceeds_locc_bound(self) -> bool:
        return self.verification_report.secure_against_locc

    @property
    def accepted_by_verifier(self) -> bool:
        return self.verification.accepted


@dataclass(frozen=True)
class SweepSpec:
    """Grid over purity and indistinguishability"""
    purity_min: float
    purity_max: float
    purity_steps: int
    indistinguishability_min: float
    indistinguishability_max: float
    indistinguishability_steps: int
    rounds_per_cell: Optional[int] = None
    master_seed: Optional[int] = None

    def __post_init__(self):
        if self.purity_steps < 2 or self.indistinguishability_steps < 2:
            raise ValueError("Sweep needs at least 2 steps per axis")
        for low, high, name in (
            (self.purity_min, self.purity_max, "Purity"),
            (self.indistinguishability_min, self.indistinguishability_max, "Indistinguishability"),
        ):
            if not 0.0 <= low <= high <= 1.0:
                raise ValueError(f"{name} range must satisfy 0 <= min <= max <= 1")
        if self.purity_min < 0.5:
            raise UnsupportedRegimeError("Purity below 0.5 (g2 > 1/2) is outside the supported regime")
        if self.rounds_per_cell is not None:
            if self.rounds_per_cell < 1:
                raise ValueError("Rounds per cell must be at least 1")
            if self.master_seed is None:
                raise ValueError("Monte Carlo sweeps need a master seed")

    @property
    def exact(self) -> bool:
        return self.rounds_per_cell is None

    def purities(self) -> np.ndarray:
        return np.linspace(self.purity_min, self.purity_max, self.purity_steps)

    def indistinguishabilities(self) -> np.ndarray:
        return np.linspace(
            self.indistinguishability_min,
            self.indistinguishability_max,
            self.indistinguishability_steps,
        )


@dataclass(frozen=True)
class SweepCell:
    purity: float
    indistinguishability: float
    p0_given_parallel_conclusive: float


@dataclass(frozen=True)
class SweepResult:
    """Grid values in row-major order (purity rows) plus the 2/3 threshold per row"""
    spec: SweepSpec
    cells: Tuple[SweepCell, ...]
    thresholds: Tuple[Tuple[float, Optional[float]], ...]


@dataclass(frozen=True, eq=False)
class RoundBatch:
    """Preparation and send times of consecutive rounds, as integer codes"""
    round_index: np.ndarray
    basis: np.ndarray
    parity: np.ndarray
    first_state: np.ndarray
    send_v0: np.ndarray
    send_v1: np.ndarray

    def __len__(self) -> int:
        return len(self.round_index)


@dataclass(frozen=True, eq=False)
class ResponseBatch:
    """Answers as received by each verifier; pattern is NO_PATTERN without optics"""
    pattern: np.ndarray
    answer_v0: np.ndarray
    answer_v1: np.ndarray
    t_v0: np.ndarray
    t_v1: np.ndarray
    parity_guess_correct: Optional[np.ndarray] = None
