from pydantic import BaseModel, ConfigDict, Field, model_validator
from typing import Annotated, Callable, Dict, List, Literal, Optional

from ...domain import (
    Arm,
    ArmTransmission,
    AttackReport,
    Basis,
    BeamSplitterSpec,
    ConfigError,
    DetectorCharacterization,
    Geometry,
    ProtocolSettings,
    SetupConfig,
    SourceParams,
    VerificationReport,
    VerificationResult,
)
from ...domain.entities import DETECTORS, Estimate


SCHEMA_VERSION = 1

BasisLabel = Literal["HV", "DA", "RL"]
Probability = Annotated[float, Field(ge=0.0, le=1.0)]


def _build(key: str, factory: Callable, **kwargs):
    try:
        return factory(**kwargs)
    except ConfigError:
        raise
    except ValueError as e:
        raise ConfigError(key, str(e)) from e


class _Document(BaseModel):
    model_config = ConfigDict(extra="forbid", strict=True, frozen=True)


class ArmDocument(_Document):
    """Component transmissions of one verifier arm"""
    switch: Probability
    delay_stage: Probability
    polarization_modulator: Probability
    fiber: Probability


class ArmsDocument(_Document):
    V0: ArmDocument
    V1: ArmDocument


class BeamSplitterDocument(_Document):
    split_ratio_upper: float = Field(..., gt=0.0, lt=1.0)
    excess_transmission: float = Field(1.0, gt=0.0, le=1.0)


class BeamSplittersDocument(_Document):
    BS1: BeamSplitterDocument
    BS2: BeamSplitterDocument
    BS3: BeamSplitterDocument


class DetectorDocument(_Document):
    fiber_transmission: Probability
    relative_efficiency: Probability
    dark_click_probability: float = Field(0.0, ge=0.0, lt=1.0)


class DetectorsDocument(_Document):
    A: DetectorDocument
    B: DetectorDocument
    C: DetectorDocument
    D: DetectorDocument


class SourceDocument(_Document):
    g2: float = Field(..., ge=0.0, lt=1.0)
    indistinguishability: Probability
    brightness: Optional[float] = Field(None, ge=0.0, le=1.0)
    overlap_convention: Literal["bare", "effective"] = "bare"
    g2_uncertainty: float = Field(0.0, ge=0.0)
    indistinguishability_uncertainty: float = Field(0.0, ge=0.0)


class GeometryDocument(_Document):
    v0_position_m: float
    prover_position_m: float
    v1_position_m: float
    signal_speed_m_per_s: float = Field(2.0e8, gt=0.0)


class ProtocolDocument(_Document):
    enabled_bases: List[BasisLabel] = Field(default_factory=lambda: ["HV"], min_length=1)
    tolerance_s: float = Field(1e-9, ge=0.0)
    processing_time_s: float = Field(0.0, ge=0.0)
    round_period_s: float = Field(1e-6, gt=0.0)


class SetupDocument(_Document):
    """Versioned setup configuration document"""
    schema_version: Literal[1]
    name: str = Field(..., min_length=1, max_length=100)
    arms: ArmsDocument
    beamsplitters: BeamSplittersDocument
    detectors: DetectorsDocument
    detector_abs_scale: float = Field(0.30, gt=0.0, le=1.0)
    source: SourceDocument
    geometry: GeometryDocument
    protocol: ProtocolDocument = Field(default_factory=ProtocolDocument)

    def to_entity(self) -> SetupConfig:
        """Build the domain config; entity validation errors name the offending section"""
        return _build(
            "setup",
            SetupConfig,
            name=self.name,
            arms={
                arm: _build(f"arms.{arm.value}", ArmTransmission, **getattr(self.arms, arm.value).model_dump())
                for arm in Arm
            },
            beamsplitters={
                bs: _build(f"beamsplitters.{bs}", BeamSplitterSpec, **getattr(self.beamsplitters, bs).model_dump())
                for bs in ("BS1", "BS2", "BS3")
            },
            detectors={
                d: _build(
                    f"detectors.{d.name}",
                    DetectorCharacterization,
                    **getattr(self.detectors, d.name).model_dump(),
                )
                for d in DETECTORS
            },
            source=_build("source", SourceParams, **self.source.model_dump()),
            geometry=_build("geometry", Geometry, **self.geometry.model_dump()),
            protocol=_build(
                "protocol",
                ProtocolSettings,
                enabled_bases=tuple(Basis(b) for b in self.protocol.enabled_bases),
                tolerance_s=self.protocol.tolerance_s,
                processing_time_s=self.protocol.processing_time_s,
                round_period_s=self.protocol.round_period_s,
            ),
            detector_abs_scale=self.detector_abs_scale,
        )

    @classmethod
    def from_entity(cls, config: SetupConfig) -> "SetupDocument":
        source = config.source
        geometry = config.geometry
        protocol = config.protocol
        return cls(
            schema_version=SCHEMA_VERSION,
            name=config.name,
            arms=ArmsDocument(
                **{
                    arm.value: ArmDocument(
                        switch=t.switch,
                        delay_stage=t.delay_stage,
                        polarization_modulator=t.polarization_modulator,
                        fiber=t.fiber,
                    )
                    for arm, t in config.arms.items()
                }
            ),
            beamsplitters=BeamSplittersDocument(
                **{
                    name: BeamSplitterDocument(
                        split_ratio_upper=bs.split_ratio_upper,
                        excess_transmission=bs.excess_transmission,
                    )
                    for name, bs in config.beamsplitters.items()
                }
            ),
            detectors=DetectorsDocument(
                **{
                    d.name: DetectorDocument(
                        fiber_transmission=c.fiber_transmission,
                        relative_efficiency=c.relative_efficiency,
                        dark_click_probability=c.dark_click_probability,
                    )
                    for d, c in config.detectors.items()
                }
            ),
            detector_abs_scale=config.detector_abs_scale,
            source=SourceDocument(
                g2=source.g2,
                indistinguishability=source.indistinguishability,
                brightness=source.brightness,
                overlap_convention=source.overlap_convention,
                g2_uncertainty=source.g2_uncertainty,
                indistinguishability_uncertainty=source.indistinguishability_uncertainty,
            ),
            geometry=GeometryDocument(
                v0_position_m=geometry.v0_position_m,
                prover_position_m=geometry.prover_position_m,
                v1_position_m=geometry.v1_position_m,
                signal_speed_m_per_s=geometry.signal_speed_m_per_s,
            ),
            protocol=ProtocolDocument(
                enabled_bases=[b.value for b in protocol.enabled_bases],
                tolerance_s=protocol.tolerance_s,
                processing_time_s=protocol.processing_time_s,
                round_period_s=protocol.round_period_s,
            ),
        )


class SimulateRequestDTO(BaseModel):
    """DTO for a protocol simulation request"""
    config: str = Field(..., min_length=1)
    n: int = Field(..., ge=1)
    seed: Optional[int] = Field(None, ge=0)
    exact: bool = False
    ideal_source: bool = False
    bases: Optional[int] = Field(None, ge=1, le=3)
    output_dir: Optional[str] = None
    workers: int = Field(1, ge=1)

    @model_validator(mode="after")
    def _seed_for_monte_carlo(self):
        if not self.exact and self.seed is None:
            raise ValueError("--seed is required for Monte Carlo runs")
        return self


class SweepRequestDTO(BaseModel):
    """DTO for a purity/indistinguishability sweep"""
    config: str = Field(..., min_length=1)
    purity_min: float = Field(0.5, ge=0.0, le=1.0)
    purity_max: float = Field(1.0, ge=0.0, le=1.0)
    indistinguishability_min: float = Field(0.0, ge=0.0, le=1.0)
    indistinguishability_max: float = Field(1.0, ge=0.0, le=1.0)
    steps: int = Field(50, ge=2)
    rounds_per_cell: Optional[int] = Field(None, ge=1)
    seed: Optional[int] = Field(None, ge=0)
    output: str = Field(..., min_length=1)
    workers: int = Field(1, ge=1)

    @model_validator(mode="after")
    def _seed_for_monte_carlo(self):
        if self.rounds_per_cell is not None and self.seed is None:
            raise ValueError("--seed is required for Monte Carlo sweeps")
        return self


class AttackRequestDTO(BaseModel):
    """DTO for an attack evaluation"""
    strategy: str = Field(..., min_length=1)
    config: str = Field(..., min_length=1)
    n: int = Field(..., ge=1)
    seed: int = Field(..., ge=0)
    bases: int = Field(3, ge=1, le=3)
    output: Optional[str] = None
    workers: int = Field(1, ge=1)


class EstimateDTO(BaseModel):
    """DTO for a binomial proportion with its Wilson interval"""
    value: float
    lower: float
    upper: float
    successes: int
    trials: int

    @classmethod
    def from_entity(cls, estimate: Estimate) -> "EstimateDTO":
        return cls(
            value=estimate.value,
            lower=estimate.lower,
            upper=estimate.upper,
            successes=estimate.successes,
            trials=estimate.trials,
        )


class VerificationReportDTO(BaseModel):
    """DTO for verifier statistics and verdict"""
    rounds: int
    counts: Dict[str, Dict[str, int]]
    p0_parallel_conclusive: EstimateDTO
    p1_orthogonal_conclusive: EstimateDTO
    inconclusive_parallel: EstimateDTO
    inconclusive_orthogonal: EstimateDTO
    pooled_conclusive_correctness: EstimateDTO
    round_check_failures: int
    confidence: float
    locc_bound: float
    secure_against_locc: bool
    verdict: str
    violations: List[str] = Field(default_factory=list)
    clauses: Dict[str, bool] = Field(default_factory=dict)

    @classmethod
    def from_entity(
        cls, report: VerificationReport, result: VerificationResult
    ) -> "VerificationReportDTO":
        return cls(
            rounds=report.rounds,
            counts={
                parity.value: {answer.value: count for answer, count in answers.items()}
                for parity, answers in report.counts.items()
            },
            p0_parallel_conclusive=EstimateDTO.from_entity(report.p0_parallel_conclusive),
            p1_orthogonal_conclusive=EstimateDTO.from_entity(report.p1_orthogonal_conclusive),
            inconclusive_parallel=EstimateDTO.from_entity(report.inconclusive_parallel),
            inconclusive_orthogonal=EstimateDTO.from_entity(report.inconclusive_orthogonal),
            pooled_conclusive_correctness=EstimateDTO.from_entity(
                report.pooled_conclusive_correctness
            ),
            round_check_failures=report.round_check_failures,
            confidence=report.confidence,
            locc_bound=report.locc_bound,
            secure_against_locc=report.secure_against_locc,
            verdict=result.verdict.value,
            violations=list(result.violations),
            clauses=dict(result.clauses),
        )


class AttackReportDTO(BaseModel):
    """DTO for an attack evaluation, same layout as the verification report"""
    strategy: str
    description: str
    enabled_bases: List[str]
    rounds: int
    parity_guess_success: EstimateDTO
    analytic_bound: float
    timing_feasible: bool
    exceeds_locc_bound: bool
    accepted_by_verifier: bool
    verification: VerificationReportDTO

    @classmethod
    def from_entity(cls, report: AttackReport) -> "AttackReportDTO":
        return cls(
            strategy=report.strategy.name,
            description=report.strategy.description,
            enabled_bases=[b.value for b in report.enabled_bases],
            rounds=report.rounds,
            parity_guess_success=EstimateDTO.from_entity(report.parity_guess_success),
            analytic_bound=report.analytic_bound,
            timing_feasible=report.timing_feasible,
            exceeds_locc_bound=report.exceeds_locc_bound,
            accepted_by_verifier=report.accepted_by_verifier,
            verification=VerificationReportDTO.from_entity(
                report.verification_report, report.verification
            ),
        )


class ProbabilityRowDTO(BaseModel):
    """One line of the theory / model / simulated comparison table"""
    quantity: str
    theory: float
    model: float
    model_uncertainty: Optional[float] = None
    simulated: Optional[float] = None


class SimulationSummaryDTO(BaseModel):
    """DTO for a finished simulation"""
    config: str
    rounds: int
    seed: Optional[int] = None
    exact: bool
    rows: List[ProbabilityRowDTO]
    pattern_total_variation: Optional[Dict[str, float]] = None
    report: Optional[VerificationReportDTO] = None
    written: List[str] = Field(default_factory=list)


class EstimationResultDTO(BaseModel):
    """DTO for the HOM visibility to indistinguishability estimator chain"""
    visibility: float
    visibility_uncertainty: float
    indistinguishability: float
    indistinguishability_uncertainty: float
    g2_parallel: Optional[float] = None
    g2_perp: Optional[float] = None
    g2_hbt: Optional[float] = None


class ConfigSummaryDTO(BaseModel):
    """DTO for a validated setup configuration"""
    name: str
    arm_transmission: Dict[str, float]
    split_ratios: Dict[str, float]
    path_survival: Dict[str, float]
    source: Dict[str, Optional[float]]
    enabled_bases: List[str]


class CountsAnalysisDTO(BaseModel):
    """DTO for conditional answers and normalized coincidences of measured counts"""
    coincidences: Dict[str, int]
    conditional_answers: Dict[str, float]
    normalized_coincidences: Optional[Dict[str, float]] = None
