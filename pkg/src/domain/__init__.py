# Domain layer exports
from .entities import (
    Arm,
    ArmTransmission,
    AttackerStrategy,
    AttackReport,
    Basis,
    BeamSplitterSpec,
    ClickPattern,
    CountsTable,
    Detector,
    DetectorCharacterization,
    DetectorSpec,
    Geometry,
    HomMeasurement,
    OutcomeDistribution,
    Parity,
    PolarizationQubit,
    ProtocolSettings,
    ProverAnswer,
    RoundSpec,
    SetupConfig,
    SourceParams,
    SweepCell,
    SweepResult,
    SweepSpec,
    Transcript,
    UncertainValue,
    Verdict,
    VerificationPolicy,
    VerificationReport,
    VerificationResult,
)
from .errors import (
    ConfigError,
    DomainError,
    PreconditionError,
    QpvError,
    StrategyNotFoundError,
    UnsupportedRegimeError,
)
from .interfaces import (
    ProverInterface,
    SetupRepositoryInterface,
    TranscriptRepositoryInterface,
    CountsRepositoryInterface,
    ReportRepositoryInterface,
    SweepRepositoryInterface,
)

__all__ = [
    "Arm",
    "ArmTransmission",
    "AttackerStrategy",
    "AttackReport",
    "Basis",
    "BeamSplitterSpec",
    "ClickPattern",
    "CountsTable",
    "Detector",
    "DetectorCharacterization",
    "DetectorSpec",
    "Geometry",
    "HomMeasurement",
    "OutcomeDistribution",
    "Parity",
    "PolarizationQubit",
    "ProtocolSettings",
    "ProverAnswer",
    "RoundSpec",
    "SetupConfig",
    "SourceParams",
    "SweepCell",
    "SweepResult",
    "SweepSpec",
    "Transcript",
    "UncertainValue",
    "Verdict",
    "VerificationPolicy",
    "VerificationReport",
    "VerificationResult",
    "ConfigError",
    "DomainError",
    "PreconditionError",
    "QpvError",
    "StrategyNotFoundError",
    "UnsupportedRegimeError",
    "ProverInterface",
    "SetupRepositoryInterface",
    "TranscriptRepositoryInterface",
    "CountsRepositoryInterface",
    "ReportRepositoryInterface",
    "SweepRepositoryInterface",
]
