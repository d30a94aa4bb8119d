# Application layer exports
from .dtos import (
    SetupDocument,
    SimulateRequestDTO,
    SweepRequestDTO,
    AttackRequestDTO,
    EstimateDTO,
    VerificationReportDTO,
    AttackReportDTO,
    ProbabilityRowDTO,
    SimulationSummaryDTO,
    EstimationResultDTO,
    ConfigSummaryDTO,
    CountsAnalysisDTO,
)
from .use_cases import (
    ProtocolUseCase,
    SweepUseCase,
    EstimationUseCase,
    AttackUseCase,
    CountsUseCase,
    ConfigUseCase,
)

__all__ = [
    "SetupDocument",
    "SimulateRequestDTO",
    "SweepRequestDTO",
    "AttackRequestDTO",
    "EstimateDTO",
    "VerificationReportDTO",
    "AttackReportDTO",
    "ProbabilityRowDTO",
    "SimulationSummaryDTO",
    "EstimationResultDTO",
    "ConfigSummaryDTO",
    "CountsAnalysisDTO",
    "ProtocolUseCase",
    "SweepUseCase",
    "EstimationUseCase",
    "AttackUseCase",
    "CountsUseCase",
    "ConfigUseCase",
]
