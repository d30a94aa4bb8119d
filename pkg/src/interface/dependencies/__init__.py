from ...infrastructure import (
    CsvCountsRepository,
    CsvSweepRepository,
    CsvTranscriptRepository,
    JsonReportRepository,
    JsonSetupRepository,
)
from ...application import (
    AttackUseCase,
    ConfigUseCase,
    CountsUseCase,
    EstimationUseCase,
    ProtocolUseCase,
    SweepUseCase,
)
from ...domain.protocol import DEFAULT_SHARD_ROUNDS

# Configuration
DEFAULT_CONFIG = "paper_setup"
DEFAULT_ROUNDS = 1_000_000
DEFAULT_WORKERS = 1
DEFAULT_SWEEP_STEPS = 50
DEFAULT_CHARACTERIZATION_EFFICIENCY = 0.01
SHARD_ROUNDS = DEFAULT_SHARD_ROUNDS

# Repositories
setup_repository = JsonSetupRepository()
transcript_repository = CsvTranscriptRepository()
counts_repository = CsvCountsRepository()
report_repository = JsonReportRepository()
sweep_repository = CsvSweepRepository()

# Use cases
protocol_use_case = ProtocolUseCase(
    setup_repository, transcript_repository, counts_repository, report_repository, SHARD_ROUNDS
)
sweep_use_case = SweepUseCase(setup_repository, sweep_repository)
estimation_use_case = EstimationUseCase()
attack_use_case = AttackUseCase(setup_repository, report_repository, SHARD_ROUNDS)
counts_use_case = CountsUseCase(counts_repository)
config_use_case = ConfigUseCase(setup_repository)


def get_protocol_use_case() -> ProtocolUseCase:
    """Get protocol use case dependency"""
    return protocol_use_case


def get_sweep_use_case() -> SweepUseCase:
    """Get sweep use case dependency"""
    return sweep_use_case


def get_estimation_use_case() -> EstimationUseCase:
    """Get estimation use case dependency"""
    return estimation_use_case


def get_attack_use_case() -> AttackUseCase:
    """Get attack use case dependency"""
    return attack_use_case


def get_counts_use_case() -> CountsUseCase:
    """Get counts use case dependency"""
    return counts_use_case


def get_config_use_case() -> ConfigUseCase:
    """Get config use case dependency"""
    return config_use_case
