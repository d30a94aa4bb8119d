# Infrastructure layer exports
from .logger import configure_logging, get_logger
from .config import DATA_DIR, JsonSetupRepository, resolve_bundled
from .storage import (
    CsvCountsRepository,
    CsvSweepRepository,
    CsvTranscriptRepository,
    JsonReportRepository,
)
from .execution import ShardExecutor

__all__ = [
    "configure_logging",
    "get_logger",
    "DATA_DIR",
    "JsonSetupRepository",
    "resolve_bundled",
    "CsvCountsRepository",
    "CsvSweepRepository",
    "CsvTranscriptRepository",
    "JsonReportRepository",
    "ShardExecutor",
]
