from abc import ABC, abstractmethod
from pathlib import Path
from typing import Any, Mapping, Optional

import numpy as np

from ..entities import (
    CountsTable,
    Geometry,
    ProtocolSettings,
    ResponseBatch,
    RoundBatch,
    SetupConfig,
    SweepResult,
    Transcript,
)


class ProverInterface(ABC):
    """Whoever answers the verifiers: the honest prover or colluding adversaries"""

    @abstractmethod
    def respond(
        self,
        batch: RoundBatch,
        uniforms: np.ndarray,
        geometry: Geometry,
        settings: ProtocolSettings,
    ) -> ResponseBatch:
        pass


class SetupRepositoryInterface(ABC):
    """Repository interface for setup configurations"""

    @abstractmethod
    def get(self, name_or_path: str) -> SetupConfig:
        pass

    @abstractmethod
    def parse(self, text: str) -> SetupConfig:
        pass

    @abstractmethod
    def serialize(self, config: SetupConfig) -> str:
        pass

    @abstractmethod
    def read_text(self, name_or_path: str) -> str:
        pass


class TranscriptRepositoryInterface(ABC):
    """Repository interface for protocol transcripts"""

    @abstractmethod
    def save(self, transcript: Transcript, path: Path) -> None:
        pass


class CountsRepositoryInterface(ABC):
    """Repository interface for coincidence and singles counts"""

    @abstractmethod
    def save(self, counts: CountsTable, coincidences_path: Path, singles_path: Path) -> None:
        pass

    @abstractmethod
    def load(self, coincidences_path: Path, singles_path: Optional[Path] = None) -> CountsTable:
        pass


class ReportRepositoryInterface(ABC):
    """Repository interface for structured report documents"""

    @abstractmethod
    def save(self, document: Mapping[str, Any], path: Path) -> None:
        pass


class SweepRepositoryInterface(ABC):
    """Repository interface for sweep grids and threshold contours"""

    @abstractmethod
    def save(self, result: SweepResult, grid_path: Path, contour_path: Path) -> None:
        pass
