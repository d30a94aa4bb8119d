import csv
import json
from pathlib import Path
from typing import Any, Mapping, Optional

import numpy as np

from ...domain import (
    CountsRepositoryInterface,
    CountsTable,
    ReportRepositoryInterface,
    SweepRepositoryInterface,
    SweepResult,
    Transcript,
    TranscriptRepositoryInterface,
)
from ...domain.entities import ALL_PATTERNS, ANSWERS, BASES, PARITIES
from ..config import DATA_DIR, resolve_bundled
from ..logger import get_logger


logger = get_logger(__name__)

TRANSCRIPT_HEADER = ("round", "basis", "parity", "pattern", "z", "t_v0", "t_v1")
SWEEP_HEADER = ("purity", "indistinguishability", "p0_given_parallel_conclusive")
CONTOUR_HEADER = ("purity", "indistinguishability_threshold")


def _prepare(path: Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    return path


class CsvTranscriptRepository(TranscriptRepositoryInterface):
    """Transcript as one CSV row per round"""

    def save(self, transcript: Transcript, path: Path) -> None:
        path = _prepare(path)
        basis = np.array([b.value for b in BASES])[transcript.basis]
        parity = np.array([p.value for p in PARITIES])[transcript.parity]
        answer = np.array([a.value for a in ANSWERS])[transcript.answer_v0]
        # last slot holds the label of rounds without optics (NO_PATTERN == -1)
        pattern = np.array([p.labels for p in ALL_PATTERNS] + [""])[transcript.pattern]
        rows = zip(
            transcript.round_index.tolist(),
            basis.tolist(),
            parity.tolist(),
            pattern.tolist(),
            answer.tolist(),
            map(repr, transcript.t_v0.tolist()),
            map(repr, transcript.t_v1.tolist()),
        )
        with path.open("w", newline="", encoding="utf-8") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(TRANSCRIPT_HEADER)
            writer.writerows(rows)
        logger.debug("Wrote %d transcript rows to %s", len(transcript), path)


class CsvCountsRepository(CountsRepositoryInterface):
    """Coincidences as `pair,count` and singles as `detector,count`"""

    def __init__(self, data_dir: Path = DATA_DIR):
        self._data_dir = data_dir

    def save(self, counts: CountsTable, coincidences_path: Path, singles_path: Path) -> None:
        for path, header, rows in (
            (coincidences_path, ("pair", "count"), counts.coincidences.items()),
            (singles_path, ("detector", "count"), counts.singles.items()),
        ):
            with _prepare(path).open("w", newline="", encoding="utf-8") as f:
                writer = csv.writer(f, lineterminator="\n")
                writer.writerow(header)
                writer.writerows(rows)

    def load(self, coincidences_path: Path, singles_path: Optional[Path] = None) -> CountsTable:
        coincidences = self._read(coincidences_path, "pair")
        singles = self._read(singles_path, "detector") if singles_path else {}
        return CountsTable(coincidences=coincidences, singles=singles)

    def _read(self, name_or_path, key: str) -> Mapping[str, int]:
        path = resolve_bundled(name_or_path, ".csv", self._data_dir)
        with path.open(newline="", encoding="utf-8") as f:
            reader = csv.DictReader(f)
            if reader.fieldnames is None or set(reader.fieldnames) != {key, "count"}:
                raise ValueError(f"{path}: expected header '{key},count'")
            rows = {}
            for row in reader:
                try:
                    rows[row[key]] = int(row["count"])
                except ValueError:
                    raise ValueError(f"{path}: malformed count '{row['count']}'") from None
            return rows


class JsonReportRepository(ReportRepositoryInterface):
    """Structured reports as pretty-printed JSON"""

    def save(self, document: Mapping[str, Any], path: Path) -> None:
        with _prepare(path).open("w", encoding="utf-8") as f:
            json.dump(document, f, indent=2, sort_keys=True)
            f.write("\n")


class CsvSweepRepository(SweepRepositoryInterface):
    """Sweep grid plus one 2/3-threshold row per purity"""

    def save(self, result: SweepResult, grid_path: Path, contour_path: Path) -> None:
        with _prepare(grid_path).open("w", newline="", encoding="utf-8") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(SWEEP_HEADER)
            for cell in result.cells:
                writer.writerow(
                    (
                        repr(float(cell.purity)),
                        repr(float(cell.indistinguishability)),
                        repr(float(cell.p0_given_parallel_conclusive)),
                    )
                )
        with _prepare(contour_path).open("w", newline="", encoding="utf-8") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(CONTOUR_HEADER)
            for purity, threshold in result.thresholds:
                writer.writerow((repr(float(purity)), "" if threshold is None else repr(float(threshold))))
        logger.debug("Wrote %d sweep cells to %s", len(result.cells), grid_path)
