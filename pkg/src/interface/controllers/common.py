import argparse
from typing import Iterable, List, Optional, Sequence

from ...application import VerificationReportDTO


def round_count(text: str) -> int:
    """Positive integer that may be written in float notation, e.g. 1e6"""
    try:
        value = int(text)
    except ValueError:
        try:
            value = float(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"invalid round count '{text}'") from None
        if not value.is_integer():
            raise argparse.ArgumentTypeError(f"round count must be an integer, got '{text}'")
        value = int(value)
    if value < 1:
        raise argparse.ArgumentTypeError("round count must be at least 1")
    return value


def add_execution_arguments(parser: argparse.ArgumentParser, workers: int) -> None:
    parser.add_argument("--seed", type=int, default=None, help="master seed (required for Monte Carlo)")
    parser.add_argument("--workers", type=int, default=workers, help="worker processes")


def format_value(value: Optional[float]) -> str:
    return "-" if value is None else f"{value:.4f}"


def format_uncertain(value: float, uncertainty: Optional[float]) -> str:
    if uncertainty is None:
        return format_value(value)
    return f"{value:.4f} ± {uncertainty:.4f}"


def format_table(header: Sequence[str], rows: Iterable[Sequence[str]]) -> str:
    """Left-aligned first column, right-aligned value columns"""
    rows: List[Sequence[str]] = [tuple(header)] + [tuple(r) for r in rows]
    widths = [max(len(str(r[i])) for r in rows) for i in range(len(header))]
    lines = []
    for row in rows:
        cells = [str(row[0]).ljust(widths[0])]
        cells += [str(c).rjust(w) for c, w in zip(row[1:], widths[1:])]
        lines.append("  ".join(cells))
    return "\n".join(lines)


def format_report(report: VerificationReportDTO) -> str:
    lines = [
        f"rounds: {report.rounds}",
        f"pooled conclusive correctness: {report.pooled_conclusive_correctness.value:.4f} "
        f"[{report.pooled_conclusive_correctness.lower:.4f}, {report.pooled_conclusive_correctness.upper:.4f}]",
        f"round-check failures: {report.round_check_failures}",
        f"verdict: {report.verdict}",
    ]
    lines += [f"  violation: {v}" for v in report.violations]
    return "\n".join(lines)
