import argparse

from ..dependencies import get_counts_use_case
from .common import format_table


def register(subparsers) -> None:
    parser = subparsers.add_parser(
        "analyze",
        help="conditional answers and normalized coincidences from counts",
        description="Analyse `pair,count` coincidences and optional `detector,count` singles",
    )
    parser.add_argument("--coincidences", required=True, help="coincidences CSV or bundled name")
    parser.add_argument("--singles", default=None, help="singles CSV or bundled name")
    parser.set_defaults(handler=analyze)


def analyze(args: argparse.Namespace) -> int:
    """Analyze measured counts"""
    analysis = get_counts_use_case().analyze(args.coincidences, args.singles)
    normalized = analysis.normalized_coincidences
    header = ("pair", "count") + (("normalized",) if normalized else ())
    rows = [
        (pair, str(count)) + ((f"{normalized[pair]:.4g}",) if normalized else ())
        for pair, count in analysis.coincidences.items()
    ]
    print(format_table(header, rows))
    print(f"P(0|concl.) = {analysis.conditional_answers['0']:.2f}")
    print(f"P(1|concl.) = {analysis.conditional_answers['1']:.2f}")
    return 0
