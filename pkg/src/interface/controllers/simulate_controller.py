import argparse

from ...application import SimulateRequestDTO
from ..dependencies import DEFAULT_CONFIG, DEFAULT_ROUNDS, DEFAULT_WORKERS, get_protocol_use_case
from .common import (
    add_execution_arguments,
    format_report,
    format_table,
    format_uncertain,
    format_value,
    round_count,
)


def register(subparsers) -> None:
    parser = subparsers.add_parser(
        "simulate",
        help="run the honest protocol",
        description="Run the honest prover and print theory vs model vs simulated probabilities",
    )
    parser.add_argument("--config", default=DEFAULT_CONFIG, help="bundled config name or path")
    parser.add_argument("--n", type=round_count, default=DEFAULT_ROUNDS, help="number of rounds")
    parser.add_argument("--exact", action="store_true", help="exact engine instead of Monte Carlo")
    parser.add_argument("--ideal-source", action="store_true", help="replace the source by g2=0, M=1")
    parser.add_argument("--bases", type=int, choices=(1, 2, 3), default=None, help="number of enabled bases")
    parser.add_argument("--output", default=None, help="directory for transcript, counts and report")
    add_execution_arguments(parser, DEFAULT_WORKERS)
    parser.set_defaults(handler=simulate)


def simulate(args: argparse.Namespace) -> int:
    """Simulate the protocol"""
    dto = SimulateRequestDTO(
        config=args.config,
        n=args.n,
        seed=args.seed,
        exact=args.exact,
        ideal_source=args.ideal_source,
        bases=args.bases,
        output_dir=args.output,
        workers=args.workers,
    )
    summary = get_protocol_use_case().simulate(dto)

    mode = "exact" if summary.exact else f"Monte Carlo, seed {summary.seed}"
    print(f"config: {summary.config} ({mode})")
    header = ("quantity", "theory", "model") + (() if summary.exact else ("simulated",))
    rows = [
        (row.quantity, format_value(row.theory), format_uncertain(row.model, row.model_uncertainty))
        + (() if summary.exact else (format_value(row.simulated),))
        for row in summary.rows
    ]
    print(format_table(header, rows))
    if summary.pattern_total_variation:
        distances = ", ".join(f"{k} {v:.4f}" for k, v in summary.pattern_total_variation.items())
        print(f"click-pattern distance to model (TV): {distances}")
    print(format_report(summary.report))
    for path in summary.written:
        print(f"wrote {path}")
    return 0
