import argparse

from ...application import SweepRequestDTO
from ..dependencies import DEFAULT_CONFIG, DEFAULT_SWEEP_STEPS, DEFAULT_WORKERS, get_sweep_use_case
from .common import add_execution_arguments, format_table, format_value, round_count


def register(subparsers) -> None:
    parser = subparsers.add_parser(
        "sweep",
        help="sweep purity and indistinguishability",
        description="Grid of P(0|parallel,concl.) over purity and indistinguishability",
    )
    parser.add_argument("--config", default=DEFAULT_CONFIG, help="bundled config name or path")
    parser.add_argument("--purity-min", type=float, default=0.5)
    parser.add_argument("--purity-max", type=float, default=1.0)
    parser.add_argument("--m-min", type=float, default=0.0, help="lowest indistinguishability")
    parser.add_argument("--m-max", type=float, default=1.0, help="highest indistinguishability")
    parser.add_argument("--steps", type=int, default=DEFAULT_SWEEP_STEPS, help="grid points per axis")
    parser.add_argument(
        "--rounds-per-cell", type=round_count, default=None, help="Monte Carlo rounds per cell (default: exact)"
    )
    parser.add_argument("--output", required=True, help="grid CSV; the contour goes next to it")
    add_execution_arguments(parser, DEFAULT_WORKERS)
    parser.set_defaults(handler=sweep)


def sweep(args: argparse.Namespace) -> int:
    """Run a parameter sweep"""
    dto = SweepRequestDTO(
        config=args.config,
        purity_min=args.purity_min,
        purity_max=args.purity_max,
        indistinguishability_min=args.m_min,
        indistinguishability_max=args.m_max,
        steps=args.steps,
        rounds_per_cell=args.rounds_per_cell,
        seed=args.seed,
        output=args.output,
        workers=args.workers,
    )
    result = get_sweep_use_case().run(dto)
    print(f"{len(result.cells)} cells ({'exact' if result.spec.exact else 'Monte Carlo'})")
    print(
        format_table(
            ("purity", "M threshold"),
            ((f"{purity:.4f}", format_value(threshold)) for purity, threshold in result.thresholds),
        )
    )
    return 0
