import argparse

from ...domain import SourceParams, UncertainValue
from ..dependencies import DEFAULT_CHARACTERIZATION_EFFICIENCY, get_estimation_use_case


def register(subparsers) -> None:
    parser = subparsers.add_parser(
        "estimate",
        help="HOM visibility and indistinguishability from correlations",
        description="Estimator chain from g2 measurements to HOM visibility and indistinguishability M",
    )
    parser.add_argument("--g2-parallel", type=float, help="HOM g2 for parallel polarizations")
    parser.add_argument("--g2-perp", type=float, help="HOM g2 for orthogonal polarizations")
    parser.add_argument("--g2", type=float, help="HBT g2 of the source")
    parser.add_argument("--g2-parallel-err", type=float, default=0.0)
    parser.add_argument("--g2-perp-err", type=float, default=0.0)
    parser.add_argument("--g2-err", type=float, default=0.0)
    parser.add_argument(
        "--simulate-source",
        nargs=2,
        type=float,
        metavar=("G2", "M"),
        help="simulate HOM and HBT for this source instead of reading measured values",
    )
    parser.add_argument("--efficiency", type=float, default=DEFAULT_CHARACTERIZATION_EFFICIENCY)
    parser.set_defaults(handler=estimate)


def estimate(args: argparse.Namespace) -> int:
    """Run the estimator chain"""
    use_case = get_estimation_use_case()
    if args.simulate_source:
        g2, m = args.simulate_source
        result = use_case.characterize(SourceParams(g2=g2, indistinguishability=m), args.efficiency)
    else:
        missing = [
            flag
            for flag, value in (("--g2-parallel", args.g2_parallel), ("--g2-perp", args.g2_perp), ("--g2", args.g2))
            if value is None
        ]
        if missing:
            raise ValueError(f"missing {', '.join(missing)}")
        result = use_case.estimate(
            UncertainValue(args.g2_parallel, args.g2_parallel_err),
            UncertainValue(args.g2_perp, args.g2_perp_err),
            UncertainValue(args.g2, args.g2_err),
        )
    print(f"g2_parallel = {result.g2_parallel:.4f}  g2_perp = {result.g2_perp:.4f}  g2 = {result.g2_hbt:.4f}")
    print(f"V_HOM = {result.visibility:.3f} ± {result.visibility_uncertainty:.3f}")
    print(f"M = {result.indistinguishability:.3f} ± {result.indistinguishability_uncertainty:.3f}")
    return 0
