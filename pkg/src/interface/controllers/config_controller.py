import argparse

from ..dependencies import DEFAULT_CONFIG, get_config_use_case
from .common import format_table


def register(subparsers) -> None:
    parser = subparsers.add_parser(
        "validate-config",
        help="validate a setup document",
        description="Load a setup document and print its composed transmissions",
    )
    parser.add_argument("--config", default=DEFAULT_CONFIG, help="bundled config name or path")
    parser.add_argument("--canonical", action="store_true", help="print the canonical document instead")
    parser.set_defaults(handler=validate_config)


def validate_config(args: argparse.Namespace) -> int:
    """Validate a setup configuration"""
    use_case = get_config_use_case()
    if args.canonical:
        print(use_case.canonical(args.config), end="")
        return 0
    summary = use_case.validate(args.config)
    print(f"config: {summary.name} is valid")
    print(f"enabled bases: {', '.join(summary.enabled_bases)}")
    print(f"source: g2 = {summary.source['g2']:.4f}  M = {summary.source['indistinguishability']:.4f}  "
          f"p2 = {summary.source['p2']:.5f}")
    print(format_table(("arm", "transmission"), ((a, f"{t:.4f}") for a, t in summary.arm_transmission.items())))
    print(format_table(("splitter", "upper ratio"), ((b, f"{r:.3f}") for b, r in summary.split_ratios.items())))
    print(format_table(("path", "survival"), ((p, f"{s:.4f}") for p, s in summary.path_survival.items())))
    return 0
