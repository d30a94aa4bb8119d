import argparse
import sys
from typing import Optional, Sequence

from src.infrastructure.logger import configure_logging
from src.interface import dispatch, register_controllers


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="swap-qpv",
        description="Simulator for SWAP-test quantum position verification with imperfect photon sources",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging on stderr")
    subparsers = parser.add_subparsers(dest="command", required=True)
    register_controllers(subparsers)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Command-line entry point"""
    args = build_parser().parse_args(argv)
    configure_logging(args.verbose)
    return dispatch(args)


if __name__ == "__main__":
    sys.exit(main())
