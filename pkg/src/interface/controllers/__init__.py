import argparse

from . import (
    analyze_controller,
    attack_controller,
    config_controller,
    estimate_controller,
    simulate_controller,
    sweep_controller,
)
from ...infrastructure.logger import get_logger


logger = get_logger(__name__)

CONTROLLERS = (
    simulate_controller,
    sweep_controller,
    estimate_controller,
    attack_controller,
    config_controller,
    analyze_controller,
)


def register_controllers(subparsers) -> None:
    for controller in CONTROLLERS:
        controller.register(subparsers)


def dispatch(args: argparse.Namespace) -> int:
    """Run the selected command; invalid input and I/O failures become exit status 1"""
    try:
        return args.handler(args)
    except (ValueError, OSError) as e:
        logger.error("%s", e)
        return 1


__all__ = ["CONTROLLERS", "register_controllers", "dispatch"]
