# Interface layer exports
from .controllers import dispatch, register_controllers
from .dependencies import (
    get_attack_use_case,
    get_config_use_case,
    get_counts_use_case,
    get_estimation_use_case,
    get_protocol_use_case,
    get_sweep_use_case,
)

__all__ = [
    "dispatch",
    "register_controllers",
    "get_attack_use_case",
    "get_config_use_case",
    "get_counts_use_case",
    "get_estimation_use_case",
    "get_protocol_use_case",
    "get_sweep_use_case",
]
