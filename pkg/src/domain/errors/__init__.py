from typing import Iterable


class QpvError(ValueError):
    """Base error of the simulator"""


class PreconditionError(QpvError):
    """An input violates an operation precondition"""


class DomainError(QpvError):
    """A value lies outside the mathematical domain of an operation"""


class UnsupportedRegimeError(QpvError):
    """Source parameters outside the two-photon truncated model"""


class ConfigError(QpvError):
    """Configuration document could not be parsed or validated"""

    def __init__(self, key: str, message: str):
        self.key = key
        super().__init__(f"{key}: {message}")


class StrategyNotFoundError(QpvError):
    """Unknown attacker strategy name"""

    def __init__(self, name: str, available: Iterable[str]):
        self.name = name
        self.available = sorted(available)
        super().__init__(
            f"Unknown strategy '{name}'. Available strategies: {', '.join(self.available)}"
        )
