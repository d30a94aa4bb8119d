"""Counter-based random streams, one per protocol round.

Every round owns a fixed block of uniforms drawn from a Philox stream keyed by
(master seed, domain). Round k starts at counter k * BLOCKS_PER_ROUND, so a
block of consecutive rounds generated in one call is identical to the same
rounds generated one by one. Shards and workers therefore never change results.
"""
from dataclasses import dataclass

import numpy as np


PREPARATION_SLOTS = slice(0, 3)
OPTICS_SLOTS = slice(3, 23)
ADVERSARY_SLOTS = slice(23, 31)
UNIFORMS_PER_ROUND = 32

# Philox emits four 64-bit words per counter step, one double per word
_WORDS_PER_BLOCK = 4
BLOCKS_PER_ROUND = UNIFORMS_PER_ROUND // _WORDS_PER_BLOCK

_UINT64_LIMIT = 2**64


def _generator(master_seed: int, domain: int, first_round: int) -> np.random.Generator:
    if not 0 <= master_seed < _UINT64_LIMIT:
        raise ValueError("Master seed must lie in [0, 2^64)")
    if not 0 <= domain < _UINT64_LIMIT:
        raise ValueError("Stream domain must lie in [0, 2^64)")
    if first_round < 0:
        raise ValueError("Round index cannot be negative")
    key = np.array([master_seed, domain], dtype=np.uint64)
    return np.random.Generator(
        np.random.Philox(key=key, counter=first_round * BLOCKS_PER_ROUND)
    )


def round_uniforms(master_seed: int, first_round: int, count: int, domain: int = 0) -> np.ndarray:
    """Uniform block of shape (count, UNIFORMS_PER_ROUND) for rounds first_round.."""
    if count < 0:
        raise ValueError("Round count cannot be negative")
    generator = _generator(master_seed, domain, first_round)
    return generator.random((count, UNIFORMS_PER_ROUND))


@dataclass(frozen=True, eq=False)
class RoundStream:
    """Uniforms owned by a single round"""
    master_seed: int
    round_index: int
    domain: int = 0

    def __post_init__(self):
        uniforms = round_uniforms(self.master_seed, self.round_index, 1, self.domain)[0]
        uniforms.setflags(write=False)
        object.__setattr__(self, "_uniforms", uniforms)

    @property
    def uniforms(self) -> np.ndarray:
        return self._uniforms

    @property
    def preparation(self) -> np.ndarray:
        return self._uniforms[PREPARATION_SLOTS]

    @property
    def optics(self) -> np.ndarray:
        return self._uniforms[OPTICS_SLOTS]

    @property
    def adversary(self) -> np.ndarray:
        return self._uniforms[ADVERSARY_SLOTS]
