"""Seeded uniform permutations with one independent substream per trial.

Each (master_seed, trial_index) pair selects a Philox4x64-10 generator whose
key is the master seed and whose 256-bit counter starts at
``trial_index << 192``.  Trials therefore walk disjoint counter ranges
(2**192 blocks each) and no state is shared between them.

The shuffle draws all n-1 swap targets up front, in the order
``j_n, j_{n-1}, ..., j_2`` with ``j_i`` uniform on [1, i], then swaps slot
``i`` with slot ``j_i`` for i = n down to 2.  numpy's bounded integer
routine rejects out-of-range candidates (Lemire's method), so there is no
modulo bias.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels as K
from .perm import Permutation

GENERATOR_NAME = "numpy.random.Philox(4x64-10); key=master_seed; counter[3]=trial_index"

_U64 = 1 << 64


@dataclass(frozen=True)
class StreamSpec:
    master_seed: int
    trial_index: int

    def __post_init__(self):
        if not 0 <= self.master_seed < _U64:
            raise ValueError(f"master_seed must fit in 64 unsigned bits, got {self.master_seed}")
        if not 0 <= self.trial_index < _U64:
            raise ValueError(f"trial_index must be in [0, 2**64), got {self.trial_index}")


def derive_substream(master_seed: int, trial_index: int) -> np.random.Generator:
    """Generator for one trial; same inputs give the same stream everywhere."""
    spec = StreamSpec(master_seed, trial_index)
    bitgen = np.random.Philox(
        counter=[0, 0, 0, spec.trial_index],
        key=spec.master_seed,
    )
    return np.random.Generator(bitgen)


def shuffle_draws(n: int, rng: np.random.Generator) -> np.ndarray:
    """The n-1 one-indexed swap targets, j_n first."""
    if n < 2:
        return np.empty(0, dtype=np.int64)
    highs = np.arange(n, 1, -1, dtype=np.int64)
    return rng.integers(1, highs, endpoint=True, dtype=np.int64)


def uniform_permutation(n: int, stream: StreamSpec | np.random.Generator) -> Permutation:
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    rng = stream if isinstance(stream, np.random.Generator) else derive_substream(
        stream.master_seed, stream.trial_index
    )
    vals = K.fisher_yates(shuffle_draws(n, rng))
    return Permutation._from_array(vals)


def trial_permutation(n: int, master_seed: int, trial_index: int) -> Permutation:
    return uniform_permutation(n, StreamSpec(master_seed, trial_index))
