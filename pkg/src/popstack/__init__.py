"""Pop-Stack Sorting on permutations: simulation, lower-bound machinery and
a seeded Monte Carlo harness."""

__version__ = "0.1.0"

from .perm import (  # noqa: E402
    Permutation, decompose_runs, from_values, identity, inversion_set, max_run_length,
    pop_step, reverse, right_to_left_minima, steps_to_sort, trajectory, weak_order_leq,
)
from .sampler import StreamSpec, derive_substream, uniform_permutation  # noqa: E402

__all__ = [
    "Permutation", "decompose_runs", "from_values", "identity", "inversion_set",
    "max_run_length", "pop_step", "reverse", "right_to_left_minima", "steps_to_sort",
    "trajectory", "weak_order_leq", "StreamSpec", "derive_substream", "uniform_permutation",
]
