"""Exhaustive checks over all of S_n for small n."""

from __future__ import annotations

import csv
import itertools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Callable, Iterator, TextIO

import numpy as np

from . import _kernels as K
from .particle import check_lemma_Lk
from .perm import Permutation, max_run_length, pop_step, pop_step_stack, steps_to_sort

__all__ = [
    "StepDistribution", "UniversalResult", "PROPERTIES", "enumerate_permutations",
    "exact_step_distribution", "verify_universal", "write_distribution_csv",
    "read_distribution_csv",
]

DEFAULT_MAX_N = 10
HARD_MAX_N = 12


def _check_n(n: int, allow_large: bool) -> None:
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if n > HARD_MAX_N:
        raise ValueError(f"exhaustive enumeration is not supported above n={HARD_MAX_N}")
    if n > DEFAULT_MAX_N and not allow_large:
        raise ValueError(
            f"n={n} means {math.factorial(n)} permutations; pass allow_large=True to proceed"
        )


def enumerate_permutations(n: int, allow_large: bool = False) -> Iterator[Permutation]:
    """All n! permutations in lexicographic order, one at a time."""
    _check_n(n, allow_large)
    for tup in itertools.permutations(range(1, n + 1)):
        yield Permutation._from_array(np.array(tup, dtype=np.int64))


@dataclass(frozen=True)
class StepDistribution:
    n: int
    counts: dict[int, int]

    def __post_init__(self):
        if sum(self.counts.values()) != math.factorial(self.n):
            raise ValueError(f"counts sum to {sum(self.counts.values())}, not {self.n}!")
        if max(self.counts) > self.n - 1:
            raise ValueError(f"step count {max(self.counts)} exceeds n-1 = {self.n - 1}")
        if self.counts.get(0) != 1:
            raise ValueError("exactly one permutation (the identity) needs 0 steps")

    @property
    def max_steps(self) -> int:
        return max(self.counts)


def _histogram_for_first(args: tuple[int, int]) -> np.ndarray:
    n, first = args
    return K.step_histogram_with_first(n, first)


def exact_step_distribution(n: int, workers: int = 1, allow_large: bool = False) -> StepDistribution:
    """Histogram of steps_to_sort over S_n.

    The work splits by first entry into n independent chunks; merging is a
    plain sum, so the result does not depend on ``workers``.
    """
    _check_n(n, allow_large)
    jobs = [(n, first) for first in range(1, n + 1)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_histogram_for_first, jobs))
    else:
        parts = [_histogram_for_first(j) for j in jobs]
    hist = np.sum(parts, axis=0)
    if hist[n - 1] >= 1 << 40:
        raise AssertionError(f"Ungar bound breached in S_{n}")
    counts = {t: int(c) for t, c in enumerate(hist) if c}
    return StepDistribution(n, counts)


def _ungar(p: Permutation, **_) -> bool:
    return steps_to_sort(p) <= max(p.n - 1, 0)


def _pop_run_3(p: Permutation, **_) -> bool:
    return max_run_length(pop_step(p)) <= 3


def _raw_run_3(p: Permutation, **_) -> bool:
    # deliberately wrong target: the bound is about the image of Pop
    return max_run_length(p) <= 3


def _lemma_lk(p: Permutation, b: float = 0.5, **_) -> bool:
    return check_lemma_Lk(p, b)


def _displacement_2(p: Permutation, **_) -> bool:
    q = pop_step(p)
    r = pop_step(q)
    return bool((r.positions - q.positions).max() <= 2)


def _stack_agrees(p: Permutation, **_) -> bool:
    return pop_step(p) == pop_step_stack(p)


def _fixed_point(p: Permutation, **_) -> bool:
    return (pop_step(p) == p) == p.is_identity()


PROPERTIES: dict[str, Callable[..., bool]] = {
    "ungar": _ungar,
    "pop-run-3": _pop_run_3,
    "raw-run-3": _raw_run_3,
    "lemma-Lk": _lemma_lk,
    "displacement-2": _displacement_2,
    "stack-agrees": _stack_agrees,
    "fixed-point": _fixed_point,
}


@dataclass(frozen=True)
class UniversalResult:
    property: str
    n: int
    holds: bool
    checked: int
    counterexample: Permutation | None = None


def verify_universal(n: int, prop: str, allow_large: bool = False, **params) -> UniversalResult:
    """Check a named predicate on every permutation of [n].

    Stops at the lexicographically first counterexample.
    """
    try:
        pred = PROPERTIES[prop]
    except KeyError:
        raise ValueError(f"unknown property {prop!r}; known: {sorted(PROPERTIES)}") from None
    checked = 0
    for p in enumerate_permutations(n, allow_large):
        checked += 1
        if not pred(p, **params):
            return UniversalResult(prop, n, False, checked, p)
    return UniversalResult(prop, n, True, checked)


def write_distribution_csv(stream: TextIO, dist: StepDistribution) -> None:
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(["t", "count"])
    for t in sorted(dist.counts):
        w.writerow([t, dist.counts[t]])


def read_distribution_csv(stream: TextIO, n: int) -> StepDistribution:
    rows = list(csv.DictReader(stream))
    return StepDistribution(n, {int(r["t"]): int(r["count"]) for r in rows})
