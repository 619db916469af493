"""Permutations of [n], runs, the Pop step and the left weak order.

Everything here is one-indexed at the interface: ``p.value_at(i)`` for
``i`` in 1..n and ``p.position_of(k)`` for ``k`` in 1..n.  Storage is a
read-only zero-indexed numpy array plus its inverse.

>>> p = from_values([5, 2, 4, 6, 3, 1])
>>> pop_step(p)
Permutation(2 5 4 1 3 6)
>>> steps_to_sort(p)
4
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence, TextIO

import numpy as np

from . import _kernels as K

__all__ = [
    "Permutation", "RunDecomposition", "InversionSet",
    "InvalidPermutationError", "EmptyPermutationError", "DuplicateValueError",
    "OutOfRangeValueError", "UngarBoundViolation",
    "from_values", "identity", "reverse", "decompose_runs", "pop_step",
    "pop_step_stack", "steps_to_sort", "trajectory", "inversion_set",
    "weak_order_leq", "right_to_left_minima", "max_run_length",
    "parse_permutation", "format_permutation", "read_permutations",
    "write_permutations",
]

# quadratic memory above this
MAX_MATERIALIZED_INVERSIONS = 10_000


class InvalidPermutationError(ValueError):
    pass


class EmptyPermutationError(InvalidPermutationError):
    def __init__(self):
        super().__init__("empty sequence is not a permutation")


class DuplicateValueError(InvalidPermutationError):
    def __init__(self, index: int, value: int):
        self.index = index
        self.value = value
        super().__init__(f"duplicate value {value} at index {index}")


class OutOfRangeValueError(InvalidPermutationError):
    def __init__(self, index: int, value: int, n: int):
        self.index = index
        self.value = value
        super().__init__(f"value {value} at index {index} is outside [1, {n}]")


class UngarBoundViolation(RuntimeError):
    """Raised when sorting exceeds its step cap; always an implementation bug."""


class Permutation:
    """Immutable permutation of [n] in one-line notation."""

    __slots__ = ("_values", "_inverse")

    def __init__(self, values: np.ndarray, inverse: np.ndarray):
        # trusted constructor; use from_values() for untrusted input
        values.flags.writeable = False
        inverse.flags.writeable = False
        self._values = values
        self._inverse = inverse

    @classmethod
    def _from_array(cls, values: np.ndarray) -> Permutation:
        return cls(values, K.inverse_of(values))

    @property
    def n(self) -> int:
        return self._values.shape[0]

    @property
    def values(self) -> np.ndarray:
        """Read-only array of the one-line notation (values 1..n)."""
        return self._values

    @property
    def positions(self) -> np.ndarray:
        """Read-only zero-indexed inverse: ``positions[k - 1] + 1 == position_of(k)``."""
        return self._inverse

    def value_at(self, i: int) -> int:
        if not 1 <= i <= self.n:
            raise IndexError(f"position {i} outside [1, {self.n}]")
        return int(self._values[i - 1])

    def position_of(self, k: int) -> int:
        if not 1 <= k <= self.n:
            raise IndexError(f"value {k} outside [1, {self.n}]")
        return int(self._inverse[k - 1]) + 1

    def is_identity(self) -> bool:
        return bool(K.is_identity(self._values))

    def to_tuple(self) -> tuple[int, ...]:
        return tuple(int(v) for v in self._values)

    def __len__(self) -> int:
        return self.n

    def __iter__(self) -> Iterator[int]:
        return (int(v) for v in self._values)

    def __eq__(self, other) -> bool:
        if isinstance(other, Permutation):
            return np.array_equal(self._values, other._values)
        if isinstance(other, (tuple, list)):
            return self.to_tuple() == tuple(other)
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self._values.tobytes())

    def __repr__(self) -> str:
        if self.n > 20:
            head = " ".join(str(v) for v in self._values[:10])
            return f"Permutation({head} ... n={self.n})"
        return f"Permutation({format_permutation(self)})"


@dataclass(frozen=True)
class RunDecomposition:
    """Maximal decreasing blocks as one-indexed inclusive (start, end) pairs."""

    runs: tuple[tuple[int, int], ...]

    def lengths(self) -> list[int]:
        return [e - s + 1 for s, e in self.runs]

    def __len__(self) -> int:
        return len(self.runs)

    def __iter__(self):
        return iter(self.runs)


@dataclass(frozen=True)
class InversionSet:
    pairs: frozenset[tuple[int, int]]

    def __len__(self) -> int:
        return len(self.pairs)

    def __contains__(self, pair) -> bool:
        return tuple(pair) in self.pairs

    def __le__(self, other: InversionSet) -> bool:
        return self.pairs <= other.pairs


def from_values(values: Sequence[int] | np.ndarray) -> Permutation:
    """Validate ``values`` as a bijection on [n] and wrap it.

    Raises a subclass of InvalidPermutationError; the index reported is
    one-indexed.
    """
    arr = np.array(values, dtype=np.int64, copy=True).reshape(-1)
    n = arr.shape[0]
    if n == 0:
        raise EmptyPermutationError()
    bad = (arr < 1) | (arr > n)
    if bad.any():
        i = int(np.argmax(bad))
        raise OutOfRangeValueError(i + 1, int(arr[i]), n)
    order = np.argsort(arr, kind="stable")
    srt = arr[order]
    dup = srt[1:] == srt[:-1]
    if dup.any():
        i = int(order[1:][dup].min())
        raise DuplicateValueError(i + 1, int(arr[i]))
    return Permutation._from_array(arr)


def identity(n: int) -> Permutation:
    if n < 1:
        raise ValueError(f"identity needs n >= 1, got {n}")
    vals = np.arange(1, n + 1, dtype=np.int64)
    return Permutation(vals, np.arange(n, dtype=np.int64))


def reverse(n: int) -> Permutation:
    """The permutation (n, n-1, ..., 1), the maximum of the left weak order."""
    if n < 1:
        raise ValueError(f"reverse needs n >= 1, got {n}")
    return Permutation(np.arange(n, 0, -1, dtype=np.int64), np.arange(n - 1, -1, -1, dtype=np.int64))


def decompose_runs(p: Permutation) -> RunDecomposition:
    v = p.values
    # a run ends wherever the next entry is larger (or at the end)
    ends = np.flatnonzero(np.append(v[:-1] < v[1:], True))
    starts = np.concatenate(([0], ends[:-1] + 1))
    return RunDecomposition(tuple((int(s) + 1, int(e) + 1) for s, e in zip(starts, ends)))


def pop_step(p: Permutation) -> Permutation:
    """Reverse every run of ``p``."""
    out = p.values.copy()
    inv = p.positions.copy()
    K.pop_inplace(out, inv)
    return Permutation(out, inv)


def pop_step_stack(p: Permutation) -> Permutation:
    """Pop through the single-stack machine; kept as an independent oracle.

    Read left to right: push the entry when it is smaller than the head,
    otherwise empty the whole stack to the output first.
    """
    out: list[int] = []
    stack: list[int] = []
    for x in p:
        if stack and x > stack[-1]:
            while stack:
                out.append(stack.pop())
        stack.append(x)
    while stack:
        out.append(stack.pop())
    return Permutation._from_array(np.array(out, dtype=np.int64))


def steps_to_sort(p: Permutation, cap: int | None = None) -> int:
    """Smallest t with Pop^t(p) = Id_n.

    ``cap`` defaults to n; exceeding it raises UngarBoundViolation.
    """
    if cap is None:
        cap = p.n
    t = int(K.steps_to_sort(p.values, cap))
    if t < 0:
        raise UngarBoundViolation(f"no identity within {cap} steps from {p!r}")
    return t


def trajectory(p: Permutation) -> Iterator[Permutation]:
    """Yield p, Pop(p), Pop^2(p), ... through the first identity.

    Streams one permutation at a time; wrap in ``list()`` to keep history.
    """
    cur = p
    yield cur
    while True:
        out = cur.values.copy()
        inv = cur.positions.copy()
        if not K.pop_inplace(out, inv):
            return
        cur = Permutation(out, inv)
        yield cur


def inversion_set(p: Permutation) -> InversionSet:
    if p.n > MAX_MATERIALIZED_INVERSIONS:
        raise ValueError(
            f"refusing to materialize inversions for n={p.n} > {MAX_MATERIALIZED_INVERSIONS}; "
            "use weak_order_leq for comparisons"
        )
    pos = p.positions
    i, j = np.nonzero(np.triu(pos[None, :] < pos[:, None], k=1))
    return InversionSet(frozenset(zip((i + 1).tolist(), (j + 1).tolist())))


def weak_order_leq(p: Permutation, q: Permutation) -> bool:
    """Inv(p) is a subset of Inv(q)."""
    if p.n != q.n:
        raise ValueError(f"length mismatch: {p.n} vs {q.n}")
    return bool(K.weak_order_leq(p.positions, q.positions))


def right_to_left_minima(p: Permutation) -> frozenset[int]:
    mask = K.rtl_minima_mask(p.values)
    return frozenset(np.flatnonzero(mask).tolist())


def max_run_length(p: Permutation) -> int:
    return int(K.max_run_length(p.values))


# text format: one permutation per line, single spaces, one-indexed values

def format_permutation(p: Permutation) -> str:
    return " ".join(str(int(v)) for v in p.values)


def parse_permutation(line: str) -> Permutation:
    return from_values([int(tok) for tok in line.split(" ") if tok != ""])


def read_permutations(stream: TextIO | Iterable[str]) -> Iterator[Permutation]:
    for line in stream:
        line = line.rstrip("\n")
        if line.strip():
            yield parse_permutation(line)


def write_permutations(stream: TextIO, perms: Iterable[Permutation]) -> None:
    for p in perms:
        stream.write(format_permutation(p) + "\n")
