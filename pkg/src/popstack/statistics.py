"""Per-permutation statistics and cross-trial aggregation.

Real thresholds such as bn or eps*n are floored.  Parameters arrive as
floats but are read through their decimal repr, so ``b=0.92, n=100`` gives
92 rather than whatever 0.92*100 rounds to in binary.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field, fields
from fractions import Fraction
from typing import Any, Iterable, Sequence

import numpy as np

from . import _kernels as K
from .perm import Permutation, max_run_length, pop_step, steps_to_sort

__all__ = [
    "TrialRecord", "StatsSummary", "scaled_floor", "top_block_size",
    "count_X", "expected_X", "count_Y", "count_Y_naive", "expected_Y",
    "larger_to_the_right", "top_block_hit", "step_displacement", "aggregate",
    "BASE_COLUMNS",
]


def as_fraction(x: float | Fraction | int) -> Fraction:
    if isinstance(x, (Fraction, int)):
        return Fraction(x)
    return Fraction(repr(float(x)))


def scaled_floor(x: float | Fraction, n: int) -> int:
    """floor(x * n) with x read as the decimal it was written as."""
    return math.floor(as_fraction(x) * n)


def _check_open_unit(name: str, x: float) -> None:
    if not 0 < x < 1:
        raise ValueError(f"{name} must lie in (0, 1), got {x}")


def top_block_size(n: int) -> int:
    """N = floor(n^(2/3)), computed exactly as the largest N with N^3 <= n^2."""
    target = n * n
    N = round(target ** (1.0 / 3.0))
    while N ** 3 > target:
        N -= 1
    while (N + 1) ** 3 <= target:
        N += 1
    return N


def count_top(p: Permutation, h: int) -> int:
    """Values above h sitting at positions above h."""
    return int(np.count_nonzero(p.values[h:] > h))


def count_X(p: Permutation, b: float) -> int:
    _check_open_unit("b", b)
    return count_top(p, scaled_floor(b, p.n))


def expected_X(b: float, n: int) -> float:
    _check_open_unit("b", b)
    return (1 - b) ** 2 * n


def larger_to_the_right(p: Permutation) -> np.ndarray:
    """ell_i for i = 1..n, returned zero-indexed."""
    return K.larger_to_the_right(p.values)


def count_Y(p: Permutation, eps: float) -> int:
    _check_open_unit("eps", eps)
    thr = scaled_floor(eps, p.n)
    return int(np.count_nonzero(K.larger_to_the_right(p.values) <= thr))


def count_Y_naive(p: Permutation, eps: float) -> int:
    """Quadratic reference for count_Y: compare every pair directly."""
    _check_open_unit("eps", eps)
    thr = scaled_floor(eps, p.n)
    v = p.values
    greater = np.triu(v[None, :] > v[:, None], k=1)
    return int(np.count_nonzero(greater.sum(axis=1) <= thr))


def expected_Y(eps: float, n: float) -> float:
    """(eps ln(1/eps) + eps) n, natural logarithm."""
    _check_open_unit("eps", eps)
    return (eps * math.log(1 / eps) + eps) * n


def top_block_hit(p: Permutation) -> int | None:
    """Largest value in [n-N+1, n] placed within the first N positions."""
    N = top_block_size(p.n)
    if N == 0:
        return None
    head = p.values[:N]
    hits = head[head >= p.n - N + 1]
    return int(hits.max()) if hits.size else None


def step_displacement(p: Permutation) -> int:
    """max_k |pos_p(k) - pos_Pop(p)(k)|."""
    q = pop_step(p)
    return int(np.abs(p.positions - q.positions).max())


BASE_COLUMNS = (
    "n", "trial", "steps", "x_count", "y_count",
    "max_run_input", "max_run_after_pop", "top_block_value",
)


@dataclass
class TrialRecord:
    """One Monte Carlo trial.  Statistics an experiment does not measure stay None."""

    n: int
    trial_index: int
    steps: int | None = None
    x_count: int | None = None
    y_count: int | None = None
    max_run_input: int | None = None
    max_run_after_pop: int | None = None
    top_block_value: int | None = None
    extra: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        for name, hi in (("steps", self.n - 1), ("x_count", self.n), ("y_count", self.n)):
            val = getattr(self, name)
            if val is not None and not 0 <= val <= hi:
                raise ValueError(f"{name}={val} outside [0, {hi}] for n={self.n}")

    @property
    def skipped(self) -> bool:
        return self.extra.get("skip_reason") is not None

    def get(self, name: str) -> Any:
        if name == "trial":
            return self.trial_index
        if name in _RECORD_FIELDS:
            return getattr(self, name)
        if name in self.extra:
            return self.extra[name]
        raise KeyError(name)

    def row(self) -> dict[str, Any]:
        """Flat mapping with the serialized column names."""
        d = asdict(self)
        extra = d.pop("extra")
        d["trial"] = d.pop("trial_index")
        out = {c: d[c] for c in BASE_COLUMNS}
        out.update(extra)
        return out


_RECORD_FIELDS = {f.name for f in fields(TrialRecord)} - {"extra"}


def basic_record(p: Permutation, trial_index: int, b: float = 0.5, eps: float = 0.1,
                 with_steps: bool = True) -> TrialRecord:
    """Every base statistic for one permutation."""
    return TrialRecord(
        n=p.n,
        trial_index=trial_index,
        steps=steps_to_sort(p) if with_steps else None,
        x_count=count_X(p, b),
        y_count=count_Y(p, eps),
        max_run_input=max_run_length(p),
        max_run_after_pop=max_run_length(pop_step(p)),
        top_block_value=top_block_hit(p),
    )


@dataclass(frozen=True)
class StatsSummary:
    count: int
    mean: float
    variance: float
    min: float
    max: float
    ci95_half_width: float

    def as_dict(self) -> dict[str, float]:
        return asdict(self)


def aggregate(records: Sequence[TrialRecord], field_name: str) -> StatsSummary:
    """Mean, unbiased variance, range and normal-approximation 95% CI.

    Records where the field is None (skipped trials, unmeasured columns)
    are left out of ``count``.
    """
    if not records:
        raise ValueError("cannot aggregate an empty record list")
    values = []
    known = False
    for r in records:
        try:
            v = r.get(field_name)
        except KeyError:
            continue
        known = True
        if v is not None:
            values.append(float(v))
    if not known:
        raise KeyError(f"unknown field {field_name!r}")
    if not values:
        raise ValueError(f"field {field_name!r} has no measured values")
    arr = np.array(values)
    count = arr.size
    lo, hi = float(arr.min()), float(arr.max())
    mean = min(max(float(arr.mean()), lo), hi)
    var = float(arr.var(ddof=1)) if count > 1 else 0.0
    return StatsSummary(
        count=count,
        mean=mean,
        variance=var,
        min=lo,
        max=hi,
        ci95_half_width=1.96 * math.sqrt(var / count),
    )


def mean_over_n(records: Iterable[TrialRecord], field_name: str) -> float:
    vals = [r.get(field_name) / r.n for r in records if r.extra.get("skip_reason") is None
            and r.get(field_name) is not None]
    return float(np.mean(vals))
