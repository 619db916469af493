"""White/red/black colouring relative to the pivot m, and the p_t monitor.

Colours are stored per value as small integers ordered so that every legal
recolouring increases the code: black (1) < red (2) < white (3); values
below m carry 0.  Each state is recomputed from the defining predicates,
never updated incrementally.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import _kernels as K
from .perm import Permutation, trajectory
from .statistics import as_fraction, count_top, scaled_floor, top_block_hit

__all__ = [
    "WHITE", "RED", "BLACK", "UNCOLORED",
    "PivotSelection", "ColoringState", "PSeries", "Journey",
    "ColoringInvariantError", "ParameterError", "SkippedTrial",
    "select_m", "init_coloring", "advance_coloring", "red_isolation_violations",
    "track_p", "p_at", "check_queue", "parameter_violations",
    "validate_parameters", "tracked_element_journey",
]

WHITE = K.WHITE
RED = K.RED
BLACK = K.BLACK
UNCOLORED = K.UNCOLORED

COLOR_NAMES = {WHITE: "white", RED: "red", BLACK: "black", UNCOLORED: None}


class ColoringInvariantError(RuntimeError):
    pass


class ParameterError(ValueError):
    pass


class SkippedTrial(Exception):
    """The trial has no pivot m (or no tracked element); not a failure."""

    def __init__(self, reason: str):
        self.reason = reason
        super().__init__(reason)


@dataclass(frozen=True)
class PivotSelection:
    a: float
    m: int | None
    qualifying_count: int


def pivot_threshold(n: int, a: float) -> int:
    return scaled_floor(1 - as_fraction(a) / 4, n)


def select_m(p0: Permutation, a: float) -> PivotSelection:
    """Smallest value above floor((1-a/4)n) that starts above that position."""
    if not 0 < a < 0.5:
        raise ParameterError(f"a must lie in (0, 0.5), got {a}")
    h = pivot_threshold(p0.n, a)
    tail = p0.values[h:]
    qual = tail[tail > h]
    assert qual.size == count_top(p0, h)
    return PivotSelection(a, int(qual.min()) if qual.size else None, int(qual.size))


@dataclass(frozen=True)
class ColoringState:
    t: int
    m: int
    colors: np.ndarray  # indexed by value, length n + 1
    p_t: int
    pos_m: int

    def color_of(self, k: int) -> str | None:
        return COLOR_NAMES[int(self.colors[k])]

    def values_with(self, code: int) -> np.ndarray:
        return np.flatnonzero(self.colors == code)

    def counts(self) -> dict[str, int]:
        return {
            "reds": int(np.count_nonzero(self.colors == RED)),
            "whites": int(np.count_nonzero(self.colors == WHITE)),
            "blacks": int(np.count_nonzero(self.colors == BLACK)),
        }


def _state(p: Permutation, m: int, t: int) -> ColoringState:
    codes, p_t = K.color_codes(p.values, p.positions, m)
    codes.flags.writeable = False
    return ColoringState(t=t, m=m, colors=codes, p_t=int(p_t), pos_m=p.position_of(m))


def init_coloring(p: Permutation, m: int, t: int) -> ColoringState:
    """Colour ``p`` (the permutation at step t) relative to m."""
    if not 1 <= m <= p.n:
        raise ValueError(f"pivot m={m} outside [1, {p.n}]")
    if t < 1:
        raise ValueError(f"colouring starts at t >= 1, got {t}")
    return _state(p, m, t)


def advance_coloring(state: ColoringState, nxt: Permutation) -> ColoringState:
    """State at t+1; ``nxt`` must be Pop of the permutation behind ``state``.

    Raises ColoringInvariantError if any value's colour moves backwards.
    """
    new = _state(nxt, state.m, state.t + 1)
    back = np.flatnonzero(new.colors < state.colors)
    if back.size:
        k = int(back[0])
        raise ColoringInvariantError(
            f"value {k} recoloured {state.color_of(k)} -> {new.color_of(k)} at t={new.t}"
        )
    return new


def red_isolation_violations(prev: Permutation, prev_state: ColoringState,
                             nxt: Permutation, next_state: ColoringState) -> list[int]:
    """Red values flanked by whites that fail to move +1 into white flanks."""
    bad = []
    n = prev.n
    for k in prev_state.values_with(RED):
        q = prev.position_of(int(k))
        if q == 1 or q == n:
            continue
        left, right = prev.value_at(q - 1), prev.value_at(q + 1)
        if prev_state.colors[left] != WHITE or prev_state.colors[right] != WHITE:
            continue
        q2 = nxt.position_of(int(k))
        ok = q2 == q + 1
        # at position n the value has no right neighbour (and is itself white)
        for r in (q2 - 1, q2 + 1):
            if ok and r <= n:
                ok = next_state.colors[nxt.value_at(r)] == WHITE
        if not ok:
            bad.append(int(k))
    return bad


@dataclass
class PSeries:
    m: int
    t0: int
    series: list[tuple[int, int]] = field(default_factory=list)
    reds_violations: list[int] = field(default_factory=list)  # t with p_{t+2} > p_t
    isolation_violations: int = 0
    monitor: list[dict] = field(default_factory=list)


def start_time(n: int, a: float) -> int:
    return max(1, scaled_floor(a, n))


def track_p(sigma: Permutation, a: float, monitor: bool = False) -> PSeries:
    """p_t from t0 = floor(an) until the identity, with every per-step check.

    Every step is recoloured from scratch, checked for monotone recolouring
    and red isolation; afterwards p_{t+2} <= p_t is checked for all t.
    ``monitor`` keeps one row per step (t, p_t, pos_m, colour counts and the
    position of the top-block value, if any).
    Raises SkippedTrial when sigma has no pivot.
    """
    sel = select_m(sigma, a)
    if sel.m is None:
        raise SkippedTrial("no pivot m")
    t0 = start_time(sigma.n, a)
    out = PSeries(m=sel.m, t0=t0)
    tracked = top_block_hit(sigma) if monitor else None

    def row(cur, state):
        pos = cur.position_of(tracked) if tracked is not None else None
        return {"t": state.t, "p_t": state.p_t, "pos_m": state.pos_m, **state.counts(), "tracked_pos": pos}

    prev_p = prev_state = None
    for t, cur in enumerate(trajectory(sigma)):
        if t < t0:
            last = cur
            continue
        if prev_state is None:
            state = init_coloring(cur, sel.m, t)
        else:
            state = advance_coloring(prev_state, cur)
            out.isolation_violations += len(red_isolation_violations(prev_p, prev_state, cur, state))
        out.series.append((t, state.p_t))
        if monitor:
            out.monitor.append(row(cur, state))
        prev_p, prev_state = cur, state
        last = cur
    if prev_state is None:
        # identity reached before t0
        state = init_coloring(last, sel.m, t0)
        out.series.append((t0, state.p_t))
        if monitor:
            out.monitor.append(row(last, state))
    ps = [p for _, p in out.series]
    # the identity repeats forever, so p is constant past the end
    ps_ext = ps + [ps[-1], ps[-1]]
    out.reds_violations = [out.series[0][0] + i for i in range(len(ps)) if ps_ext[i + 2] > ps_ext[i]]
    return out


def p_at(sigma: Permutation, m: int, t: int) -> int:
    """p_t computed directly; beyond termination the identity is used."""
    vals = K.pop_power(sigma.values, t)
    return int(K.p_value(vals, K.inverse_of(vals), m))


def parameter_violations(a: float, c: float, eps: float) -> list[str]:
    """Names of the violated constraints on (a, c, eps); empty when valid."""
    bad = []
    if not 0 < a < 0.5:
        bad.append("a ∈ (0, 0.5)")
    if not a < c < 0.5:
        bad.append("c ∈ (a, 0.5)")
    if not eps > 0:
        bad.append("ε > 0")
    else:
        if not eps * math.log(1 / eps) + 2 * eps < (c - a) / 2:
            bad.append("ε·ln(1/ε) + 2ε < (c−a)/2")
        # exact comparison: eps = a^2/16 must be rejected
        if not as_fraction(eps) < as_fraction(a) ** 2 / 16:
            bad.append("ε < a²/16")
    return bad


def validate_parameters(a: float, c: float, eps: float) -> bool:
    return not parameter_violations(a, c, eps)


def _require(a, c, eps):
    bad = parameter_violations(a, c, eps)
    if bad:
        raise ParameterError("invalid (a, c, eps): violates " + "; ".join(bad))


def queue_bound(n: int, eps: float) -> Fraction:
    return (1 - as_fraction(eps)) * n


def check_queue(sigma: Permutation, a: float, c: float, eps: float) -> bool:
    """p at time floor(cn) is at most (1-eps)n."""
    _require(a, c, eps)
    sel = select_m(sigma, a)
    if sel.m is None:
        raise SkippedTrial("no pivot m")
    p = p_at(sigma, sel.m, scaled_floor(c, sigma.n))
    return p <= queue_bound(sigma.n, eps)


@dataclass
class Journey:
    k: int | None
    m: int | None
    steps: int
    positions: np.ndarray  # position of k at t = 0..steps
    p_series: np.ndarray  # p_t for t = t0..max(steps, t0)
    t0: int
    tc: int
    pos_at_cn: int | None
    p_at_cn: int | None
    overtake_step: int | None
    unit_moves_after_overtake: bool | None

    def __len__(self) -> int:
        return self.steps


def tracked_element_journey(sigma: Permutation, a: float, c: float, eps: float) -> Journey:
    """Follow the top-block value k of sigma through the whole trajectory.

    Reports k's position at floor(cn), the first t >= t0 with
    pos(k) > p_t, and whether from then on k gains exactly one position per
    step until it sits at position k.
    """
    _require(a, c, eps)
    n = sigma.n
    t0 = start_time(n, a)
    tc = scaled_floor(c, n)
    if sigma.is_identity():
        return Journey(None, None, 0, np.empty(0, dtype=np.int64), np.empty(0, dtype=np.int64),
                       t0, tc, None, None, None, None)
    k = top_block_hit(sigma)
    if k is None:
        raise SkippedTrial("no tracked element in the top block")
    sel = select_m(sigma, a)
    if sel.m is None:
        raise SkippedTrial("no pivot m")
    steps, p_series, positions = K.run_with_p(sigma.values, sel.m, t0, k)
    if steps < 0:
        raise RuntimeError("trajectory exceeded n steps")

    def pos_at(t):
        return int(positions[min(t, steps)])

    def p_of(t):
        return int(p_series[min(t - t0, p_series.shape[0] - 1)])

    overtake = None
    for t in range(t0, max(steps, t0) + 1):
        if pos_at(t) > p_of(t):
            overtake = t
            break
    unit = None
    if overtake is not None:
        unit = True
        t = overtake
        while pos_at(t) != k:
            if t >= steps or pos_at(t + 1) != pos_at(t) + 1:
                unit = False
                break
            t += 1
    return Journey(
        k=k, m=sel.m, steps=steps, positions=positions, p_series=p_series, t0=t0, tc=tc,
        pos_at_cn=pos_at(tc), p_at_cn=p_of(max(tc, t0)), overtake_step=overtake,
        unit_moves_after_overtake=unit,
    )
