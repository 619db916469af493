"""Deterministic exclusion process and its coupling with Pop-Stack Sorting.

Particles start packed on the top floor(bn/2) positions.  The first step
is idle; afterwards every particle whose left neighbour was a hole before
the step moves one position left, all simultaneously.

The watched interval is the initially occupied block
[n - floor(bn/2) + 1, n].  It empties after exactly 2*floor(bn/2) steps.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import TextIO

import numpy as np

from . import _kernels as K
from .perm import Permutation, trajectory
from .statistics import as_fraction, scaled_floor

__all__ = [
    "ParticleConfig", "CouplingReport", "init_particles", "particle_count",
    "particle_step", "watched_interval", "expected_evacuation_time",
    "evacuation_time", "dominates", "reds_right_of", "positions_right_of",
    "qualifying_values", "coupling_check", "check_lemma_Lk", "write_particle_trace",
]


@dataclass(frozen=True)
class ParticleConfig:
    n: int
    occupied: tuple[int, ...]  # ascending, one-indexed
    t: int = 0

    def __post_init__(self):
        occ = self.occupied
        if any(b <= a for a, b in zip(occ, occ[1:])):
            raise ValueError("occupied positions must be strictly increasing")
        if occ and (occ[0] < 1 or occ[-1] > self.n):
            raise ValueError(f"occupied positions must lie in [1, {self.n}]")

    def within(self, lo: int, hi: int) -> tuple[int, ...]:
        return tuple(q for q in self.occupied if lo <= q <= hi)


def particle_count(n: int, b: float) -> int:
    return int(as_fraction(b) * n // 2)


def init_particles(n: int, b: float) -> ParticleConfig:
    if not 0 < b < 1:
        raise ValueError(f"b must lie in (0, 1), got {b}")
    k = particle_count(n, b)
    if k < 1:
        raise ValueError(f"floor(b*n/2) = 0 for n={n}, b={b}: no particles")
    return ParticleConfig(n, tuple(range(n - k + 1, n + 1)), 0)


def particle_step(c: ParticleConfig) -> ParticleConfig:
    if c.t == 0:
        return ParticleConfig(c.n, c.occupied, 1)
    occ = set(c.occupied)
    moved = tuple(q - 1 if q > 1 and (q - 1) not in occ else q for q in c.occupied)
    return ParticleConfig(c.n, moved, c.t + 1)


def watched_interval(n: int, b: float) -> tuple[int, int]:
    return n - particle_count(n, b) + 1, n


def expected_evacuation_time(n: int, b: float) -> int:
    """2*floor(bn/2); equals bn whenever bn is an even integer."""
    return 2 * particle_count(n, b)


def evacuation_time(n: int, b: float) -> int:
    """First t at which no particle remains in the watched interval."""
    c = init_particles(n, b)
    lo, hi = watched_interval(n, b)
    while c.within(lo, hi):
        c = particle_step(c)
    expected = expected_evacuation_time(n, b)
    if c.t != expected:
        raise AssertionError(f"evacuation at t={c.t}, expected {expected} (n={n}, b={b})")
    return c.t


def dominates(A, B) -> bool:
    """A <= B in the domination order: |A| <= |B| and the r-th largest of A
    never exceeds the r-th largest of B."""
    a = sorted(A, reverse=True)
    b = sorted(B, reverse=True)
    if len(a) > len(b):
        return False
    return all(x <= y for x, y in zip(a, b))


def reds_right_of(p: Permutation, s: int) -> frozenset[int]:
    """Values smaller than s sitting to the right of s."""
    pos = p.position_of(s)
    tail = p.values[pos:]
    return frozenset(tail[tail < s].tolist())


def positions_right_of(p: Permutation, s: int) -> frozenset[int]:
    """One-indexed positions of the values in reds_right_of(p, s)."""
    pos = p.position_of(s)
    tail = p.values[pos:]
    return frozenset((np.flatnonzero(tail < s) + pos + 1).tolist())


def qualifying_values(p: Permutation, b: float) -> list[int]:
    """Values s > floor((1-b/4)n) whose position is also > floor((1-b/4)n)."""
    h = scaled_floor(1 - as_fraction(b) / 4, p.n)
    tail = p.values[h:]
    return sorted(tail[tail > h].tolist())


@dataclass
class CouplingReport:
    s: int
    b: float
    ok: bool
    first_violation: int | None = None
    monotone_ok: bool = True
    position_floor_ok: bool = True
    trace: list[tuple[int, tuple[int, ...], tuple[int, ...]]] = field(default_factory=list)

    @property
    def all_ok(self) -> bool:
        return self.ok and self.monotone_ok and self.position_floor_ok


def coupling_check(sigma: Permutation, s: int, b: float, keep_trace: bool = False) -> CouplingReport:
    """Run Pop and the particle process in lockstep for t = 0..floor(bn).

    At each t the position set of R_t (values < s right of s) must be
    dominated by the particles inside the watched interval.  Also checks
    that each r-th largest position of R_t never increases and that s stays
    above floor((1-b/2)n).
    """
    n = sigma.n
    h = scaled_floor(1 - as_fraction(b) / 4, n)
    if not (h < s <= n and sigma.position_of(s) > h):
        raise ValueError(f"s={s} does not satisfy s > {h} and initial position > {h}")
    floor_pos = scaled_floor(1 - as_fraction(b) / 2, n) + 1
    horizon = scaled_floor(b, n)
    lo, hi = watched_interval(n, b)

    report = CouplingReport(s=s, b=b, ok=True)
    cfg = init_particles(n, b)
    perms = trajectory(sigma)
    cur = next(perms)
    prev_desc: list[int] | None = None
    for t in range(horizon + 1):
        R = positions_right_of(cur, s)
        Rp = cfg.within(lo, hi)
        if keep_trace:
            report.trace.append((t, tuple(sorted(R)), Rp))
        if report.ok and not dominates(R, Rp):
            report.ok = False
            report.first_violation = t
        desc = sorted(R, reverse=True)
        if prev_desc is not None and any(x > y for x, y in zip(desc, prev_desc)):
            report.monotone_ok = False
        prev_desc = desc
        if cur.position_of(s) < floor_pos:
            report.position_floor_ok = False
        if t == horizon:
            break
        cur = next(perms, cur)  # identity repeats once reached
        cfg = particle_step(cfg)
    return report


def check_lemma_Lk(p: Permutation, b: float) -> bool:
    """Every qualifying s is a right-to-left minimum after floor(bn) Pop steps."""
    if not 0 < b < 1:
        raise ValueError(f"b must lie in (0, 1), got {b}")
    qual = qualifying_values(p, b)
    if not qual:
        return True
    after = K.pop_power(p.values, scaled_floor(b, p.n))
    mask = K.rtl_minima_mask(after)
    return bool(mask[np.array(qual)].all())


def write_particle_trace(stream: TextIO, n: int, b: float, steps: int | None = None) -> None:
    """CSV rows (t, occupied positions separated by spaces)."""
    if steps is None:
        steps = expected_evacuation_time(n, b)
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(["t", "occupied_positions"])
    c = init_particles(n, b)
    for _ in range(steps + 1):
        w.writerow([c.t, " ".join(map(str, c.occupied))])
        c = particle_step(c)
