import csv
import io
import itertools
from fractions import Fraction
from pathlib import Path

import pytest
from hypothesis import given, strategies as st

from popstack.perm import from_values, identity, reverse
from popstack.sampler import trial_permutation
from popstack.particle import (
    ParticleConfig, check_lemma_Lk, coupling_check, dominates, evacuation_time,
    expected_evacuation_time, init_particles, particle_count, particle_step, positions_right_of,
    qualifying_values, reds_right_of, watched_interval, write_particle_trace,
)

FIX = Path(__file__).parent / "fixtures"


def test_init_and_idle_first_step():
    c = init_particles(10, 0.4)
    assert c.occupied == (9, 10) and c.t == 0
    c1 = particle_step(c)
    assert c1.occupied == (9, 10) and c1.t == 1
    assert particle_step(c1).occupied == (8, 10)


def test_init_errors():
    with pytest.raises(ValueError):
        init_particles(3, 0.2)  # floor(0.3) = 0 particles
    with pytest.raises(ValueError):
        init_particles(10, 1.0)
    with pytest.raises(ValueError):
        ParticleConfig(5, (3, 2))


def test_packed_block_dissolves():
    c = particle_step(init_particles(20, 0.6))  # 6 particles on 15..20
    for _ in range(12):
        c = particle_step(c)
    gaps = [b - a for a, b in zip(c.occupied, c.occupied[1:])]
    assert gaps == [2] * 5
    # once spaced, everything drifts left together
    nxt = particle_step(c)
    assert nxt.occupied == tuple(q - 1 for q in c.occupied)


def test_particle_count_preserved():
    c = init_particles(50, 0.8)
    for _ in range(80):
        c = particle_step(c)
        assert len(c.occupied) == particle_count(50, 0.8) == 20
        assert c.occupied[0] >= 1


def test_archived_trace_n10():
    buf = io.StringIO()
    write_particle_trace(buf, 10, 0.4)
    assert buf.getvalue() == (FIX / "particle_trace_n10_b0.4.csv").read_text()
    assert evacuation_time(10, 0.4) == 4


@pytest.mark.parametrize("n", [10, 20, 50, 100, 1000])
@pytest.mark.parametrize("b", [0.2, 0.4, 0.5, 0.8])
def test_evacuation_formula(n, b):
    t = evacuation_time(n, b)
    bn = Fraction(str(b)) * n
    assert t == expected_evacuation_time(n, b) == 2 * (bn // 2)
    if bn.denominator == 1 and bn % 2 == 0:
        assert t == bn


def test_watched_interval():
    assert watched_interval(10, 0.4) == (9, 10)
    assert watched_interval(1000, 0.5) == (751, 1000)


# -- domination order ----------------------------------------------------------

sets = st.frozensets(st.integers(1, 30), max_size=8)


def test_dominates_examples():
    assert dominates({1, 2}, {3, 4})
    assert not dominates({5}, {4})
    assert dominates(set(), {1})
    assert not dominates({1, 2}, {9})
    assert dominates({4, 1}, {4, 3, 2})


@given(sets)
def test_dominates_reflexive(A):
    assert dominates(A, A)


@given(sets, sets, sets)
def test_dominates_transitive(A, B, C):
    if dominates(A, B) and dominates(B, C):
        assert dominates(A, C)


@given(sets, sets)
def test_dominates_antisymmetric(A, B):
    if dominates(A, B) and dominates(B, A):
        assert A == B


# -- coupling -------------------------------------------------------------------

def test_reds_right_of_example():
    p = from_values([2, 6, 1, 7, 3, 5, 4])
    assert reds_right_of(p, 6) == {1, 3, 5, 4}
    assert positions_right_of(p, 6) == {3, 5, 6, 7}
    assert reds_right_of(p, 7) == {3, 5, 4}


def test_qualifying_values():
    p = from_values([1, 2, 3, 4, 5, 6, 7, 8, 10, 9])  # threshold floor(0.9*10) = 9
    assert qualifying_values(p, 0.4) == []  # 10 sits at position 9, not above it
    assert qualifying_values(from_values([9, 2, 3, 4, 5, 6, 7, 8, 1, 10]), 0.4) == [10]
    assert qualifying_values(reverse(10), 0.4) == []


def test_coupling_rejects_non_qualifying():
    with pytest.raises(ValueError):
        coupling_check(identity(20), 3, 0.4)


def test_coupling_pinned_trace_n50():
    text = (FIX / "coupling_trace_n50.csv").read_text().splitlines()
    sigma = from_values([int(x) for x in text[0].split("=", 1)[1].split()])
    assert sigma == trial_permutation(50, 2024, 2)
    rows = list(csv.DictReader(text[2:]))
    rep = coupling_check(sigma, 47, 0.4, keep_trace=True)
    assert rep.all_ok and rep.first_violation is None
    got = [(t, " ".join(map(str, R)), " ".join(map(str, Rp))) for t, R, Rp in rep.trace]
    want = [(int(r["t"]), r["reds_positions"], r["particle_positions"]) for r in rows]
    assert got == want


def test_coupling_random_n200():
    pairs = 0
    for trial in range(40):
        p = trial_permutation(200, 7, trial)
        for s in qualifying_values(p, 0.4):
            assert coupling_check(p, s, 0.4).all_ok
            pairs += 1
    assert pairs > 0


def test_lemma_Lk_exhaustive_s7():
    for t in itertools.permutations(range(1, 8)):
        assert check_lemma_Lk(from_values(t), 0.5)


def test_lemma_Lk_random_n1000():
    for b in (0.2, 0.4, 0.8):
        for trial in range(20):
            assert check_lemma_Lk(trial_permutation(1000, 3, trial), b)
    assert check_lemma_Lk(reverse(10), 0.4)  # nothing qualifies
    with pytest.raises(ValueError):
        check_lemma_Lk(identity(5), 0)
