import itertools
import math

import numpy as np
import pytest

from popstack.perm import from_values, identity, inversion_set, max_run_length, pop_step, reverse
from popstack.sampler import trial_permutation
from popstack.statistics import (
    TrialRecord, aggregate, basic_record, count_top, count_X, count_Y, count_Y_naive, expected_X,
    expected_Y, larger_to_the_right, mean_over_n, scaled_floor, step_displacement, top_block_hit,
    top_block_size,
)


def test_scaled_floor_is_decimal_exact():
    assert scaled_floor(0.92, 100) == 92
    assert scaled_floor(0.29, 100) == 29  # 0.29*100 == 28.999999999999996 in floats
    assert scaled_floor(0.5, 7) == 3


def test_top_block_size():
    assert top_block_size(10**6) == 10_000
    assert top_block_size(8) == 4
    assert top_block_size(1) == 1
    for n in range(1, 2000):
        N = top_block_size(n)
        assert N**3 <= n * n < (N + 1) ** 3


def test_count_X_examples():
    assert count_X(from_values([1, 2, 3, 4]), 0.5) == 2
    assert count_X(from_values([3, 4, 1, 2]), 0.5) == 0
    assert count_X(reverse(10), 0.5) == 0
    assert count_top(identity(10), 3) == 7
    assert expected_X(0.5, 100) == 25.0
    with pytest.raises(ValueError):
        count_X(identity(3), 1.0)


def test_larger_to_the_right_example():
    assert larger_to_the_right(from_values([3, 1, 4, 2])).tolist() == [1, 2, 0, 0]


def test_count_Y_examples():
    assert count_Y(from_values([3, 1, 4, 2]), 0.3) == 3
    assert count_Y(reverse(10), 0.05) == 10
    assert count_Y(identity(10), 0.1) == 2
    assert expected_Y(0.1, 1) == pytest.approx(0.1 * math.log(10) + 0.1)


def test_count_Y_matches_naive_exhaustive():
    for t in itertools.permutations(range(1, 7)):
        p = from_values(t)
        for eps in (0.1, 0.2, 0.5, 0.9):
            assert count_Y(p, eps) == count_Y_naive(p, eps)


def test_count_Y_matches_naive_random():
    for trial in range(1000):
        p = trial_permutation(500, 77, trial)
        assert count_Y(p, 0.1) == count_Y_naive(p, 0.1)


def test_ell_sum_is_non_inversions():
    for trial in range(20):
        p = trial_permutation(60, 5, trial)
        non_inv = 60 * 59 // 2 - len(inversion_set(p))
        assert int(larger_to_the_right(p).sum()) == non_inv


def test_top_block_hit():
    n = 1000  # N = 100
    v = list(range(1, n + 1))
    assert top_block_hit(from_values(v)) is None
    v[0], v[999] = v[999], v[0]
    assert top_block_hit(from_values(v)) == 1000
    assert top_block_hit(reverse(n)) == 1000


def test_step_displacement():
    assert step_displacement(reverse(6)) == 5
    assert step_displacement(identity(6)) == 0
    for trial in range(30):
        p = pop_step(trial_permutation(300, 2, trial))
        assert step_displacement(p) == max_run_length(p) - 1


def test_basic_record_and_row():
    r = basic_record(from_values([5, 2, 4, 6, 3, 1]), 3)
    assert r.steps == 4 and r.trial_index == 3
    row = r.row()
    assert row["trial"] == 3 and row["n"] == 6
    assert list(row)[:3] == ["n", "trial", "steps"]
    with pytest.raises(ValueError):
        TrialRecord(n=5, trial_index=0, steps=5)


def test_aggregate():
    recs = [TrialRecord(n=10, trial_index=i, steps=s) for i, s in enumerate([1, 2, 3, 4])]
    s = aggregate(recs, "steps")
    assert s.count == 4 and s.mean == 2.5 and s.min == 1 and s.max == 4
    assert s.variance == pytest.approx(np.var([1, 2, 3, 4], ddof=1))
    assert s.ci95_half_width == pytest.approx(1.96 * math.sqrt(s.variance / 4))
    recs.append(TrialRecord(n=10, trial_index=9, extra={"skip_reason": "x"}))
    assert aggregate(recs, "steps").count == 4
    assert recs[-1].skipped
    with pytest.raises(KeyError):
        aggregate(recs, "nope")
    with pytest.raises(ValueError):
        aggregate([], "steps")
    one = aggregate(recs[:1], "steps")
    assert one.variance == 0 and one.ci95_half_width == 0
    assert mean_over_n(recs, "steps") == 0.25


def test_variance_shrinks_with_n():
    var = []
    for n in (10**3, 10**4, 10**5):
        xs = [count_X(trial_permutation(n, 31, t), 0.5) / n for t in range(200)]
        var.append(np.var(xs, ddof=1))
    assert var[0] > var[1] > var[2]
