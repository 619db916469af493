import pytest

from popstack.coloring import (
    BLACK, RED, WHITE, ColoringInvariantError, ParameterError, SkippedTrial, advance_coloring,
    check_queue, init_coloring, p_at, parameter_violations, queue_bound, select_m, start_time,
    track_p, tracked_element_journey, validate_parameters,
)
from popstack.perm import from_values, identity, pop_step, right_to_left_minima, trajectory
from popstack.sampler import trial_permutation


def test_hand_built_example():
    p = from_values([1, 2, 3, 4, 5, 6, 9, 10, 7, 8])
    st = init_coloring(p, 6, 1)
    assert st.color_of(6) == "white"
    assert st.color_of(9) == "red" and st.color_of(10) == "red"
    assert st.color_of(7) == "white" and st.color_of(8) == "white"
    assert all(st.color_of(k) is None for k in range(1, 6))
    assert st.p_t == 8 and st.pos_m == 6
    assert st.counts() == {"reds": 2, "whites": 3, "blacks": 0}


def test_pivot_at_end_all_larger_black():
    p = from_values([1, 2, 6, 5, 4, 3])
    st = init_coloring(p, 3, 1)
    assert [st.color_of(k) for k in (4, 5, 6)] == ["black"] * 3
    assert st.color_of(3) == "white"
    assert 3 in right_to_left_minima(p)
    assert st.p_t == 6  # no red pair: falls back to pos(m)


def test_colour_definitions_random():
    for trial in range(30):
        p = trial_permutation(80, 4, trial)
        m = 50
        st = init_coloring(p, m, 1)
        L = right_to_left_minima(p)
        pm = p.position_of(m)
        for k in range(1, 81):
            want = None
            if k >= m:
                if k in L:
                    want = "white"
                elif p.position_of(k) >= pm:
                    want = "red"
                else:
                    want = "black"
            assert st.color_of(k) == want


def test_init_errors():
    with pytest.raises(ValueError):
        init_coloring(identity(4), 5, 1)
    with pytest.raises(ValueError):
        init_coloring(identity(4), 2, 0)


def test_select_m():
    p = from_values([1, 2, 3, 4, 5, 6, 7, 8, 10, 9])  # threshold floor(0.92*10) = 9
    assert select_m(p, 0.32).m is None
    q = from_values([9, 2, 3, 4, 5, 6, 7, 8, 1, 10])
    sel = select_m(q, 0.32)
    assert sel.m == 10 and sel.qualifying_count == 1
    with pytest.raises(ParameterError):
        select_m(q, 0.5)


def test_recolouring_is_monotone_along_trajectories():
    for trial in range(20):
        sigma = trial_permutation(150, 8, trial)
        traj = list(trajectory(sigma))
        st = init_coloring(traj[1], 120, 1)
        for nxt in traj[2:]:
            st = advance_coloring(st, nxt)


def test_backwards_recolouring_raises():
    st = init_coloring(identity(3), 1, 1)  # everything white
    with pytest.raises(ColoringInvariantError):
        advance_coloring(st, from_values([1, 3, 2]))


def test_isolated_red_moves_right():
    p = from_values([1, 2, 3, 5, 4, 6])
    st = init_coloring(p, 3, 1)
    assert st.color_of(5) == "red"
    assert st.color_of(3) == st.color_of(4) == "white"
    q = pop_step(p)
    assert q.position_of(5) == p.position_of(5) + 1
    nst = advance_coloring(st, q)
    assert nst.color_of(4) == nst.color_of(6) == "white"


def test_track_p_random():
    done = skipped = 0
    for trial in range(40):
        try:
            ps = track_p(trial_permutation(200, 11, trial), 0.32)
        except SkippedTrial:
            skipped += 1
            continue
        done += 1
        assert ps.reds_violations == []
        assert ps.isolation_violations == 0
        assert ps.t0 == start_time(200, 0.32) == 64
        for t, p in ps.series[:5]:
            assert p == p_at(trial_permutation(200, 11, trial), ps.m, t)
    assert done > 0


def test_track_p_monitor_rows():
    for trial in range(20):
        try:
            ps = track_p(trial_permutation(100, 1, trial), 0.32, monitor=True)
        except SkippedTrial:
            continue
        assert [r["t"] for r in ps.monitor] == [t for t, _ in ps.series]
        assert set(ps.monitor[0]) == {"t", "p_t", "pos_m", "reds", "whites", "blacks", "tracked_pos"}
        return
    pytest.fail("no trial with a pivot")


def test_parameter_validation():
    assert validate_parameters(0.32, 0.48, 0.0061)
    bad = parameter_violations(0.32, 0.48, 0.0064)  # exactly a^2/16
    assert bad == ["ε < a²/16"]
    assert "c ∈ (a, 0.5)" in parameter_violations(0.32, 0.3, 0.001)
    assert "ε > 0" in parameter_violations(0.32, 0.48, 0)
    assert "ε·ln(1/ε) + 2ε < (c−a)/2" in parameter_violations(0.1, 0.102, 0.0005)
    with pytest.raises(ParameterError):
        check_queue(identity(100), 0.32, 0.48, 0.0064)


def test_queue_bound_exact():
    assert queue_bound(10_000, 0.0061) == 9939


def test_check_queue_skips_without_pivot():
    with pytest.raises(SkippedTrial):
        check_queue(from_values([2, 1, 3, 4, 5, 6, 7, 8, 10, 9]), 0.32, 0.48, 0.0061)


def test_journey_identity_and_errors():
    j = tracked_element_journey(identity(1000), 0.32, 0.48, 0.0061)
    assert len(j) == 0 and j.k is None
    with pytest.raises(ParameterError):
        tracked_element_journey(identity(10), 0.32, 0.48, 0.0064)


def test_journey_n10000():
    n, c = 10_000, 0.48
    seen = 0
    for trial in range(8):
        try:
            j = tracked_element_journey(trial_permutation(n, 5, trial), 0.32, c, 0.0061)
        except SkippedTrial:
            continue
        seen += 1
        assert j.positions[0] <= 464 and j.positions[-1] == j.k  # N = 464
        assert j.pos_at_cn <= (2 * c + 0.05) * n
        assert j.overtake_step is not None
        assert j.unit_moves_after_overtake
    assert seen >= 6


def test_colour_codes_distinct():
    assert len({WHITE, RED, BLACK}) == 3
