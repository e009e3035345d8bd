import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from kinkcheck import check_kink_stationarity, dump_problem, evaluate_switching
from kinkcheck.generator import MAX_M1, MAX_M2, MAX_N, MAX_S, random_instance


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**31), mode=st.sampled_from(["generic", "stationary", "degenerate"]))
def test_instances_respect_limits_and_feasibility(seed, mode):
    inst = random_instance(np.random.default_rng(seed), stationary=mode == "stationary",
                           degenerate=mode == "degenerate", n_points=5)
    p = inst.problem
    assert 2 <= p.n <= MAX_N and p.s <= MAX_S and p.m1 <= MAX_M1
    assert p.m2 <= MAX_M2 + (mode == "degenerate")
    assert 1 <= len(inst.points) <= 5
    for x in inst.points:
        assert evaluate_switching(p, x).is_feasible()
    if mode == "stationary":
        v = check_kink_stationarity(p, evaluate_switching(p, inst.points[0]), inst.multipliers)
        assert v.holds


def test_same_seed_same_instance():
    a = random_instance(np.random.default_rng(7), n_points=6)
    b = random_instance(np.random.default_rng(7), n_points=6)
    assert dump_problem(a.problem) == dump_problem(b.problem)
    assert all(np.array_equal(x, y) for x, y in zip(a.points, b.points))


def test_degenerate_mode_has_duplicate_active_rows():
    inst = random_instance(np.random.default_rng(3), degenerate=True, n_points=1)
    st = evaluate_switching(inst.problem, inst.points[0])
    assert 0 in st.active_ineq and inst.problem.m2 - 1 in st.active_ineq


def test_modes_are_exclusive():
    with pytest.raises(ValueError):
        random_instance(np.random.default_rng(0), stationary=True, degenerate=True)
