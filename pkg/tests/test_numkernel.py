import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.optimize import linprog as scipy_linprog

from kinkcheck.numkernel import (Definiteness, definiteness, nullspace, rank,
                                 strict_direction)
from kinkcheck.policy import Tolerances
from kinkcheck.simplex import linprog


def test_rank_of_product_matrix(rng):
    A = rng.standard_normal((5, 2)) @ rng.standard_normal((2, 4))
    r = rank(A)
    assert r.rank == 2 and not r.full_row_rank
    assert rank(np.eye(3)).full_row_rank


def test_rank_threshold_follows_policy():
    M = np.diag([1.0, 1e-9])
    assert rank(M).rank == 2
    assert rank(M, Tolerances(eps_rank=1e-8)).rank == 1


def test_empty_matrices():
    assert rank(np.zeros((0, 3))).full_row_rank
    assert nullspace(np.zeros((0, 3)), ncols=3).shape == (3, 3)


def test_nullspace_is_orthonormal_kernel(rng):
    A = rng.standard_normal((2, 5))
    N = nullspace(A)
    assert N.shape == (5, 3)
    np.testing.assert_allclose(A @ N, 0, atol=1e-12)
    np.testing.assert_allclose(N.T @ N, np.eye(3), atol=1e-12)


def test_strict_direction_found_and_absent():
    res = strict_direction(np.zeros((0, 2)), np.array([[1.0, 0.0], [0.0, 1.0]]))
    assert res.feasible and res.margin == pytest.approx(1.0)
    res = strict_direction(np.zeros((0, 2)), np.array([[1.0, 0.0], [-1.0, 0.0]]))
    assert not res.feasible


@pytest.mark.parametrize("diag, cls", [
    ([1.0, 2.0], Definiteness.PD),
    ([0.0, 2.0], Definiteness.PSD),
    ([-1.0, 2.0], Definiteness.INDEFINITE),
    ([-1.0, 0.0], Definiteness.NSD),
    ([-1.0, -3.0], Definiteness.ND),
])
def test_definiteness_classes(diag, cls):
    assert definiteness(np.diag(diag))[0] == cls


def test_empty_matrix_is_positive_definite():
    assert definiteness(np.zeros((0, 0)))[0] == Definiteness.PD


def _random_lp(rng):
    n = int(rng.integers(2, 7))
    mu = int(rng.integers(1, 6))
    me = int(rng.integers(0, 3))
    c = rng.integers(-3, 4, n).astype(float)
    A_ub = rng.integers(-3, 4, (mu, n)).astype(float)
    b_ub = rng.integers(-2, 6, mu).astype(float)
    A_eq = rng.integers(-3, 4, (me, n)).astype(float) if me else None
    b_eq = rng.integers(-2, 3, me).astype(float) if me else None
    bounds = [(None, None) if rng.random() < 0.3 else (-1.0 if rng.random() < 0.5 else 0.0,
                                                        None if rng.random() < 0.5 else 4.0)
              for _ in range(n)]
    return c, A_ub, b_ub, A_eq, b_eq, bounds


@settings(max_examples=150, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_simplex_matches_highs(seed):
    c, A_ub, b_ub, A_eq, b_eq, bounds = _random_lp(np.random.default_rng(seed))
    ours = linprog(c, A_ub, b_ub, A_eq, b_eq, bounds)
    # HiGHS presolve can label an unbounded LP infeasible, so it stays off
    ref = scipy_linprog(c, A_ub=A_ub, b_ub=b_ub, A_eq=A_eq, b_eq=b_eq, bounds=bounds,
                        method="highs", options={"presolve": False})
    if ref.status == 4:
        # numerical trouble without presolve (seen on a few unbounded LPs)
        ref = scipy_linprog(c, A_ub=A_ub, b_ub=b_ub, A_eq=A_eq, b_eq=b_eq, bounds=bounds,
                            method="highs")
    status = {0: "optimal", 2: "infeasible", 3: "unbounded"}[ref.status]
    assert ours.status == status
    if status == "optimal":
        assert ours.fun == pytest.approx(ref.fun, abs=1e-8)
        x = ours.x
        assert np.all(A_ub @ x <= b_ub + 1e-9)
        if A_eq is not None:
            np.testing.assert_allclose(A_eq @ x, b_eq, atol=1e-9)
    elif status == "infeasible":
        A, b, y = ours.farkas
        assert np.all(y @ A <= 1e-9) and y @ b > 1e-9


def test_unbounded_lp_missed_by_presolve():
    # feasible along (-1, t, -1 - 2t, 0) for t >= 0 with objective -1 - 8t
    c = [-2.0, -2.0, 3.0, 2.0]
    A = [[3.0, -2.0, -1.0, 0.0], [1.0, 2.0, 1.0, 1.0]]
    b = [-2.0, 0.0]
    bounds = [(-1.0, None), (0.0, None), (None, None), (0.0, None)]
    for t in (0.0, 10.0, 1e3):
        y = np.array([-1.0, t, -1.0 - 2 * t, 0.0])
        assert np.all(np.array(A) @ y <= b)
    assert linprog(c, A, b, bounds=bounds).status == "unbounded"
