import numpy as np
import pytest

from kinkcheck import InfeasiblePointError, evaluate_switching
from kinkcheck.absnormal import assemble_jacobians, require_feasible
from kinkcheck.policy import Tolerances

from oracles import run_derivative_checks


def test_ex28_kink_jacobians(ex28):
    st = evaluate_switching(ex28, [0.0, 0.0, 0.0])
    assert st.alpha == (0,) and st.active_ineq == (0, 1)
    jb = assemble_jacobians(ex28, st)
    np.testing.assert_array_equal(jb.JE, [[1, 1, 0]])
    np.testing.assert_array_equal(jb.JA, [[4, 0, -1], [0, 4, -1]])
    np.testing.assert_array_equal(jb.Jalpha, [[1, -1, 0]])


def test_sign_pattern_enters_equality_jacobian(ex28):
    # t1 > t2: |z1| = t1 - t2, so JE = [1,1,0] - [1,-1,0]
    st = evaluate_switching(ex28, [0.5, 0.5 - 1.0, 1.0])
    assert st.sigma.tolist() == [1]
    np.testing.assert_array_equal(assemble_jacobians(ex28, st).JE, [[0, 2, 0]])


def test_nested_switches_chain_rule():
    from conftest import load
    p = load("nested_kinks.anf")
    st = evaluate_switching(p, [-0.3, 0.1])
    # z1 = t1 < 0, z2 = t2 - |t1| = t2 + t1 -> dz2 = [1, 1]
    assert st.sigma.tolist() == [-1, -1]
    np.testing.assert_allclose(st.dz_dx, [[1, 0], [1, 1]])


def test_infeasible_point_reports_residuals(ex28):
    st = evaluate_switching(ex28, [1.0, 1.0, 1.0])
    assert not st.is_feasible()
    with pytest.raises(InfeasiblePointError) as info:
        require_feasible(ex28, st)
    assert info.value.residuals["eq"] == pytest.approx(2.0)


def test_activity_threshold_from_policy(ex28):
    x = [1e-7, 0.0, 4e-7]
    assert evaluate_switching(ex28, x).alpha == ()
    assert evaluate_switching(ex28, x, Tolerances(eps_act=1e-6)).alpha == (0,)


def test_wrong_dimension(ex28):
    with pytest.raises(ValueError):
        evaluate_switching(ex28, [0.0, 0.0])


def test_derivatives_against_finite_differences(rng):
    worst, done = run_derivative_checks(rng, count=20)
    assert worst["dz_dx"] < 1e-6 and worst["JE"] < 1e-6 and worst["JI"] < 1e-6
    assert worst["Habs"] < 1e-5 and worst["Hmpcc"] < 1e-5
