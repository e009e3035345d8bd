import numpy as np
import pytest

from kinkcheck import ComplementarityError, evaluate_switching
from kinkcheck.generator import random_instance
from kinkcheck.reform import (build_counterpart_mpcc, build_slack_nlp, enumerate_slack_choices,
                              mpcc_point, phi, phi_inv, slack_state)


def test_slack_form_dimensions(ex28):
    q = build_slack_nlp(ex28)
    assert (q.n, q.s, q.m1, q.m2) == (5, 3, 3, 0)
    assert build_slack_nlp(q) is q


def test_counterpart_layouts(ex28):
    mi = build_counterpart_mpcc(ex28, "I")
    me = build_counterpart_mpcc(ex28, "E")
    assert mi.variable_names() == ["t1", "t2", "t3", "u1", "v1"]
    assert (mi.eq.dim, mi.ineq.dim, mi.n_pairs) == (2, 2, 1)
    assert (me.n, me.eq.dim, me.ineq.dim, me.n_pairs) == (11, 6, 0, 3)
    with pytest.raises(ValueError):
        build_counterpart_mpcc(ex28, "X")


def test_phi_inverse_pair(ex28, rng):
    mp = build_counterpart_mpcc(ex28, "I")
    st = evaluate_switching(ex28, [0.0, 0.0, 0.0])
    pt = phi_inv(mp, st)
    assert pt.index_sets() == {"Uplus": [], "Uzero": [0], "Vplus": [], "Vzero": [0], "D": [0]}
    x, z = phi(mp, pt)
    np.testing.assert_array_equal(x, st.x)
    np.testing.assert_array_equal(z, st.z)


def test_phi_round_trip_random(rng):
    for _ in range(20):
        inst = random_instance(rng, n_points=4)
        mp = build_counterpart_mpcc(inst.problem, "I")
        for x in inst.points:
            st = evaluate_switching(inst.problem, x)
            pt = phi_inv(mp, st)
            assert pt.is_feasible()
            x2, z2 = phi(mp, pt)
            np.testing.assert_allclose(x2, x, atol=0)
            np.testing.assert_allclose(z2, st.z, atol=1e-15)


def test_complementarity_violation(ex28):
    mp = build_counterpart_mpcc(ex28, "I")
    with pytest.raises(ComplementarityError):
        mpcc_point(mp, [0, 0, 0, 1, 1])


def test_slack_choices_ex28(ex28):
    st = evaluate_switching(ex28, [0.0, 0.0, 0.0])
    choices = list(enumerate_slack_choices(ex28, st))
    assert len(choices) == 1 and np.all(choices[0] == 0)
    q = build_slack_nlp(ex28)
    stw = slack_state(ex28, st, choices[0], q)
    assert stw.alpha == (0, 1, 2) and stw.is_feasible()


def test_slack_choices_cover_signs():
    # one inactive inequality: |w| = cI, so both signs reproduce it
    from kinkcheck import parse_problem
    p = parse_problem("problem a\nvars t[1]\nobj: t1\nineq: 4 - t1\n")
    st = evaluate_switching(p, [0.0])
    ws = sorted(float(w[0]) for w in enumerate_slack_choices(p, st))
    assert ws == [-4.0, 4.0]
    q = build_slack_nlp(p)
    for w in ws:
        assert slack_state(p, st, [w], q).is_feasible()
