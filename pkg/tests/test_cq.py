import numpy as np
import pytest
from scipy.optimize import linprog as scipy_linprog

from kinkcheck import (InfeasiblePointError, check_idkq, check_likq, check_mpcc_licq,
                       check_mpcc_mfcq, evaluate_switching, parse_problem)
from kinkcheck.generator import random_instance
from kinkcheck.policy import DEFAULT
from kinkcheck.reform import build_counterpart_mpcc, build_slack_nlp, phi_inv, slack_state

from oracles import sympy_jacobian


def test_ex28_verdicts(ex28):
    st = evaluate_switching(ex28, [0.0, 0.0, 0.0])
    likq, idkq = check_likq(ex28, st), check_idkq(ex28, st)
    assert not likq.holds and likq.rank.rank == 3 and likq.rank.shape[0] == 4
    assert idkq.holds
    np.testing.assert_allclose(idkq.witness.d, [0.0, 0.0, -1.0])
    mp = build_counterpart_mpcc(ex28, "I")
    pt = phi_inv(mp, st)
    assert not check_mpcc_licq(mp, pt).holds
    assert check_mpcc_mfcq(mp, pt).holds


def test_ex28_slack_form_loses_idkq(ex28):
    st = evaluate_switching(ex28, [0.0, 0.0, 0.0])
    q = build_slack_nlp(ex28)
    stw = slack_state(ex28, st, [0.0, 0.0], q)
    assert not check_likq(q, stw).holds
    assert not check_idkq(q, stw).holds


def test_infeasible_point_rejected(ex28):
    with pytest.raises(InfeasiblePointError):
        check_likq(ex28, evaluate_switching(ex28, [1.0, 1.0, 1.0]))


def _tightened_oracle(mp, pt):
    """Textbook tightened NLP at ``y``: gradients plus unit rows for zero pair variables."""
    names = mp.variable_names()
    rows = []
    if mp.eq.dim:
        rows.append(sympy_jacobian(mp.eq, names, pt.y))
    U0 = [mp.pairs[i][0] for i in pt.U_zero]
    V0 = [mp.pairs[i][1] for i in pt.V_zero]
    eye = np.eye(mp.n)
    rows += [eye[U0], eye[V0]]
    Aeq = np.vstack(rows)
    Aact = np.zeros((0, mp.n))
    if pt.active_ineq:
        Aact = sympy_jacobian(mp.ineq, names, pt.y)[list(pt.active_ineq)]
    return Aeq, Aact


def _rank_verdict(M):
    """Full row rank under the policy threshold; ``None`` within a factor 10 of it."""
    if M.shape[0] == 0:
        return True
    if M.shape[0] > M.shape[1]:
        return False
    sv = np.linalg.svd(M, compute_uv=False)
    thr = DEFAULT.eps_rank * max(M.shape) * sv[0]
    if thr / 10 < sv[-1] < thr * 10:
        return None
    return bool(sv[-1] > thr)


def _oracle_licq(Aeq, Aact):
    return _rank_verdict(np.vstack([Aeq, Aact]))


def _oracle_mfcq(Aeq, Aact):
    full = _rank_verdict(Aeq)
    if not full:
        return full
    if Aact.shape[0] == 0:
        return True
    n = Aeq.shape[1]
    c = np.zeros(n + 1)
    c[-1] = -1
    res = scipy_linprog(c, A_ub=np.hstack([-Aact, np.ones((len(Aact), 1))]),
                        b_ub=np.zeros(len(Aact)),
                        A_eq=np.hstack([Aeq, np.zeros((len(Aeq), 1))]) if len(Aeq) else None,
                        b_eq=np.zeros(len(Aeq)) if len(Aeq) else None,
                        bounds=[(-1, 1)] * n + [(None, 1)], method="highs")
    margin = -res.fun
    if DEFAULT.eps_strict / 10 < margin < DEFAULT.eps_strict * 10:
        return None
    return bool(margin > DEFAULT.eps_strict)


def test_mpcc_qualifications_match_tightened_nlp(rng):
    checked = skipped = 0
    for k in range(30):
        inst = random_instance(rng, degenerate=(k % 2 == 1), n_points=4)
        p = inst.problem
        mp = build_counterpart_mpcc(p, "I")
        for x in inst.points:
            pt = phi_inv(mp, evaluate_switching(p, x))
            Aeq, Aact = _tightened_oracle(mp, pt)
            for ours, ref in ((check_mpcc_licq(mp, pt).holds, _oracle_licq(Aeq, Aact)),
                              (check_mpcc_mfcq(mp, pt).holds, _oracle_mfcq(Aeq, Aact))):
                if ref is None:
                    skipped += 1
                    continue
                assert ours == ref
                checked += 1
    assert checked >= 120 and skipped <= checked // 10


def test_plain_mpcc_file():
    mp = parse_problem("problem m\nvars t[1] u[1] v[1]\nobj: t1^2 + u1 + v1\n"
                       "eq: t1 - u1 + v1\nmpcc\n  pair: u1 v1\n")
    from kinkcheck.reform import mpcc_point
    pt = mpcc_point(mp, [0.0, 0.0, 0.0])
    assert pt.D == (0,) or list(pt.D) == [0]
    assert check_mpcc_licq(mp, pt).holds
    assert check_mpcc_mfcq(mp, pt).holds


def test_verdict_serialization(ex28):
    d = check_idkq(ex28, evaluate_switching(ex28, [0.0, 0.0, 0.0])).to_dict()
    assert set(d) == {"holds", "rank", "witness"}
    assert d["witness"]["feasible"] is True
