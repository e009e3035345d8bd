import numpy as np
import pytest

from kinkcheck.equivalence import EQUIVALENCES, IMPLICATIONS, check_point

from conftest import load


def by_name(outcomes):
    out = {}
    for o in outcomes:
        out.setdefault(o.theorem, []).append(o)
    return out


def test_ex28_outcomes(ex28, rng):
    res = by_name(check_point(ex28, np.zeros(3), 0, rng))
    assert all(o.agree for group in res.values() for o in group)
    (lm,) = res["likq_mpcc_licq"]
    assert (lm.lhs, lm.rhs) == (False, False)
    (im,) = res["idkq_mpcc_mfcq"]
    assert (im.lhs, im.rhs) == (True, True)
    # one slack choice; IDKQ is lost in the slack form while the original keeps it
    (ow,) = res["idkq_slack_oneway"]
    assert (ow.lhs, ow.rhs) == (False, True)
    (mw,) = res["mpcc_mfcq_slack_oneway"]
    assert (mw.lhs, mw.rhs) == (False, True)
    (ks,) = res["kink_s_stationarity"]
    assert (ks.lhs, ks.rhs) == (False, False)
    assert "second_order_equivalence" not in res


@pytest.mark.parametrize("name, x", [("smooth_qp.anf", [0.0, 1.0]), ("smooth_lp.anf", [1.0, 1.0]),
                                     ("kink_qp.anf", [0.0, 0.0, 0.0])])
def test_regular_problems_agree(name, x, rng):
    res = by_name(check_point(load(name), np.array(x), 0, rng))
    assert all(o.agree for group in res.values() for o in group)
    assert res["likq_mpcc_licq"][0].lhs is True
    assert res["kink_s_stationarity"][0].lhs is True
    (so,) = res["second_order_equivalence"]
    assert so.lhs == so.rhs == "positive-definite"


def test_name_tables_are_disjoint():
    assert not set(EQUIVALENCES) & set(IMPLICATIONS)
    assert len(EQUIVALENCES) + len(IMPLICATIONS) == 12


def test_implication_semantics():
    from kinkcheck.equivalence import Outcome, _imp
    assert _imp("likq_implies_idkq", False, False, 0).agree
    assert not _imp("likq_implies_idkq", True, False, 0).agree
    assert Outcome("likq_slack", True, True, True).kind == "equivalence"
