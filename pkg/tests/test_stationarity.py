import json

import numpy as np
import pytest

from kinkcheck import (MultiplierSet, check_kink_stationarity, check_s_stationarity,
                       evaluate_switching, map_multipliers, solve_kink_multipliers,
                       solve_s_multipliers)
from kinkcheck.generator import random_instance
from kinkcheck.reform import build_counterpart_mpcc, phi_inv

from conftest import load
from oracles import s_stationary_oracle


def at(p, x):
    st = evaluate_switching(p, x)
    mp = build_counterpart_mpcc(p, "I")
    return st, mp, phi_inv(mp, st)


def test_ex28_has_no_multipliers(ex28):
    st, mp, pt = at(ex28, [0.0, 0.0, 0.0])
    sol = solve_kink_multipliers(ex28, st)
    assert not sol.found
    cert = sol.certificate
    assert cert["forced"]["lamE"][1] == pytest.approx(1.0)
    assert cert["forcedSwitchRows"][1] == pytest.approx(-1.0)
    fk = cert["farkas"]
    assert fk["maxYA"] <= 1e-12 and fk["yb"] > 0
    assert not solve_s_multipliers(mp, pt).found
    assert not s_stationary_oracle(mp, pt)


def test_ex28_given_multipliers_fail_normal_growth(ex28):
    st, _, _ = at(ex28, [0.0, 0.0, 0.0])
    v = check_kink_stationarity(ex28, st, MultiplierSet([1.0], [0.5, 0.5], [0.0]))
    assert v.failed == ("normalGrowth",)
    assert v.residuals["normalGrowth"] == pytest.approx(1.0)
    assert v.residuals["gradient"] == pytest.approx(0.0, abs=1e-15)


def test_smooth_kkt():
    p = load("smooth_qp.anf")
    st, mp, pt = at(p, [0.0, 1.0])
    v = check_kink_stationarity(p, st, MultiplierSet([], [2.0], []))
    assert v.holds and v.qualifiers["strictComplementarity"]
    sol = solve_kink_multipliers(p, st)
    assert sol.found and sol.multipliers.lamI == pytest.approx([2.0])
    assert not check_kink_stationarity(p, st, MultiplierSet([], [-2.0], [])).holds


def test_kink_minimizer_multipliers():
    p = load("kink_qp.anf")
    st, mp, pt = at(p, [0.0, 0.0, 0.0])
    sol = solve_kink_multipliers(p, st)
    assert sol.found
    assert sol.multipliers.lamE == pytest.approx([-1.0])
    assert sol.multipliers.lamZ == pytest.approx([0.0], abs=1e-12)
    s = map_multipliers("kink-to-s", sol.multipliers, p, st)
    assert s.muU == pytest.approx([1.0]) and s.muV == pytest.approx([1.0])
    assert check_s_stationarity(mp, pt, s).holds


def test_generated_multipliers_verify(rng):
    found = 0
    while found < 15:
        inst = random_instance(rng, stationary=True, n_points=1)
        st, mp, pt = at(inst.problem, inst.points[0])
        v = check_kink_stationarity(inst.problem, st, inst.multipliers)
        assert v.holds, v.residuals
        assert v.qualifiers["strictComplementarity"] and v.qualifiers["strictNormalGrowth"]
        found += 1


def test_solvers_agree_with_lp_oracle(rng):
    seen = {True: 0, False: 0}
    for k in range(40):
        inst = random_instance(rng, stationary=(k % 2 == 0), n_points=3)
        p = inst.problem
        for x in inst.points:
            st, mp, pt = at(p, x)
            kink = solve_kink_multipliers(p, st)
            s = solve_s_multipliers(mp, pt)
            ref = s_stationary_oracle(mp, pt)
            assert kink.found == s.found == ref
            seen[ref] += 1
            if kink.found:
                back = map_multipliers("s-to-kink",
                                       map_multipliers("kink-to-s", kink.multipliers, p, st))
                assert back == kink.multipliers
                assert check_s_stationarity(mp, pt, map_multipliers(
                    "kink-to-s", kink.multipliers, p, st)).holds
    assert seen[True] >= 20 and seen[False] >= 20


def test_dimension_checks(ex28):
    st, mp, pt = at(ex28, [0.0, 0.0, 0.0])
    with pytest.raises(ValueError):
        check_kink_stationarity(ex28, st, MultiplierSet([1.0], [0.5], [0.0]))
    with pytest.raises(ValueError):
        check_s_stationarity(mp, pt, MultiplierSet([1.0], [0.5, 0.5], [0.0]))
    with pytest.raises(ValueError):
        map_multipliers("sideways", MultiplierSet([], [], []))


def test_multipliers_json_round_trip():
    lam = MultiplierSet([1.5], [0.0, 2.0], [-0.25], [1.0], [3.0])
    assert MultiplierSet.from_dict(json.loads(json.dumps(lam.to_dict()))) == lam
