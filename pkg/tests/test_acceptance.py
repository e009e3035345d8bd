"""Acceptance criteria, one pass/fail line each.

Run with ``pytest tests/test_acceptance.py`` (lines appear in the terminal
summary) or ``python tests/test_acceptance.py``.
"""

import sys
import time
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent))

from kinkcheck import (analyze, check_idkq, check_likq, check_mpcc_licq, check_mpcc_mfcq,  # noqa: E402
                       dump_problem, evaluate_switching, parse_problem, run_suite,
                       solve_kink_multipliers)
from kinkcheck.absnormal import assemble_jacobians  # noqa: E402
from kinkcheck.cli import main as cli_main  # noqa: E402
from kinkcheck.reform import (build_counterpart_mpcc, build_slack_nlp, phi_inv,  # noqa: E402
                              slack_state)

from conftest import FIXTURES, load  # noqa: E402
from oracles import run_derivative_checks  # noqa: E402

EXACT_TOL = 1e-12
EX28_TIME = 0.1
SUITE_TIME = 60.0
SUITE_SEED, SUITE_INSTANCES, SUITE_SAMPLES = 42, 50, 7    # up to 8 points per instance
EIG_TOL = SPAN_TOL = 1e-8
JAC_TOL, HESS_TOL = 1e-6, 1e-5
FD_SAMPLES = 100

RESULTS = []


def record(n, ok, detail):
    line = f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}"
    RESULTS.append(line)
    print(line)
    return ok


@pytest.fixture(scope="module")
def suite():
    t0 = time.perf_counter()
    data = run_suite(seed=SUITE_SEED, samples=SUITE_SAMPLES, n_random=SUITE_INSTANCES)
    return data, time.perf_counter() - t0


def test_criterion_1_example_reproduction():
    p = load("ex2_8.anf")
    t0 = time.perf_counter()
    st = evaluate_switching(p, np.zeros(3))
    jb = assemble_jacobians(p, st)
    likq, idkq = check_likq(p, st), check_idkq(p, st)
    elapsed = time.perf_counter() - t0

    exact = (np.abs(jb.JE - [[1, 1, 0]]).max() <= EXACT_TOL
             and np.abs(jb.JA - [[4, 0, -1], [0, 4, -1]]).max() <= EXACT_TOL
             and np.abs(jb.Jalpha - [[1, -1, 0]]).max() <= EXACT_TOL)
    d = np.array([0.0, 0.0, -1.0])
    witness = (np.abs(jb.JE @ d).max() <= EXACT_TOL and np.abs(jb.Jalpha @ d).max() <= EXACT_TOL
               and np.allclose(jb.JA @ d, [1.0, 1.0], atol=EXACT_TOL))
    ok = exact and not likq.holds and idkq.holds and witness and elapsed < EX28_TIME
    record(1, ok, f"Jacobians exact={exact} likq={likq.holds} idkq={idkq.holds} "
                  f"witness={witness} d_found={idkq.witness.d.tolist()} time={elapsed:.4f}s")
    assert ok


def test_criterion_2_equivalence_suite(suite):
    data, elapsed = suite
    s = data["summary"]
    exact = ("likq_slack", "likq_mpcc_licq", "idkq_mpcc_mfcq", "mpcc_licq_slack",
             "likq_mpcc_licq_slack", "idkq_mpcc_mfcq_slack")
    oneway = ("idkq_slack_oneway", "mpcc_mfcq_slack_oneway", "likq_implies_idkq",
              "mpcc_licq_implies_mfcq")
    bad = {k: s[k]["violations"] for k in exact + oneway if s[k]["violations"]}
    n_points = sum(data["points"])
    ok = not bad and elapsed < SUITE_TIME and len(data["points"]) == SUITE_INSTANCES
    record(2, ok, f"{SUITE_INSTANCES} instances, {n_points} points, "
                  f"checks={sum(s[k]['checked'] for k in exact + oneway)} violations={bad or 0} "
                  f"time={elapsed:.1f}s")
    assert ok


def test_criterion_3_converse_failure():
    p = load("ex2_8.anf")
    st = evaluate_switching(p, np.zeros(3))
    q = build_slack_nlp(p)
    stw = slack_state(p, st, np.zeros(2), q)
    mi, me = build_counterpart_mpcc(p, "I"), build_counterpart_mpcc(p, "E")
    idkq_i, idkq_e = check_idkq(p, st).holds, check_idkq(q, stw).holds
    likq_i, likq_e = check_likq(p, st).holds, check_likq(q, stw).holds
    mfcq_i = check_mpcc_mfcq(mi, phi_inv(mi, st)).holds
    mfcq_e = check_mpcc_mfcq(me, phi_inv(me, stw)).holds
    licq_e = check_mpcc_licq(me, phi_inv(me, stw)).holds
    ok = idkq_i and not idkq_e and likq_i == likq_e and mfcq_i and not mfcq_e and not licq_e
    record(3, ok, f"IDKQ I={idkq_i} E={idkq_e}; LIKQ I={likq_i} E={likq_e}; "
                  f"MPCC-MFCQ I={mfcq_i} E={mfcq_e}")
    assert ok


def test_criterion_4_stationarity_correspondence(suite):
    data, _ = suite
    rows = [o for o in data["equivalence"] if o["theorem"] == "kink_s_stationarity"]
    solved = [o for o in rows if o["lhs"]]
    mapped_ok = all(o["detail"]["mappedPasses"] and o["detail"]["recovered"] for o in solved)
    agree = all(o["agree"] for o in rows)

    p = load("ex2_8.anf")
    sol = solve_kink_multipliers(p, evaluate_switching(p, np.zeros(3)))
    cert = sol.certificate or {}
    lam_e = cert.get("forced", {}).get("lamE", {}).get(1)
    r_forced = cert.get("forcedSwitchRows", {}).get(1)
    cert_ok = (not sol.found and lam_e is not None and abs(lam_e - 1.0) <= EXACT_TOL
               and r_forced is not None and abs(r_forced + 1.0) <= EXACT_TOL)
    ok = mapped_ok and agree and cert_ok and len(solved) > 0
    record(4, ok, f"solved={len(solved)}/{len(rows)} mapped+recovered={mapped_ok} "
                  f"verdicts agree={agree}; ex2_8 infeasible, lamE_1={lam_e}, r_1={r_forced}")
    assert ok


def test_criterion_5_second_order_correspondence(suite):
    data, _ = suite
    rows = [o for o in data["equivalence"] if o["theorem"] == "second_order_equivalence"]
    gap = max((o["detail"]["eigenvalueGap"] for o in rows), default=0.0)
    span = max((o["detail"]["spanResidual"] for o in rows), default=0.0)
    same = all(o["lhs"] == o["rhs"] for o in rows)
    ok = len(rows) > 0 and same and gap <= EIG_TOL and span <= SPAN_TOL
    record(5, ok, f"qualifying points={len(rows)} classifications agree={same} "
                  f"max eigenvalue gap={gap:.2e} max span residual={span:.2e}")
    assert ok


def test_criterion_6_derivative_soundness():
    worst, done = run_derivative_checks(np.random.default_rng(6), FD_SAMPLES)
    ok = (worst["dz_dx"] < JAC_TOL and worst["JE"] < JAC_TOL and worst["JI"] < JAC_TOL
          and worst["Habs"] < HESS_TOL and worst["Hmpcc"] < HESS_TOL
          and min(done.values()) >= FD_SAMPLES)
    record(6, ok, " ".join(f"{k}={v:.1e}(n={done[k]})" for k, v in worst.items()))
    assert ok


def test_criterion_7_determinism_and_round_trips(tmp_path):
    fixpoints = {}
    for f in sorted(FIXTURES.glob("*.anf")):
        p = parse_problem(f.read_text())
        text = dump_problem(p)
        fixpoints[f.name] = parse_problem(text) == p and dump_problem(parse_problem(text)) == text
    outs = []
    for k in range(2):
        out = tmp_path / f"r{k}.json"
        cli_main(["analyze", str(FIXTURES / "ex2_8.anf"), "--point", "0,0,0", "--seed", "3",
                  "--no-timing", "--out", str(out)])
        outs.append(out.read_bytes())
    a = run_suite(seed=11, samples=3, n_random=3)
    b = run_suite(seed=11, samples=3, n_random=3)
    a.pop("timing"), b.pop("timing")
    same_suite = a == b
    ok = all(fixpoints.values()) and outs[0] == outs[1] and same_suite
    record(7, ok, f"fixtures round-trip {sum(fixpoints.values())}/{len(fixpoints)}; "
                  f"analyze byte-identical={outs[0] == outs[1]}; suite identical={same_suite}")
    assert ok


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
