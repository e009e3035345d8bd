"""End-to-end analysis of one point and the randomized equivalence suite."""

from __future__ import annotations

import time
from collections import OrderedDict
from typing import Optional

import numpy as np

from . import __version__
from .absnormal import AbsNormalProblem, evaluate_switching, require_feasible
from .cq import check_idkq, check_likq, check_mpcc_licq, check_mpcc_mfcq
from .equivalence import EQUIVALENCES, IMPLICATIONS, check_point
from .generator import feasible_points, random_instance
from .multipliers import MultiplierSet
from .policy import DEFAULT, Tolerances
from .reform import build_counterpart_mpcc, phi_inv
from .report import AnalysisReport
from .soc import basis_uabs, classify_second_order, reduced_hessians
from .stationarity import (check_kink_stationarity, check_s_stationarity, map_multipliers,
                           solve_kink_multipliers, solve_s_multipliers)

__all__ = ["analyze", "run_suite"]


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    return obj


def _one_based(idx):
    return [int(i) + 1 for i in idx]


def _stat_entry(verdict, certificate=None):
    if verdict is None:
        out = {"holds": False, "multipliers": None, "residuals": None, "qualifiers": None}
    else:
        out = verdict.to_dict()
    if certificate is not None:
        out["certificate"] = certificate
    return out


def analyze(p: AbsNormalProblem, x, multipliers: Optional[MultiplierSet] = None,
            tol: Tolerances = DEFAULT, seed: int = 0) -> AnalysisReport:
    """Switching structure, qualifications, stationarity and second order at ``x``.

    Given multipliers are verified; otherwise they are computed by LP.  The
    S-stationarity entry uses ``muU``/``muV`` from the input when present and
    the mapped kink multipliers otherwise.
    """
    t_start = time.perf_counter()
    x = np.asarray(x, dtype=float).ravel()
    st = evaluate_switching(p, x, tol)
    require_feasible(p, st)
    rng = np.random.default_rng(seed)

    likq = check_likq(p, st)
    idkq = check_idkq(p, st)
    mp = build_counterpart_mpcc(p, "I")
    pt = phi_inv(mp, st)
    licq = check_mpcc_licq(mp, pt)
    mfcq = check_mpcc_mfcq(mp, pt)

    kink_cert = None
    if multipliers is not None:
        kink = check_kink_stationarity(p, st, multipliers.without_mu())
        lam = multipliers.without_mu()
    else:
        sol = solve_kink_multipliers(p, st)
        kink = sol.verdict
        kink_cert = sol.certificate
        lam = sol.multipliers
    if multipliers is not None and multipliers.muU is not None:
        s_ver = check_s_stationarity(mp, pt, multipliers)
        s_cert = None
    elif lam is not None:
        s_ver = check_s_stationarity(mp, pt, map_multipliers("kink-to-s", lam, p, st))
        s_cert = None
    else:
        s_sol = solve_s_multipliers(mp, pt)
        s_ver, s_cert = s_sol.verdict, s_sol.certificate

    second = _second_order_entry(p, st, kink, likq.holds, licq.holds, mp, pt, tol)
    equivalence = [o.to_dict() for o in check_point(p, x, 0, rng, tol)]
    switching = {
        "z": st.z, "sigma": st.sigma, "alpha": _one_based(st.alpha),
        "activeIneq": _one_based(st.active_ineq), "margins": st.margins(),
        "dzdt": st.dz_dx,
    }
    report = AnalysisReport(
        problem=p.name,
        point=x,
        policy=tol.to_dict(),
        switching=switching,
        cq={"likq": likq.to_dict(), "idkq": idkq.to_dict(),
            "mpccLicq": licq.to_dict(), "mpccMfcq": mfcq.to_dict()},
        stationarity={"kink": _stat_entry(kink, kink_cert), "s": _stat_entry(s_ver, s_cert)},
        secondOrder=second,
        equivalence=equivalence,
        version=__version__,
        timing={"seconds": time.perf_counter() - t_start},
    )
    return AnalysisReport(**_jsonable(report.__dict__))


def _second_order_entry(p, st, kink, likq, licq, mp, pt, tol):
    if kink is None or not kink.holds:
        ncols = int(basis_uabs(p, st).shape[1])
        return {"basisCols": ncols, "eigenvalues": [], "classification": "not-applicable",
                "vacuous": ncols == 0, "note": "no stationarity certificate"}
    Ra, Rm = reduced_hessians(p, st, kink.multipliers, mp, pt)
    q = kink.qualifiers
    rep = classify_second_order("abs", Ra, {"likq": likq, **q}, tol)
    rep_m = classify_second_order("mpcc", Rm, {"mpccLicq": licq, **q}, tol)
    out = rep.to_dict()
    out["mpcc"] = rep_m.to_dict()
    return out


def _summarize(outcomes):
    summary = OrderedDict()
    for name in EQUIVALENCES + IMPLICATIONS:
        sel = [o for o in outcomes if o.theorem == name]
        entry = {"kind": "implication" if name in IMPLICATIONS else "equivalence",
                 "checked": len(sel), "agree": sum(o.agree for o in sel)}
        entry["violations"] = entry["checked"] - entry["agree"]
        if name in ("idkq_slack_oneway", "mpcc_mfcq_slack_oneway"):
            entry["converseFailures"] = sum((not o.lhs) and o.rhs for o in sel)
        summary[name] = entry
    return summary


def run_suite(p: Optional[AbsNormalProblem] = None, x=None, seed: int = 42, samples: int = 7,
              n_random: int = 0, tol: Tolerances = DEFAULT) -> dict:
    """Run :func:`check_point` at ``x`` and up to ``samples`` nearby feasible points.

    With ``n_random > 0`` (and no problem) the suite instead draws that many
    seeded instances, cycling through the generic, stationary and degenerate
    generator modes, each with up to ``samples + 1`` points.
    """
    t_start = time.perf_counter()
    rng = np.random.default_rng(seed)
    outcomes = []
    points = []
    if p is not None:
        x = np.asarray(x, dtype=float).ravel()
        require_feasible(p, evaluate_switching(p, x, tol))
        pts = [x] + feasible_points(p, x, rng, samples, tol)
        for k, y in enumerate(pts):
            outcomes += check_point(p, y, k, rng, tol)
        points = [list(map(float, y)) for y in pts]
        name = p.name
    else:
        for i in range(n_random):
            inst = random_instance(rng, stationary=(i % 3 == 1), degenerate=(i % 3 == 2),
                                   n_points=samples + 1, tol=tol, name=f"random{i + 1}")
            for k, y in enumerate(inst.points):
                for o in check_point(inst.problem, y, k, rng, tol):
                    d = o.to_dict()
                    d["instance"] = i + 1
                    outcomes.append((o, d))
            points.append(len(inst.points))
        name = f"random[{n_random}]"
    if p is not None:
        pairs = [(o, o.to_dict()) for o in outcomes]
    else:
        pairs = outcomes
    summary = _summarize([o for o, _ in pairs])
    violations = [d for o, d in pairs if not o.agree]
    return _jsonable({
        "problem": name,
        "seed": seed,
        "samples": samples,
        "points": points,
        "summary": summary,
        "violations": violations,
        "equivalence": [d for _, d in pairs],
        "policy": tol.to_dict(),
        "version": __version__,
        "timing": {"seconds": time.perf_counter() - t_start},
    })
