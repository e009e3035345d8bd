"""Paired evaluation of qualification, stationarity and second-order verdicts.

Each check computes both sides from scratch, on the abs-normal program,
its slack reformulation and the two counterpart MPCCs, then records whether
they agree.  Names of the checks:

========================  =====================================================
likq_slack                LIKQ(original) == LIKQ(slack form), every slack choice
idkq_slack_oneway         IDKQ(slack form) implies IDKQ(original)
mpcc_licq_slack           MPCC-LICQ(I counterpart) == MPCC-LICQ(E counterpart)
mpcc_mfcq_slack_oneway    MPCC-MFCQ(E counterpart) implies MPCC-MFCQ(I counterpart)
likq_mpcc_licq            LIKQ == MPCC-LICQ at the image point
idkq_mpcc_mfcq            IDKQ == MPCC-MFCQ at the image point
likq_mpcc_licq_slack      the same pair for the slack form and the E counterpart
idkq_mpcc_mfcq_slack      the same pair for the slack form and the E counterpart
likq_implies_idkq         LIKQ implies IDKQ
mpcc_licq_implies_mfcq    MPCC-LICQ implies MPCC-MFCQ
kink_s_stationarity       kink stationary == S-stationary; mapped multipliers pass
second_order_equivalence  reduced Hessians agree (only under LIKQ, strict
                          complementarity and strict normal growth)
========================  =====================================================
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from .absnormal import AbsNormalProblem, evaluate_switching
from .cq import check_idkq, check_likq, check_mpcc_licq, check_mpcc_mfcq
from .numkernel import definiteness, nullspace
from .policy import DEFAULT, Tolerances
from .reform import (build_counterpart_mpcc, build_slack_nlp, enumerate_slack_choices,
                     phi_inv, slack_state)
from .soc import basis_umpcc, reduced_hessians, span_residual, tightened_jacobian
from .stationarity import (check_s_stationarity, map_multipliers, solve_kink_multipliers,
                           solve_s_multipliers)

__all__ = ["Outcome", "check_point", "EQUIVALENCES", "IMPLICATIONS"]

EQUIVALENCES = ("likq_slack", "mpcc_licq_slack", "likq_mpcc_licq", "idkq_mpcc_mfcq",
                "likq_mpcc_licq_slack", "idkq_mpcc_mfcq_slack", "kink_s_stationarity",
                "second_order_equivalence")
IMPLICATIONS = ("idkq_slack_oneway", "mpcc_mfcq_slack_oneway", "likq_implies_idkq",
                "mpcc_licq_implies_mfcq")

EIG_TOL = 1e-8
SPAN_TOL = 1e-8


@dataclass(frozen=True)
class Outcome:
    """One comparison.  For implications ``lhs`` is the premise and ``rhs`` the conclusion."""

    theorem: str
    lhs: object
    rhs: object
    agree: bool
    point: int = 0
    detail: dict = field(default_factory=dict, compare=False)

    @property
    def kind(self):
        return "implication" if self.theorem in IMPLICATIONS else "equivalence"

    def to_dict(self):
        out = {"theorem": self.theorem, "lhs": self.lhs, "rhs": self.rhs,
               "agree": self.agree, "point": self.point}
        if self.detail:
            out["detail"] = self.detail
        return out


def _eq(name, a, b, k, **detail):
    return Outcome(name, a, b, a == b, k, detail)


def _imp(name, a, b, k, **detail):
    return Outcome(name, a, b, (not a) or b, k, detail)


def check_point(p: AbsNormalProblem, x, k=0, rng=None, tol: Tolerances = DEFAULT,
                second_order=True) -> List[Outcome]:
    """All comparisons at one feasible point ``x`` of ``p`` (``k`` labels the point)."""
    st = evaluate_switching(p, x, tol)
    out: List[Outcome] = []
    likq = check_likq(p, st).holds
    idkq = check_idkq(p, st).holds

    mpI = build_counterpart_mpcc(p, "I")
    ptI = phi_inv(mpI, st)
    licq = check_mpcc_licq(mpI, ptI).holds
    mfcq = check_mpcc_mfcq(mpI, ptI).holds

    out.append(_eq("likq_mpcc_licq", likq, licq, k))
    out.append(_eq("idkq_mpcc_mfcq", idkq, mfcq, k))
    out.append(_imp("likq_implies_idkq", likq, idkq, k))
    out.append(_imp("mpcc_licq_implies_mfcq", licq, mfcq, k))

    if not p.is_slack_form:
        q = build_slack_nlp(p)
        mpE = build_counterpart_mpcc(p, "E")
        for w in enumerate_slack_choices(p, st, rng):
            stw = slack_state(p, st, w, q)
            ptE = phi_inv(mpE, stw)
            likq_e = check_likq(q, stw).holds
            idkq_e = check_idkq(q, stw).holds
            licq_e = check_mpcc_licq(mpE, ptE).holds
            mfcq_e = check_mpcc_mfcq(mpE, ptE).holds
            wl = [float(v) for v in w]
            out.append(_eq("likq_slack", likq, likq_e, k, w=wl))
            out.append(_imp("idkq_slack_oneway", idkq_e, idkq, k, w=wl))
            out.append(_eq("mpcc_licq_slack", licq, licq_e, k, w=wl))
            out.append(_imp("mpcc_mfcq_slack_oneway", mfcq_e, mfcq, k, w=wl))
            out.append(_eq("likq_mpcc_licq_slack", likq_e, licq_e, k, w=wl))
            out.append(_eq("idkq_mpcc_mfcq_slack", idkq_e, mfcq_e, k, w=wl))

    kink = solve_kink_multipliers(p, st)
    s_sol = solve_s_multipliers(mpI, ptI)
    detail = {}
    agree = kink.found == s_sol.found
    if kink.found:
        lam = kink.multipliers
        mapped = map_multipliers("kink-to-s", lam, p, st)
        passes = check_s_stationarity(mpI, ptI, mapped).holds
        back = map_multipliers("s-to-kink", mapped)
        recovered = back == lam
        detail.update(mappedPasses=passes, recovered=recovered)
        agree = agree and passes and recovered
    out.append(Outcome("kink_s_stationarity", kink.found, s_sol.found, agree, k, detail))

    if second_order and kink.found:
        flags = kink.verdict.qualifiers
        if likq and flags["strictComplementarity"] and flags["strictNormalGrowth"]:
            out.append(_second_order(p, st, kink.multipliers, mpI, ptI, k, tol))
    return out


def _second_order(p, st, lam, mp, pt, k, tol):
    Ra, Rm = reduced_hessians(p, st, lam, mp, pt)
    ca, ea = definiteness(Ra, tol)
    cm, em = definiteness(Rm, tol)
    scale = 1.0 + (max(np.abs(ea).max(), np.abs(em).max()) if ea.size and em.size else 0.0)
    same_shape = ea.shape == em.shape
    gap = float(np.abs(np.sort(ea) - np.sort(em)).max()) if same_shape and ea.size else 0.0
    J = tightened_jacobian(mp, pt)
    span = span_residual(basis_umpcc(mp, pt), nullspace(J, tol, ncols=mp.n))
    agree = same_shape and ca == cm and gap <= EIG_TOL * scale and span <= SPAN_TOL
    return Outcome("second_order_equivalence", ca.value, cm.value, agree, k,
                   {"eigenvalueGap": gap, "spanResidual": span, "basisCols": int(ea.size)})
