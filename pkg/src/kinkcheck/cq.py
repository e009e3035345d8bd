"""Kink qualifications (LIKQ, IDKQ) and MPCC-LICQ / MPCC-MFCQ."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .absnormal import AbsNormalProblem, SwitchingState, assemble_jacobians, require_feasible
from .errors import InfeasiblePointError
from .numkernel import RankResult, StrictDirectionResult, rank, strict_direction
from .reform import MpccPoint, MpccProblem

__all__ = ["CqVerdict", "check_likq", "check_idkq", "check_mpcc_licq", "check_mpcc_mfcq",
           "mpcc_columns", "mpcc_licq_matrix"]


@dataclass(frozen=True, eq=False)
class CqVerdict:
    """Outcome of one qualification check.

    ``rank`` is the evidence for the rank part; ``witness`` is present for
    the direction-based qualifications (IDKQ, MPCC-MFCQ).
    """

    name: str
    holds: bool
    rank: RankResult
    witness: Optional[StrictDirectionResult] = None
    snapshot: dict = field(default_factory=dict)

    def to_dict(self):
        out = {"holds": self.holds, "rank": self.rank.to_dict()}
        if self.witness is not None:
            out["witness"] = self.witness.to_dict()
        return out


def _snapshot(st: SwitchingState):
    return {"alpha": list(st.alpha), "activeIneq": list(st.active_ineq)}


def check_likq(p: AbsNormalProblem, st: SwitchingState) -> CqVerdict:
    """Full row rank of ``[JE; JA; Jalpha]``."""
    require_feasible(p, st)
    jb = assemble_jacobians(p, st)
    r = rank(jb.Jabs.reshape(-1, p.n), st.tol)
    return CqVerdict("likq", r.full_row_rank, r, None, _snapshot(st))


def check_idkq(p: AbsNormalProblem, st: SwitchingState) -> CqVerdict:
    """Full row rank of ``[JE; Jalpha]`` plus ``d`` with ``[JE; Jalpha] d = 0``, ``JA d > 0``."""
    require_feasible(p, st)
    jb = assemble_jacobians(p, st)
    Jea = jb.JEalpha.reshape(-1, p.n)
    r = rank(Jea, st.tol)
    w = strict_direction(Jea, jb.JA, st.tol, ncols=p.n)
    return CqVerdict("idkq", r.full_row_rank and w.feasible, r, w, _snapshot(st))


def _require_mpcc_feasible(mp: MpccProblem, pt: MpccPoint):
    if not pt.is_feasible():
        eq = float(np.abs(pt.eq_val).max()) if pt.eq_val.size else 0.0
        ineq = float(max(0.0, -pt.ineq_val.min())) if pt.ineq_val.size else 0.0
        raise InfeasiblePointError(
            f"point infeasible for {mp.name}: max|eq| = {eq:.3g}, ineq violation {ineq:.3g}",
            {"eq": eq, "ineq": ineq})


def mpcc_columns(mp: MpccProblem, pt: MpccPoint):
    """Columns kept by the MPCC qualifications: free variables, ``u_i`` on U+, ``v_i`` on V+."""
    cols = set(mp.free_vars)
    cols.update(mp.pairs[i][0] for i in pt.U_plus)
    cols.update(mp.pairs[i][1] for i in pt.V_plus)
    return sorted(cols)


def mpcc_licq_matrix(mp: MpccProblem, pt: MpccPoint):
    cols = mpcc_columns(mp, pt)
    Je = pt.J_eq.reshape(-1, mp.n)
    Ja = pt.J_ineq.reshape(-1, mp.n)[list(pt.active_ineq)]
    return np.vstack([Je, Ja])[:, cols], len(cols)


def _mpcc_snapshot(pt: MpccPoint):
    snap = pt.index_sets()
    snap["activeIneq"] = list(pt.active_ineq)
    return snap


def check_mpcc_licq(mp: MpccProblem, pt: MpccPoint) -> CqVerdict:
    """LICQ of the tightened program, with the zero pair variables eliminated."""
    _require_mpcc_feasible(mp, pt)
    M, _ = mpcc_licq_matrix(mp, pt)
    r = rank(M, pt.tol)
    return CqVerdict("mpccLicq", r.full_row_rank, r, None, _mpcc_snapshot(pt))


def check_mpcc_mfcq(mp: MpccProblem, pt: MpccPoint) -> CqVerdict:
    """MFCQ of the tightened program.

    Equality rows must have full row rank and admit a direction that is
    strictly increasing on every active inequality.  Without inequalities
    this coincides with :func:`check_mpcc_licq`.
    """
    _require_mpcc_feasible(mp, pt)
    cols = mpcc_columns(mp, pt)
    Je = pt.J_eq.reshape(-1, mp.n)[:, cols]
    Ja = pt.J_ineq.reshape(-1, mp.n)[list(pt.active_ineq)][:, cols]
    r = rank(Je, pt.tol)
    w = strict_direction(Je, Ja, pt.tol, ncols=len(cols))
    return CqVerdict("mpccMfcq", r.full_row_rank and w.feasible, r, w, _mpcc_snapshot(pt))
