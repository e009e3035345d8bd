"""Second-order analysis on both sides of the abs-normal / MPCC correspondence."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .absnormal import (AbsNormalProblem, SwitchingState, assemble_jacobians,
                        lagrangian_hessian_abs)
from .multipliers import MultiplierSet
from .numkernel import Definiteness, definiteness, nullspace
from .reform import MpccPoint, MpccProblem

__all__ = [
    "SecondOrderReport", "tightened_jacobian", "basis_umpcc", "basis_uabs",
    "hessian_abs", "hessian_mpcc", "reduced_hessians", "check_critical_direction",
    "classify_second_order", "span_residual",
]

SUFFICIENT = "sufficient-holds"
NECESSARY = "necessary-holds"
FAILS = "fails"
INCONCLUSIVE = "inconclusive"

_REQUIRED = {
    "abs": ("likq", "strictComplementarity", "strictNormalGrowth"),
    "mpcc": ("mpccLicq", "mpccStrictComplementarity"),
}


def tightened_jacobian(mp: MpccProblem, pt: MpccPoint) -> np.ndarray:
    """Equalities, active inequalities, then unit rows fixing ``u_i`` on U0 and ``v_i`` on V0.

    Columns follow the natural order of ``y``.
    """
    n = mp.n
    rows = [pt.J_eq.reshape(-1, n), pt.J_ineq.reshape(-1, n)[list(pt.active_ineq)]]
    for members, col in ((pt.U_zero, 0), (pt.V_zero, 1)):
        for i in members:
            e = np.zeros(n)
            e[mp.pairs[i][col]] = 1.0
            rows.append(e[None, :])
    return np.vstack(rows)


def _mpcc_blocks(mp: MpccProblem, pt: MpccPoint):
    """Recover ``d1, d2`` blocks of the switching and equality rows from the counterpart Jacobian."""
    n = mp.n
    P = mp.n_pairs
    Je = pt.J_eq.reshape(-1, n)
    free = list(mp.free_vars)
    iu = [a for a, _ in mp.pairs]
    iv = [b for _, b in mp.pairs]
    me = Je.shape[0] - P
    E, Z = Je[:me], Je[me:]
    A = pt.J_ineq.reshape(-1, n)[list(pt.active_ineq)]
    # rows of E and A depend on u + v; Z rows carry the extra -(u - v)
    return {
        "E1": E[:, free], "E2": E[:, iu],
        "A1": A[:, free], "A2": A[:, iu],
        "Z1": Z[:, free], "Z2": 0.5 * (Z[:, iu] + Z[:, iv]),
    }


def basis_umpcc(mp: MpccProblem, pt: MpccPoint) -> np.ndarray:
    """Basis of critical directions in the natural order of ``y``.

    Counterpart programs use the block construction: the free part is an
    orthonormal basis of the kernel of ``[JE; JA; dz_D]``, pair components
    are lifted through ``dz = (I - d2cZ Sigma)^-1 d1cZ``.  Plain MPCCs
    fall back to the kernel of :func:`tightened_jacobian`.
    """
    if not mp.flavor:
        return nullspace(tightened_jacobian(mp, pt), pt.tol, ncols=mp.n)
    b = _mpcc_blocks(mp, pt)
    P = mp.n_pairs
    sigma = np.zeros(P)
    sigma[list(pt.U_plus)] = 1.0
    sigma[list(pt.V_plus)] = -1.0
    dz = np.linalg.solve(np.eye(P) - b["Z2"] * sigma[None, :], b["Z1"]) if P else \
        np.zeros((0, len(mp.free_vars)))
    sd = sigma[:, None] * dz
    U1 = np.vstack([b["E1"] + b["E2"] @ sd, b["A1"] + b["A2"] @ sd, dz[list(pt.D)]])
    Ut = nullspace(U1, pt.tol, ncols=len(mp.free_vars))
    out = np.zeros((mp.n, Ut.shape[1]))
    out[list(mp.free_vars)] = Ut
    for i in pt.U_plus:
        out[mp.pairs[i][0]] = dz[i] @ Ut
    for i in pt.V_plus:
        out[mp.pairs[i][1]] = -dz[i] @ Ut
    return out


def basis_uabs(p: AbsNormalProblem, st: SwitchingState) -> np.ndarray:
    """``[U; (Sigma dz U)_i, i not in alpha]`` with ``U`` an orthonormal kernel basis of Jabs."""
    jb = assemble_jacobians(p, st)
    U = nullspace(jb.Jabs.reshape(-1, p.n), st.tol, ncols=p.n)
    inact = list(st.inactive)
    lower = (st.sigma[:, None] * st.dz_dx)[inact] @ U
    return np.vstack([U, lower.reshape(len(inact), U.shape[1])])


def hessian_abs(p: AbsNormalProblem, st: SwitchingState, lam: MultiplierSet) -> np.ndarray:
    """Lagrangian Hessian in ``(x, m)`` with the ``m`` block restricted to inactive switches."""
    H = lagrangian_hessian_abs(p, st, lam)
    keep = list(range(p.n)) + [p.n + i for i in st.inactive]
    return H[np.ix_(keep, keep)]


def hessian_mpcc(mp: MpccProblem, pt: MpccPoint, lm: MultiplierSet) -> np.ndarray:
    """``d2_yy Lc``; the ``mu`` terms are linear and drop out."""
    lam_eq = np.concatenate([lm.lamE, lm.lamZ])
    if lam_eq.size != mp.eq.dim or lm.lamI.size != mp.ineq.dim:
        raise ValueError("multiplier sizes do not match the complementarity program")
    y = pt.y
    H = mp.f.weighted_hessian([1.0], y)
    H = H + mp.eq.weighted_hessian(lam_eq, y) - mp.ineq.weighted_hessian(lm.lamI, y)
    return 0.5 * (H + H.T)


def reduced_hessians(p: AbsNormalProblem, st: SwitchingState, lam: MultiplierSet,
                     mp: Optional[MpccProblem] = None, pt: Optional[MpccPoint] = None):
    """Return ``(Uabs' Habs Uabs, Umpcc' Hmpcc Umpcc)``.

    ``mp`` defaults to the I-counterpart and ``pt`` to the image of ``st``.
    """
    from .reform import build_counterpart_mpcc, phi_inv

    Ua = basis_uabs(p, st)
    Ra = Ua.T @ hessian_abs(p, st, lam) @ Ua
    mp = mp or build_counterpart_mpcc(p, "I")
    pt = pt or phi_inv(mp, st)
    Um = basis_umpcc(mp, pt)
    Rm = Um.T @ hessian_mpcc(mp, pt, lam) @ Um
    return 0.5 * (Ra + Ra.T), 0.5 * (Rm + Rm.T)


def span_residual(A, B) -> float:
    """Symmetric distance between the column spaces of ``A`` and ``B`` (0 when equal)."""
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    if A.shape[1] == 0 and B.shape[1] == 0:
        return 0.0

    def orth(M):
        if M.shape[1] == 0:
            return M
        u, sv, _ = np.linalg.svd(M, full_matrices=False)
        return u[:, sv > 1e-10 * max(1.0, sv[0])]

    Qa, Qb = orth(A), orth(B)
    if Qa.shape[1] != Qb.shape[1]:
        return float("inf")
    return float(np.abs(Qa - Qb @ (Qb.T @ Qa)).max())


def check_critical_direction(mp: MpccProblem, pt: MpccPoint, d):
    """Return ``(is_critical, {condition: residual}, failed_conditions)``.

    Labels: ``min`` (degenerate pairs), ``vPlusU`` (``du`` on V+),
    ``uPlusV`` (``dv`` on U+), ``activeIneq``, ``equality``, ``switching``,
    ``objective``.  Counterpart programs split their equality rows into the
    original equalities and the switching rows; plain MPCCs report all
    equality rows as ``equality``.
    """
    d = np.asarray(d, dtype=float).ravel()
    if d.size != mp.n:
        raise ValueError(f"direction has {d.size} entries, expected {mp.n}")
    n = mp.n
    du = np.array([d[a] for a, _ in mp.pairs])
    dv = np.array([d[b] for _, b in mp.pairs])
    Je = pt.J_eq.reshape(-1, n)
    nz = mp.n_pairs if mp.flavor else 0
    eq_part = Je @ d
    ineq_part = pt.J_ineq.reshape(-1, n)[list(pt.active_ineq)] @ d

    def mx(v):
        return float(np.abs(v).max()) if np.size(v) else 0.0

    res = {
        "min": mx(np.minimum(du[list(pt.D)], dv[list(pt.D)])) if pt.D else 0.0,
        "vPlusU": mx(du[list(pt.V_plus)]) if pt.V_plus else 0.0,
        "uPlusV": mx(dv[list(pt.U_plus)]) if pt.U_plus else 0.0,
        "activeIneq": float(max(0.0, -ineq_part.min())) if ineq_part.size else 0.0,
        "equality": mx(eq_part[: Je.shape[0] - nz]),
        "switching": mx(eq_part[Je.shape[0] - nz:]),
        "objective": abs(float(pt.grad_f @ d)),
    }
    scale = 1.0 + mx(d) * max(1.0, mx(Je), mx(pt.J_ineq), mx(pt.grad_f))
    lim = pt.tol.eps_resid * scale
    failed = tuple(k for k, v in res.items() if v > lim)
    return not failed, res, failed


@dataclass(frozen=True, eq=False)
class SecondOrderReport:
    side: str
    basis_cols: int
    reduced: np.ndarray = field(repr=False)
    eigenvalues: np.ndarray
    definiteness: Definiteness
    classification: str
    vacuous: bool
    qualifiers: dict

    def to_dict(self):
        return {"side": self.side, "basisCols": self.basis_cols,
                "eigenvalues": [float(v) for v in self.eigenvalues],
                "definiteness": self.definiteness.value,
                "classification": self.classification, "vacuous": self.vacuous,
                "qualifiers": dict(self.qualifiers)}


def classify_second_order(side: str, reduced, qualifiers: dict, tol=None) -> SecondOrderReport:
    """Classify a reduced Hessian.

    ``qualifiers`` must contain the hypotheses of the side: ``likq``,
    ``strictComplementarity`` and ``strictNormalGrowth`` for ``"abs"``;
    ``mpccLicq`` and ``mpccStrictComplementarity`` for ``"mpcc"``.  On the
    MPCC side the necessary condition is only meaningful under
    MPCC-strict complementarity, so without it the result is
    ``"inconclusive"``.  An empty basis makes the conditions vacuous.
    """
    from .policy import DEFAULT

    if side not in _REQUIRED:
        raise ValueError(f"unknown side {side!r}")
    missing = [k for k in _REQUIRED[side] if k not in qualifiers]
    if missing:
        raise ValueError(f"missing qualifier flags: {missing}")
    tol = tol or DEFAULT
    R = np.asarray(reduced, dtype=float)
    R = R.reshape(R.shape[0], R.shape[0]) if R.size else np.zeros((0, 0))
    cls, ev = definiteness(R, tol)
    qual = {k: bool(qualifiers[k]) for k in _REQUIRED[side]}
    ok = all(qual.values())
    vacuous = R.shape[0] == 0
    if side == "mpcc" and not qual["mpccStrictComplementarity"]:
        label = INCONCLUSIVE
    elif cls == Definiteness.PD and ok:
        label = SUFFICIENT
    elif cls in (Definiteness.PD, Definiteness.PSD):
        label = NECESSARY
    else:
        label = FAILS
    return SecondOrderReport(side, R.shape[0], R, ev, cls, label, vacuous, qual)
