"""First-order conditions: kink stationarity, S-stationarity and the map between them.

Condition labels used in verdicts:

kink side
    ``gradient``       f' + lamE d1cE - lamI d1cI + lamZ d1cZ = 0
    ``normalGrowth``   r_i >= |lamZ_i| on active switches
    ``switchSign``     r_i = sigma_i lamZ_i on inactive switches
    ``ineqSign``       lamI >= 0
    ``complementarySlackness``  lamI . cI = 0

where ``r = lamE d2cE - lamI d2cI + lamZ d2cZ``.

S side
    ``gradient``       d_y Lc = 0
    ``muDegenerate``   muU_i, muV_i >= 0 on D
    ``muUplus``        muU_i = 0 on U+
    ``muVplus``        muV_i = 0 on V+
    ``ineqSign`` and ``complementarySlackness`` as above.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .absnormal import AbsNormalProblem, SwitchingState, require_feasible
from .cq import _require_mpcc_feasible
from .multipliers import MultiplierSet
from .numkernel import nullspace
from .policy import Tolerances
from .reform import MpccPoint, MpccProblem
from .simplex import linprog

__all__ = [
    "StationarityVerdict", "MultiplierSolution",
    "check_kink_stationarity", "solve_kink_multipliers",
    "check_s_stationarity", "solve_s_multipliers",
    "map_multipliers", "qualifier_flags", "switch_rows",
]


@dataclass(frozen=True, eq=False)
class StationarityVerdict:
    """Verdict of a stationarity check.

    ``residuals`` maps each condition label to its worst violation (0 when
    satisfied exactly); ``failed`` lists the labels beyond tolerance.
    """

    kind: str
    holds: bool
    multipliers: MultiplierSet
    residuals: dict
    failed: tuple
    qualifiers: dict = field(default_factory=dict)

    def to_dict(self):
        return {"holds": self.holds, "multipliers": self.multipliers.to_dict(),
                "residuals": dict(self.residuals), "failed": list(self.failed),
                "qualifiers": dict(self.qualifiers)}


@dataclass(frozen=True, eq=False)
class MultiplierSolution:
    """Result of a multiplier LP.  Exactly one of ``multipliers``/``certificate`` is set."""

    found: bool
    multipliers: Optional[MultiplierSet]
    certificate: Optional[dict]
    verdict: Optional[StationarityVerdict] = None
    margin: Optional[float] = None


def _scale(*parts):
    m = 0.0
    for p in parts:
        p = np.asarray(p, dtype=float)
        if p.size:
            m = max(m, float(np.abs(p).max()))
    return 1.0 + m


def switch_rows(st: SwitchingState, lam: MultiplierSet):
    """``r = lamE d2cE - lamI d2cI + lamZ d2cZ`` (one entry per switching variable)."""
    return st.d_cE[1].T @ lam.lamE - st.d_cI[1].T @ lam.lamI + st.d_cZ[1].T @ lam.lamZ


def _check_dims(p: AbsNormalProblem, lam: MultiplierSet):
    got = (lam.lamE.size, lam.lamI.size, lam.lamZ.size)
    if got != (p.m1, p.m2, p.s):
        raise ValueError(f"multiplier sizes {got} do not match (m1, m2, s) = {(p.m1, p.m2, p.s)}")


def _objective_gradient(fn, x):
    _, g, _ = fn.jets(x, order=1)
    return g[0]


def _ineq_residuals(lamI, cI, active, tol: Tolerances):
    neg = float(max(0.0, -lamI.min())) if lamI.size else 0.0
    cs = float(abs(lamI @ cI)) if lamI.size else 0.0
    cs_tol = tol.eps_act * (1.0 + (np.abs(lamI).max() if lamI.size else 0.0))
    return neg, cs, cs_tol


def qualifier_flags(lamI, active, eps, normal_margins=None, mu_degenerate=None):
    """Strict complementarity, strict normal growth and MPCC-strict complementarity.

    ``normal_margins`` are ``r_i - |lamZ_i|`` on active switches;
    ``mu_degenerate`` are the values of ``muU_i`` and ``muV_i`` on D.
    """
    sc = bool(all(lamI[i] > eps for i in active))
    out = {"strictComplementarity": sc}
    if normal_margins is not None:
        out["strictNormalGrowth"] = bool(np.all(np.asarray(normal_margins) > eps))
    if mu_degenerate is not None:
        out["mpccStrictComplementarity"] = sc and bool(np.all(np.asarray(mu_degenerate) > eps))
    return out


def check_kink_stationarity(p: AbsNormalProblem, st: SwitchingState,
                            lam: MultiplierSet) -> StationarityVerdict:
    require_feasible(p, st)
    _check_dims(p, lam)
    tol = st.tol
    eps = tol.eps_act
    g = _objective_gradient(p.f, st.x)
    (E1, E2), (I1, I2), (Z1, Z2) = st.d_cE, st.d_cI, st.d_cZ
    tE, tI, tZ = E1.T @ lam.lamE, I1.T @ lam.lamI, Z1.T @ lam.lamZ
    grad = g + tE - tI + tZ
    r = switch_rows(st, lam)
    alpha = list(st.alpha)
    inact = list(st.inactive)
    growth = r[alpha] - np.abs(lam.lamZ[alpha])
    sign_res = r[inact] - st.sigma[inact] * lam.lamZ[inact]
    neg, cs, cs_tol = _ineq_residuals(lam.lamI, st.cI, st.active_ineq, tol)

    res = {
        "gradient": float(np.abs(grad).max()) if grad.size else 0.0,
        "normalGrowth": float(max(0.0, -growth.min())) if growth.size else 0.0,
        "switchSign": float(np.abs(sign_res).max()) if sign_res.size else 0.0,
        "ineqSign": neg,
        "complementarySlackness": cs,
    }
    lim = {
        "gradient": tol.eps_resid * _scale(g, tE, tI, tZ),
        "normalGrowth": eps,
        "switchSign": tol.eps_resid * _scale(r, lam.lamZ),
        "ineqSign": eps,
        "complementarySlackness": cs_tol,
    }
    failed = tuple(k for k in res if res[k] > lim[k])
    mu_u, mu_v = r - lam.lamZ, r + lam.lamZ
    flags = qualifier_flags(lam.lamI, st.active_ineq, eps, growth,
                            np.concatenate([mu_u[alpha], mu_v[alpha]]))
    return StationarityVerdict("kink", not failed, lam, res, failed, flags)


def _kink_lp_blocks(p: AbsNormalProblem, st: SwitchingState):
    """Linear map of ``x = (lamE, lamI, lamZ)`` onto the gradient and switch rows."""
    (E1, E2), (I1, I2), (Z1, Z2) = st.d_cE, st.d_cI, st.d_cZ
    nv = p.m1 + p.m2 + p.s
    G = np.hstack([E1.T, -I1.T, Z1.T]).reshape(p.n, nv)       # gradient rows
    R = np.hstack([E2.T, -I2.T, Z2.T]).reshape(p.s, nv)       # r = R x
    L = np.zeros((p.s, nv))                                    # lamZ = L x
    L[:, p.m1 + p.m2:] = np.eye(p.s)
    return G, R, L


def solve_kink_multipliers(p: AbsNormalProblem, st: SwitchingState) -> MultiplierSolution:
    """Search multipliers for the kink-stationarity system by linear programming.

    Among all multipliers the LP maximizes (up to 1) a common margin by which
    active inequality multipliers and the normal-growth rows exceed zero, so
    that strict qualifiers are detected when some multiplier has them.
    """
    require_feasible(p, st)
    tol = st.tol
    m1, m2, s = p.m1, p.m2, p.s
    nv = m1 + m2 + s
    g = _objective_gradient(p.f, st.x)
    G, R, L = _kink_lp_blocks(p, st)
    alpha, inact = list(st.alpha), list(st.inactive)
    sig = st.sigma

    eq_rows = [G]
    eq_rhs = [-g]
    if inact:
        eq_rows.append(R[inact] - sig[inact, None] * L[inact])
        eq_rhs.append(np.zeros(len(inact)))
    A_eq = np.hstack([np.vstack(eq_rows), np.zeros((sum(r.shape[0] for r in eq_rows), 1))])
    b_eq = np.concatenate(eq_rhs)

    ub, ub_rhs = [], []
    for i in alpha:
        for sg in (1.0, -1.0):
            row = np.append(-R[i] + sg * L[i], 0.0)
            ub.append(row)
            ub.append(np.append(row[:-1], 1.0))
            ub_rhs += [0.0, 0.0]
    for i in st.active_ineq:
        row = np.zeros(nv + 1)
        row[m1 + i] = -1.0
        row[-1] = 1.0
        ub.append(row)
        ub_rhs.append(0.0)
    A_ub = np.array(ub).reshape(-1, nv + 1)
    b_ub = np.array(ub_rhs)

    bounds = [(None, None)] * m1
    bounds += [(0.0, None) if i in st.active_ineq else (0.0, 0.0) for i in range(m2)]
    bounds += [(None, None)] * s + [(None, 1.0)]
    c = np.zeros(nv + 1)
    c[-1] = -1.0
    res = linprog(c, A_ub, b_ub, A_eq, b_eq, bounds)
    if res.status == "optimal":
        x = res.x
        lam = MultiplierSet(x[:m1], x[m1:m1 + m2], x[m1 + m2:nv])
        verdict = check_kink_stationarity(p, st, lam)
        return MultiplierSolution(True, lam, None, verdict, float(x[-1]))
    cert = _kink_certificate(p, st, G, R, L, g, tol)
    A, b, y = res.farkas
    cert["farkas"] = {"y": [float(v) for v in y], "maxYA": float((y @ A).max()),
                      "yb": float(y @ b)}
    return MultiplierSolution(False, None, cert)


def _kink_certificate(p, st, G, R, L, g, tol):
    """Explain LP infeasibility through quantities forced by the equality subsystem."""
    m1, m2, s = p.m1, p.m2, p.s
    nv = m1 + m2 + s
    inact = list(st.inactive)
    keep = [j for j in range(nv) if not (m1 <= j < m1 + m2 and (j - m1) not in st.active_ineq)]
    rows = [G]
    rhs = [-g]
    if inact:
        rows.append(R[inact] - st.sigma[inact, None] * L[inact])
        rhs.append(np.zeros(len(inact)))
    E = np.vstack(rows)[:, keep]
    e = np.concatenate(rhs)
    x0k, *_ = np.linalg.lstsq(E, e, rcond=None) if E.size else (np.zeros(len(keep)),)
    x0 = np.zeros(nv)
    x0[keep] = x0k
    resid = float(np.abs(E @ x0k - e).max()) if e.size else 0.0
    out = {"equalityResidual": resid, "forced": {}, "forcedSwitchRows": {}, "explanation": []}
    if resid > tol.eps_resid * _scale(g, E):
        out["explanation"].append(
            f"gradient and switch-sign equations are inconsistent (residual {resid:.3g})")
        return out
    N = np.zeros((nv, 0))
    if keep:
        Nk = nullspace(E, tol, ncols=len(keep))
        N = np.zeros((nv, Nk.shape[1]))
        N[keep] = Nk
    fixed_tol = 1e-9

    def forced(vec):
        return N.shape[1] == 0 or float(np.abs(vec @ N).max()) <= fixed_tol

    names = [("lamE", i) for i in range(m1)] + [("lamI", i) for i in range(m2)] + \
            [("lamZ", i) for i in range(s)]
    for j, (nm, i) in enumerate(names):
        if j not in keep:
            continue
        unit = np.zeros(nv)
        unit[j] = 1.0
        if forced(unit):
            out["forced"].setdefault(nm, {})[i + 1] = float(x0[j])
    for i in st.alpha:
        if forced(R[i]):
            ri = float(R[i] @ x0)
            out["forcedSwitchRows"][i + 1] = ri
            zval = out["forced"].get("lamZ", {}).get(i + 1)
            if ri < -tol.eps_act:
                out["explanation"].append(
                    f"switching row {i + 1}: r = {ri:.6g} is forced, but r >= |lamZ_{i + 1}| >= 0")
            elif zval is not None and ri < abs(zval) - tol.eps_act:
                out["explanation"].append(
                    f"switching row {i + 1}: r = {ri:.6g} < |lamZ_{i + 1}| = {abs(zval):.6g}")
    for i, v in out["forced"].get("lamI", {}).items():
        if v < -tol.eps_act:
            out["explanation"].append(f"lamI_{i} = {v:.6g} is forced negative")
    head = [f"{nm}_{i} = {v:.6g} is forced by the equations"
            for nm, vals in out["forced"].items() for i, v in vals.items()]
    out["explanation"] = head + out["explanation"]
    return out


def _split_eq(mp: MpccProblem):
    nz = mp.n_pairs if mp.flavor else 0
    return mp.eq.dim - nz, nz


def _check_mpcc_dims(mp: MpccProblem, lm: MultiplierSet):
    me, nz = _split_eq(mp)
    if lm.lamE.size + lm.lamZ.size != mp.eq.dim or lm.lamI.size != mp.ineq.dim:
        raise ValueError(
            f"multipliers ({lm.lamE.size}+{lm.lamZ.size}, {lm.lamI.size}) do not match "
            f"{mp.eq.dim} equalities and {mp.ineq.dim} inequalities")
    P = mp.n_pairs
    for k in ("muU", "muV"):
        v = getattr(lm, k)
        if v is None or v.size != P:
            raise ValueError(f"{k} must have {P} entries")


def check_s_stationarity(mp: MpccProblem, pt: MpccPoint, lm: MultiplierSet) -> StationarityVerdict:
    _require_mpcc_feasible(mp, pt)
    _check_mpcc_dims(mp, lm)
    tol = pt.tol
    eps = tol.eps_act
    lam_eq = np.concatenate([lm.lamE, lm.lamZ])
    Je = pt.J_eq.reshape(-1, mp.n)
    Ji = pt.J_ineq.reshape(-1, mp.n)
    tE, tI = Je.T @ lam_eq, Ji.T @ lm.lamI
    tmu = np.zeros(mp.n)
    for i, (a, b) in enumerate(mp.pairs):
        tmu[a] += lm.muU[i]
        tmu[b] += lm.muV[i]
    grad = pt.grad_f + tE - tI - tmu
    D, Up, Vp = list(pt.D), list(pt.U_plus), list(pt.V_plus)
    mu_d = np.concatenate([lm.muU[D], lm.muV[D]])
    neg, cs, cs_tol = _ineq_residuals(lm.lamI, pt.ineq_val, pt.active_ineq, tol)
    res = {
        "gradient": float(np.abs(grad).max()) if grad.size else 0.0,
        "muDegenerate": float(max(0.0, -mu_d.min())) if mu_d.size else 0.0,
        "muUplus": float(np.abs(lm.muU[Up]).max()) if Up else 0.0,
        "muVplus": float(np.abs(lm.muV[Vp]).max()) if Vp else 0.0,
        "ineqSign": neg,
        "complementarySlackness": cs,
    }
    mu_tol = tol.eps_resid * _scale(lm.muU, lm.muV, lam_eq)
    lim = {
        "gradient": tol.eps_resid * _scale(pt.grad_f, tE, tI, tmu),
        "muDegenerate": eps,
        "muUplus": mu_tol,
        "muVplus": mu_tol,
        "ineqSign": eps,
        "complementarySlackness": cs_tol,
    }
    failed = tuple(k for k in res if res[k] > lim[k])
    flags = qualifier_flags(lm.lamI, pt.active_ineq, eps, None, mu_d)
    return StationarityVerdict("S", not failed, lm, res, failed, flags)


def solve_s_multipliers(mp: MpccProblem, pt: MpccPoint) -> MultiplierSolution:
    """LP for S-stationarity multipliers, maximizing the margin on D and on active ``lamI``."""
    _require_mpcc_feasible(mp, pt)
    me, nz = _split_eq(mp)
    ne, ni, P = mp.eq.dim, mp.ineq.dim, mp.n_pairs
    nv = ne + ni + 2 * P
    Je = pt.J_eq.reshape(-1, mp.n)
    Ji = pt.J_ineq.reshape(-1, mp.n)
    M = np.zeros((mp.n, P))
    Nv = np.zeros((mp.n, P))
    for i, (a, b) in enumerate(mp.pairs):
        M[a, i] = 1.0
        Nv[b, i] = 1.0
    A_eq = np.hstack([Je.T.reshape(mp.n, ne), -Ji.T.reshape(mp.n, ni), -M, -Nv,
                      np.zeros((mp.n, 1))])
    b_eq = -pt.grad_f
    ub, rhs = [], []
    for i in pt.active_ineq:
        row = np.zeros(nv + 1)
        row[ne + i] = -1.0
        row[-1] = 1.0
        ub.append(row)
        rhs.append(0.0)
    for i in pt.D:
        for off in (ne + ni, ne + ni + P):
            row = np.zeros(nv + 1)
            row[off + i] = -1.0
            row[-1] = 1.0
            ub.append(row)
            rhs.append(0.0)
    bounds = [(None, None)] * ne
    bounds += [(0.0, None) if i in pt.active_ineq else (0.0, 0.0) for i in range(ni)]
    for plus in (pt.U_plus, pt.V_plus):
        bounds += [(0.0, 0.0) if i in plus else (0.0, None) if i in pt.D else (None, None)
                   for i in range(P)]
    bounds.append((None, 1.0))
    c = np.zeros(nv + 1)
    c[-1] = -1.0
    res = linprog(c, np.array(ub).reshape(-1, nv + 1), np.array(rhs), A_eq, b_eq, bounds)
    if res.status != "optimal":
        A, b, y = res.farkas
        cert = {"farkas": {"y": [float(v) for v in y], "maxYA": float((y @ A).max()),
                           "yb": float(y @ b)}}
        return MultiplierSolution(False, None, cert)
    x = res.x
    lm = MultiplierSet(x[:me], x[ne:ne + ni], x[me:ne],
                       x[ne + ni:ne + ni + P], x[ne + ni + P:nv])
    return MultiplierSolution(True, lm, None, check_s_stationarity(mp, pt, lm), float(x[-1]))


def map_multipliers(direction: str, lam: MultiplierSet, p: Optional[AbsNormalProblem] = None,
                    st: Optional[SwitchingState] = None) -> MultiplierSet:
    """Translate multipliers between the abs-normal program and its counterpart.

    ``"kink-to-s"`` keeps ``(lamE, lamI, lamZ)`` and sets
    ``muU = r - lamZ``, ``muV = r + lamZ`` with ``r`` from :func:`switch_rows`;
    it needs the abs-normal problem and state.  ``"s-to-kink"`` drops ``mu``.
    """
    if direction == "s-to-kink":
        return lam.without_mu()
    if direction != "kink-to-s":
        raise ValueError(f"unknown direction {direction!r}")
    if p is None or st is None:
        raise ValueError("kink-to-s needs the abs-normal problem and its switching state")
    _check_dims(p, lam)
    r = switch_rows(st, lam)
    return MultiplierSet(lam.lamE, lam.lamI, lam.lamZ, r - lam.lamZ, r + lam.lamZ)
