"""Slack reformulation, counterpart MPCCs and the point maps between them."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np

from .absnormal import AbsNormalProblem, SwitchingState, evaluate_switching
from .errors import ComplementarityError, InfeasiblePointError
from .expr import AbsRef, Add, Layout, SmoothFunction, Sub, Var, transform
from .policy import DEFAULT, Tolerances

__all__ = [
    "MpccProblem", "MpccPoint", "build_slack_nlp", "build_counterpart_mpcc",
    "mpcc_point", "phi", "phi_inv", "enumerate_slack_choices", "slack_state",
]

MAX_ENUMERATE = 20
N_SAMPLED_CHOICES = 64


def build_slack_nlp(p: AbsNormalProblem) -> AbsNormalProblem:
    """Replace ``cI >= 0`` by ``cI - |z^w| = 0`` with switching rows ``z^w = w``.

    The result has ``n + m2`` variables, ``s + m2`` switching variables,
    ``m1 + m2`` equalities and no inequalities.  Problems without
    inequalities are returned unchanged.
    """
    if p.m2 == 0:
        return p
    if p.is_slack_form:
        raise ValueError("problem already has a slack group 'w'")
    s, m2 = p.s, p.m2
    layout = p.layout + (("w", m2),)
    eq_rows = p.cE.rows + tuple(Sub(row, AbsRef(s + i)) for i, row in enumerate(p.cI.rows))
    z_rows = p.cZ.rows + tuple(Var("w", i) for i in range(m2))
    n_abs = s + m2
    return AbsNormalProblem(
        name=f"{p.name}_slack",
        layout=layout,
        f=SmoothFunction(p.f.rows, layout, 0),
        cE=SmoothFunction(eq_rows, layout, n_abs),
        cI=SmoothFunction((), layout, n_abs),
        cZ=SmoothFunction(z_rows, layout, n_abs),
    )


@dataclass(frozen=True)
class MpccProblem:
    """``min f(y)  s.t.  eq(y) = 0, ineq(y) >= 0, 0 <= y[a] _|_ y[b] >= 0``.

    ``pairs`` holds flat ``(u, v)`` index pairs into ``y``.  Counterparts of
    abs-normal problems record their ``flavor`` (``"I"`` or ``"E"``) and the
    ``base`` problem; both are ignored by equality so that a counterpart and
    its re-parsed file text compare equal.
    """

    name: str
    layout: Layout
    f: SmoothFunction
    eq: SmoothFunction
    ineq: SmoothFunction
    pairs: Tuple[Tuple[int, int], ...]
    flavor: Optional[str] = field(default=None, compare=False)
    base: Optional[AbsNormalProblem] = field(default=None, compare=False, repr=False)

    @property
    def n(self) -> int:
        return self.f.n

    @property
    def n_pairs(self) -> int:
        return len(self.pairs)

    @property
    def free_vars(self) -> Tuple[int, ...]:
        used = {k for pr in self.pairs for k in pr}
        return tuple(i for i in range(self.n) if i not in used)

    def variable_names(self):
        return [f"{g}{i + 1}" for g, size in self.layout for i in range(size)]


def _subst_uv(row, s):
    def repl(leaf):
        if isinstance(leaf, AbsRef):
            return Add(Var("u", leaf.index), Var("v", leaf.index))
        return None

    return transform(row, repl) if s else row


def build_counterpart_mpcc(p: AbsNormalProblem, flavor: str = "I") -> MpccProblem:
    """Counterpart MPCC: ``|z| -> u + v`` and ``z -> u - v`` with ``u _|_ v``.

    Flavor ``"E"`` builds the counterpart of the slack reformulation, whose
    pair variables are ``u = (u^t, u^w)`` and ``v = (v^t, v^w)``.
    """
    flavor = flavor.upper()
    if flavor not in ("I", "E"):
        raise ValueError(f"unknown flavor {flavor!r}")
    if flavor == "E":
        if p.is_slack_form:
            raise ValueError("flavor E needs the original problem, not its slack form")
        q = build_slack_nlp(p)
    else:
        q = p
    s = q.s
    layout = q.layout + ((("u", s), ("v", s)) if s else ())
    eq_rows = tuple(_subst_uv(r, s) for r in q.cE.rows)
    eq_rows += tuple(Sub(_subst_uv(r, s), Sub(Var("u", i), Var("v", i)))
                     for i, r in enumerate(q.cZ.rows))
    ineq_rows = tuple(_subst_uv(r, s) for r in q.cI.rows)
    n_x = q.n
    pairs = tuple((n_x + i, n_x + s + i) for i in range(s))
    return MpccProblem(
        name=f"{p.name}_mpcc_{flavor.lower()}",
        layout=layout,
        f=SmoothFunction(q.f.rows, layout, 0),
        eq=SmoothFunction(eq_rows, layout, 0),
        ineq=SmoothFunction(ineq_rows, layout, 0),
        pairs=pairs,
        flavor=flavor,
        base=p,
    )


@dataclass(frozen=True, eq=False)
class MpccPoint:
    """A point ``y`` with its complementarity index sets (0-based pair indices).

    ``D = U0 & V0``; ties with both ``u_i, v_i <= eps_act`` always go to ``D``.
    Cached derivatives are taken with respect to the full vector ``y``.
    """

    y: np.ndarray
    U_plus: Tuple[int, ...]
    U_zero: Tuple[int, ...]
    V_plus: Tuple[int, ...]
    V_zero: Tuple[int, ...]
    D: Tuple[int, ...]
    active_ineq: Tuple[int, ...]
    eq_val: np.ndarray
    ineq_val: np.ndarray
    grad_f: np.ndarray = field(repr=False)
    J_eq: np.ndarray = field(repr=False)
    J_ineq: np.ndarray = field(repr=False)
    tol: Tolerances = field(default=DEFAULT, repr=False)

    def is_feasible(self) -> bool:
        eps = self.tol.eps_act
        return bool(np.all(np.abs(self.eq_val) <= eps) and np.all(self.ineq_val >= -eps))

    def index_sets(self):
        return {"Uplus": list(self.U_plus), "Uzero": list(self.U_zero),
                "Vplus": list(self.V_plus), "Vzero": list(self.V_zero), "D": list(self.D)}


def mpcc_point(mp: MpccProblem, y, tol: Tolerances = DEFAULT) -> MpccPoint:
    """Classify ``y``; raises :class:`ComplementarityError` on sign/product violations."""
    y = np.asarray(y, dtype=float).ravel()
    if y.size != mp.n:
        raise ValueError(f"point has {y.size} entries, problem has {mp.n}")
    eps = tol.eps_act
    idx_u = [a for a, _ in mp.pairs]
    idx_v = [b for _, b in mp.pairs]
    u, v = y[idx_u], y[idx_v]
    if np.any(u < -eps) or np.any(v < -eps):
        raise ComplementarityError("negative complementarity variable",
                                   {"minU": float(u.min()), "minV": float(v.min())})
    if np.any(u * v > eps ** 2):
        raise ComplementarityError("complementarity violated: u_i * v_i > eps_act^2",
                                   {"maxProduct": float((u * v).max())})
    U0 = tuple(i for i in range(len(u)) if u[i] <= eps)
    V0 = tuple(i for i in range(len(v)) if v[i] <= eps)
    Up = tuple(i for i in range(len(u)) if u[i] > eps)
    Vp = tuple(i for i in range(len(v)) if v[i] > eps)
    D = tuple(sorted(set(U0) & set(V0)))
    ev, Je, _ = mp.eq.jets(y, order=1)
    iv, Ji, _ = mp.ineq.jets(y, order=1)
    _, gf, _ = mp.f.jets(y, order=1)
    active = tuple(int(i) for i in np.flatnonzero(np.abs(iv) <= eps))
    return MpccPoint(y, Up, U0, Vp, V0, D, active, ev, iv, gf[0], Je, Ji, tol)


def phi(mp: MpccProblem, pt: MpccPoint):
    """``(x, u, v) -> (x, u - v)``; returns ``(x, z)``."""
    y = pt.y
    x = y[list(mp.free_vars)]
    z = np.array([y[a] - y[b] for a, b in mp.pairs])
    return x, z


def phi_inv(mp: MpccProblem, st: SwitchingState) -> MpccPoint:
    """``(x, z) -> (x, [z]+, [z]-)`` for the abs-normal problem underlying ``mp``.

    For flavor ``"E"`` the state must belong to the slack reformulation
    (``x = (t, w)``); see :func:`slack_state`.
    """
    z = st.z
    y = np.zeros(mp.n)
    y[list(mp.free_vars)] = st.x
    for i, (a, b) in enumerate(mp.pairs):
        y[a] = max(z[i], 0.0)
        y[b] = max(-z[i], 0.0)
    return mpcc_point(mp, y, st.tol)


def enumerate_slack_choices(p: AbsNormalProblem, st: SwitchingState, rng=None,
                            tol: Optional[Tolerances] = None):
    """All ``w`` with ``|w| = cI(x, |z(x)|)``.

    Active inequalities force ``w_i = 0``; the inactive ones contribute a
    sign choice each.  Beyond ``2**20`` choices, 64 random sign patterns are
    drawn from ``rng`` (required in that case).
    """
    tol = tol or st.tol
    c = st.cI
    if np.any(c < -tol.eps_act):
        raise InfeasiblePointError("inequality violated, no slack exists",
                                   {"ineq": float(-c.min())})
    free = [i for i in range(c.size) if i not in st.active_ineq]
    base = np.where(np.isin(np.arange(c.size), free), c, 0.0)
    if len(free) > MAX_ENUMERATE:
        if rng is None:
            raise ValueError(f"{2 ** len(free)} slack choices exceed the enumeration guard; "
                             "pass rng to sample")
        signs = rng.choice([-1.0, 1.0], size=(N_SAMPLED_CHOICES, len(free)))
    else:
        combos = list(itertools.product([1.0, -1.0], repeat=len(free)))
        signs = np.array(combos, dtype=float).reshape(len(combos), len(free))
    out = []
    for sg in signs:
        w = base.copy()
        w[free] = sg * c[free]
        out.append(w)
    return out


def slack_state(p: AbsNormalProblem, st: SwitchingState, w, slack: Optional[AbsNormalProblem] = None):
    """State of the slack reformulation at ``(x, w)``."""
    slack = slack or build_slack_nlp(p)
    return evaluate_switching(slack, np.concatenate([st.x, np.asarray(w, dtype=float)]), st.tol)
