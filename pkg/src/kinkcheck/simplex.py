"""Dense two-phase simplex with Bland's rule.

Only meant for the desk-sized feasibility problems that arise in the
qualification and stationarity checks; determinism matters more than speed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import SimplexError

__all__ = ["LPResult", "linprog"]

_PIVOT_TOL = 1e-11
_COST_TOL = 1e-9   # cost-row drift after many pivots reaches ~1e-10


@dataclass
class LPResult:
    """Outcome of :func:`linprog`.

    ``status`` is one of ``"optimal"``, ``"infeasible"``, ``"unbounded"``.
    For infeasible problems ``farkas`` holds ``(A, b, y)`` of the internal
    standard form ``A x = b, x >= 0`` with ``y @ A <= 0`` and ``y @ b > 0``.
    """

    status: str
    x: Optional[np.ndarray]
    fun: Optional[float]
    nit: int
    farkas: Optional[tuple] = field(default=None, repr=False)

    @property
    def success(self):
        return self.status == "optimal"


def _as2d(A, ncols):
    if A is None:
        return np.zeros((0, ncols))
    A = np.asarray(A, dtype=float)
    return A.reshape(-1, ncols) if A.size else np.zeros((0, ncols))


def _standard_form(c, A_ub, b_ub, A_eq, b_eq, bounds):
    n = c.size
    if bounds is None:
        bounds = [(0.0, None)] * n
    elif isinstance(bounds, tuple) and len(bounds) == 2 and not isinstance(bounds[0], tuple):
        bounds = [bounds] * n
    cols = []            # (variable index, sign) per standard column
    offset = np.zeros(n)
    extra_rows = []      # (std column, bound) rows x' <= bound
    for j, (lo, hi) in enumerate(bounds):
        lo = -np.inf if lo is None else float(lo)
        hi = np.inf if hi is None else float(hi)
        if lo > hi:
            raise ValueError(f"empty bounds for variable {j}")
        if np.isfinite(lo):
            offset[j] = lo
            cols.append((j, 1.0))
            if np.isfinite(hi):
                extra_rows.append((len(cols) - 1, hi - lo))
        elif np.isfinite(hi):
            offset[j] = hi
            cols.append((j, -1.0))
        else:
            cols.append((j, 1.0))
            cols.append((j, -1.0))
    T = np.zeros((n, len(cols)))
    for k, (j, sg) in enumerate(cols):
        T[j, k] = sg

    A_ub = _as2d(A_ub, n)
    A_eq = _as2d(A_eq, n)
    b_ub = np.zeros(0) if b_ub is None else np.asarray(b_ub, dtype=float).ravel()
    b_eq = np.zeros(0) if b_eq is None else np.asarray(b_eq, dtype=float).ravel()

    ub_rows = A_ub @ T
    ub_rhs = b_ub - A_ub @ offset
    for k, bound in extra_rows:
        row = np.zeros(len(cols))
        row[k] = 1.0
        ub_rows = np.vstack([ub_rows, row])
        ub_rhs = np.append(ub_rhs, bound)
    n_slack = ub_rows.shape[0]
    nstd = len(cols) + n_slack
    A = np.zeros((n_slack + A_eq.shape[0], nstd))
    A[:n_slack, : len(cols)] = ub_rows
    A[:n_slack, len(cols):] = np.eye(n_slack)
    A[n_slack:, : len(cols)] = A_eq @ T
    b = np.concatenate([ub_rhs, b_eq - A_eq @ offset])
    c_std = np.concatenate([T.T @ c, np.zeros(n_slack)])
    neg = b < 0
    A[neg] *= -1.0
    b[neg] *= -1.0
    return A, b, c_std, T, offset, len(cols)


class _Tableau:
    def __init__(self, A, b, max_iter):
        m, n = A.shape
        self.m, self.n = m, n
        self.tab = np.zeros((m + 1, n + m + 1))
        self.tab[:m, :n] = A
        self.tab[:m, n:n + m] = np.eye(m)
        self.tab[:m, -1] = b
        self.basis = list(range(n, n + m))
        self.nit = 0
        self.max_iter = max_iter

    def pivot(self, r, j):
        tab = self.tab
        tab[r] /= tab[r, j]
        for i in range(tab.shape[0]):
            if i != r and tab[i, j] != 0.0:
                tab[i] -= tab[i, j] * tab[r]
        self.basis[r] = j

    def run(self, allowed):
        """Bland's rule iterations on the cost row; returns status."""
        tab = self.tab
        while True:
            cost = tab[-1]
            entering = next((j for j in allowed if cost[j] < -_COST_TOL), None)
            if entering is None:
                return "optimal"
            if self.nit >= self.max_iter:
                raise SimplexError(
                    f"simplex iteration cap {self.max_iter} exceeded",
                    {"iterations": self.nit, "basis": list(self.basis)})
            col = tab[:-1, entering]
            best, best_ratio = None, np.inf
            for i in np.flatnonzero(col > _PIVOT_TOL):
                ratio = tab[i, -1] / col[i]
                if ratio < best_ratio - 1e-13 or (
                        abs(ratio - best_ratio) <= 1e-13 and self.basis[i] < self.basis[best]):
                    best, best_ratio = i, ratio
            if best is None:
                return "unbounded"
            self.pivot(best, entering)
            self.nit += 1


def linprog(c, A_ub=None, b_ub=None, A_eq=None, b_eq=None, bounds=None,
            max_iter=None) -> LPResult:
    """Minimize ``c @ x`` subject to ``A_ub x <= b_ub``, ``A_eq x = b_eq``.

    ``bounds`` follows the scipy convention: a list of ``(lo, hi)`` pairs with
    ``None`` for an infinite side; the default is ``x >= 0``.  The iteration
    cap defaults to ``10 * (rows + cols)`` of the standard form.
    """
    c = np.asarray(c, dtype=float).ravel()
    A, b, c_std, T, offset, _ = _standard_form(c, A_ub, b_ub, A_eq, b_eq, bounds)
    m, n = A.shape
    if max_iter is None:
        max_iter = 10 * (m + n) + 10
    tb = _Tableau(A, b, max_iter)
    tab = tb.tab

    # phase 1: minimize the sum of artificials
    tab[-1, :n] = -A.sum(axis=0)
    tab[-1, -1] = -b.sum()
    # the phase-1 objective is bounded below by 0; an "unbounded" exit can only
    # come from rounding in the cost row and is treated as termination
    tb.run(range(n))
    infeas = -tab[-1, -1]
    if infeas > 1e-9 * (1.0 + np.abs(b).max(initial=0.0)):
        y = 1.0 - tab[-1, n:n + m]
        return LPResult("infeasible", None, None, tb.nit, farkas=(A, b, y))

    # drive remaining artificials out of the basis; drop redundant rows
    keep = []
    for r in range(m):
        if tb.basis[r] >= n:
            cand = np.flatnonzero(np.abs(tab[r, :n]) > 1e-9)
            if cand.size:
                tb.pivot(r, int(cand[0]))
                keep.append(r)
        else:
            keep.append(r)
    tab = np.vstack([tab[keep], tab[-1:]])
    tb.tab = tab
    tb.basis = [tb.basis[r] for r in keep]
    tab[:, n:n + m] = 0.0

    # phase 2
    tab[-1, :] = 0.0
    tab[-1, :n] = c_std
    for r, j in enumerate(tb.basis):
        if c_std[j] != 0.0:
            tab[-1] -= c_std[j] * tab[r]
    status = tb.run(range(n))
    if status == "unbounded":
        return LPResult("unbounded", None, None, tb.nit)
    x_std = np.zeros(n)
    for r, j in enumerate(tb.basis):
        x_std[j] = tab[r, -1]
    x = offset + T @ x_std[: T.shape[1]]
    return LPResult("optimal", x, float(c @ x), tb.nit)
