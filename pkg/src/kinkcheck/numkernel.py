"""Dense numeric primitives under an explicit tolerance policy."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .policy import DEFAULT, Tolerances
from .simplex import linprog

__all__ = [
    "RankResult", "StrictDirectionResult", "Definiteness",
    "rank", "nullspace", "strict_direction", "definiteness",
    "fd_jacobian", "rel_error",
]


def _matrix(M, ncols=None):
    M = np.asarray(M, dtype=float)
    if M.ndim == 1:
        M = M.reshape(1, -1) if M.size or ncols is None else np.zeros((0, ncols))
    if not np.all(np.isfinite(M)):
        raise ValueError("matrix has non-finite entries")
    return M


@dataclass(frozen=True)
class RankResult:
    rank: int
    singular_values: np.ndarray
    tolerance: float
    shape: tuple

    @property
    def full_row_rank(self) -> bool:
        return self.rank == self.shape[0]

    def to_dict(self):
        return {"rank": self.rank, "rows": self.shape[0], "cols": self.shape[1],
                "fullRowRank": self.full_row_rank, "tolerance": self.tolerance,
                "singularValues": [float(v) for v in self.singular_values]}


def _threshold(sv, shape, tol):
    smax = sv[0] if sv.size else 0.0
    return tol.eps_rank * max(shape) * smax


def rank(M, tol: Tolerances = DEFAULT) -> RankResult:
    """Numerical rank: singular values above ``eps_rank * max(r, c) * sigma_max``."""
    M = _matrix(M)
    if M.size == 0:
        return RankResult(0, np.zeros(0), 0.0, M.shape)
    sv = np.linalg.svd(M, compute_uv=False)
    tau = _threshold(sv, M.shape, tol)
    return RankResult(int(np.sum(sv > tau)), sv, float(tau), M.shape)


def nullspace(M, tol: Tolerances = DEFAULT, ncols=None) -> np.ndarray:
    """Orthonormal basis of ``ker M`` as columns."""
    M = _matrix(M, ncols)
    rows, cols = M.shape
    if rows == 0 or cols == 0:
        return np.eye(cols)
    _, sv, vt = np.linalg.svd(M, full_matrices=True)
    tau = _threshold(sv, M.shape, tol)
    r = int(np.sum(sv > tau))
    return vt[r:].T.copy()


@dataclass(frozen=True)
class StrictDirectionResult:
    feasible: bool
    d: np.ndarray
    margin: float
    status: str = "optimal"

    def to_dict(self):
        return {"feasible": self.feasible, "d": [float(v) for v in self.d],
                "margin": self.margin}


def strict_direction(Aeq, Astrict, tol: Tolerances = DEFAULT, ncols=None) -> StrictDirectionResult:
    """Find ``d`` with ``Aeq d = 0`` and ``Astrict d > 0``.

    Solves ``max s`` s.t. ``Aeq d = 0``, ``Astrict d >= s``, ``-1 <= d <= 1``,
    ``s <= 1``; the direction exists iff the optimal margin exceeds
    ``eps_strict``.
    """
    Aeq = np.asarray(Aeq, dtype=float)
    Astrict = np.asarray(Astrict, dtype=float)
    if ncols is None:
        ncols = Aeq.shape[1] if Aeq.ndim == 2 else Astrict.shape[1]
    Aeq = _matrix(Aeq, ncols).reshape(-1, ncols)
    Astrict = _matrix(Astrict, ncols).reshape(-1, ncols)
    n = ncols
    c = np.zeros(n + 1)
    c[-1] = -1.0
    A_ub = np.hstack([-Astrict, np.ones((Astrict.shape[0], 1))])
    b_ub = np.zeros(Astrict.shape[0])
    A_eq = np.hstack([Aeq, np.zeros((Aeq.shape[0], 1))])
    b_eq = np.zeros(Aeq.shape[0])
    bounds = [(-1.0, 1.0)] * n + [(None, 1.0)]
    res = linprog(c, A_ub, b_ub, A_eq, b_eq, bounds)
    if not res.success:
        # d = 0, s = 0 is always feasible and s is capped
        raise RuntimeError(f"strict-direction LP returned {res.status}")
    d = res.x[:n]
    margin = float(res.x[-1])
    return StrictDirectionResult(margin > tol.eps_strict, d, margin)


class Definiteness(str, Enum):
    PD = "positive-definite"
    PSD = "positive-semidefinite"
    INDEFINITE = "indefinite"
    NSD = "negative-semidefinite"
    ND = "negative-definite"


def definiteness(M, tol: Tolerances = DEFAULT):
    """Return ``(Definiteness, eigenvalues)`` of the symmetric part of ``M``.

    An empty matrix is positive definite (vacuously).
    """
    M = _matrix(M)
    if M.size == 0:
        return Definiteness.PD, np.zeros(0)
    S = 0.5 * (M + M.T)
    ev = np.linalg.eigvalsh(S)
    eps = tol.eps_psd * (1.0 + np.abs(ev).max())
    lo, hi = ev[0], ev[-1]
    if lo > eps:
        return Definiteness.PD, ev
    if lo > -eps:
        return Definiteness.PSD, ev
    if hi < -eps:
        return Definiteness.ND, ev
    if hi < eps:
        return Definiteness.NSD, ev
    return Definiteness.INDEFINITE, ev


def fd_jacobian(fun, x, rel_step=1e-6) -> np.ndarray:
    """Central differences with step ``rel_step * (1 + |x_i|)`` per coordinate."""
    x = np.asarray(x, dtype=float).ravel()
    f0 = np.atleast_1d(np.asarray(fun(x), dtype=float))
    J = np.zeros((f0.size, x.size))
    for i in range(x.size):
        h = rel_step * (1.0 + abs(x[i]))
        xp, xm = x.copy(), x.copy()
        xp[i] += h
        xm[i] -= h
        J[:, i] = (np.atleast_1d(fun(xp)) - np.atleast_1d(fun(xm))) / (2.0 * h)
    return J


def rel_error(a, b) -> float:
    """``max|a - b| / max(1, max|b|)``."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.size == 0 and b.size == 0:
        return 0.0
    return float(np.abs(a - b).max() / max(1.0, np.abs(b).max()))
