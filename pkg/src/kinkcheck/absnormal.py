"""Abs-normal NLPs: switching evaluation and kink Jacobians."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Tuple

import numpy as np
from scipy.linalg import solve_triangular

from .errors import InfeasiblePointError
from .expr import Layout, SmoothFunction, abs_refs
from .policy import DEFAULT, Tolerances

__all__ = [
    "AbsNormalProblem", "SwitchingState", "JacobianBundle",
    "evaluate_switching", "assemble_jacobians", "lagrangian_hessian_abs",
    "require_feasible",
]


@dataclass(frozen=True)
class AbsNormalProblem:
    """``min f(x)  s.t.  cE(x,|z|) = 0, cI(x,|z|) >= 0, cZ(x,|z|) = z``.

    ``d2 cZ`` must be strictly lower triangular: row ``i`` of ``cZ`` may only
    read ``|z_j|`` for ``j < i``.  A problem whose layout contains a ``w``
    group is the slack reformulation of another problem.
    """

    name: str
    layout: Layout
    f: SmoothFunction
    cE: SmoothFunction
    cI: SmoothFunction
    cZ: SmoothFunction

    def __post_init__(self):
        s = self.cZ.dim
        for fn, label in ((self.cE, "cE"), (self.cI, "cI"), (self.cZ, "cZ")):
            if fn.layout != self.layout or fn.n_abs != s:
                raise ValueError(f"{label} does not match the problem layout")
        if self.f.dim != 1 or self.f.n_abs != 0 or self.f.layout != self.layout:
            raise ValueError("objective must be scalar and independent of |z|")
        for i, row in enumerate(self.cZ.rows):
            bad = [j for j in abs_refs(row) if j >= i]
            if bad:
                raise ValueError(
                    f"switching row {i + 1} references |z{bad[0] + 1}| (not strictly lower)")

    @property
    def n(self) -> int:
        return self.cZ.n

    @property
    def s(self) -> int:
        return self.cZ.dim

    @property
    def m1(self) -> int:
        return self.cE.dim

    @property
    def m2(self) -> int:
        return self.cI.dim

    @property
    def is_slack_form(self) -> bool:
        return any(g == "w" for g, _ in self.layout)

    @property
    def dims(self):
        return {"n": self.n, "s": self.s, "m1": self.m1, "m2": self.m2}


@dataclass(frozen=True, eq=False)
class SwitchingState:
    """Everything known at a point ``x`` after forward substitution.

    ``alpha`` and ``active_ineq`` are sorted 0-based index tuples.  The
    partial Jacobians ``(d1, d2)`` of ``cE``, ``cI``, ``cZ`` at ``(x, |z|)``
    are cached for the downstream assembly.
    """

    x: np.ndarray
    z: np.ndarray
    sigma: np.ndarray
    alpha: Tuple[int, ...]
    active_ineq: Tuple[int, ...]
    dz_dx: np.ndarray
    cE: np.ndarray
    cI: np.ndarray
    fixed_point_residual: float
    tol: Tolerances
    d_cE: tuple = field(repr=False)
    d_cI: tuple = field(repr=False)
    d_cZ: tuple = field(repr=False)

    @property
    def abs_z(self):
        return np.abs(self.z)

    @property
    def inactive(self):
        return tuple(i for i in range(self.z.size) if self.sigma[i] != 0)

    @property
    def Sigma(self):
        return np.diag(self.sigma.astype(float))

    def margins(self):
        """Distances of the classification from its thresholds."""
        az = np.abs(self.z)
        act = list(self.alpha)
        inact = list(self.inactive)
        ina = [i for i in range(self.cI.size) if i not in self.active_ineq]
        return {
            "maxActiveSwitch": float(az[act].max()) if act else None,
            "minInactiveSwitch": float(az[inact].min()) if inact else None,
            "maxActiveIneq": float(np.abs(self.cI[list(self.active_ineq)]).max())
            if self.active_ineq else None,
            "minInactiveIneq": float(self.cI[ina].min()) if ina else None,
            "maxEqResidual": float(np.abs(self.cE).max()) if self.cE.size else 0.0,
            "fixedPointResidual": self.fixed_point_residual,
        }

    def is_feasible(self) -> bool:
        eps = self.tol.eps_act
        return bool(np.all(np.abs(self.cE) <= eps) and np.all(self.cI >= -eps))


def evaluate_switching(p: AbsNormalProblem, x, tol: Tolerances = DEFAULT) -> SwitchingState:
    """Compute ``z(x)`` by forward substitution and classify the point."""
    x = np.asarray(x, dtype=float).ravel()
    if x.size != p.n:
        raise ValueError(f"point has {x.size} entries, problem has n={p.n}")
    s = p.s
    z = np.zeros(s)
    m = np.zeros(s)
    for i in range(s):
        z[i] = p.cZ.eval_row(i, x, m)
        m[i] = abs(z[i])
    eps = tol.eps_act
    sigma = np.where(np.abs(z) <= eps, 0, np.sign(z)).astype(int)
    alpha = tuple(int(i) for i in np.flatnonzero(sigma == 0))

    vZ, jZ, _ = p.cZ.jets(x, m, order=1)
    vE, jE, _ = p.cE.jets(x, m, order=1)
    vI, jI, _ = p.cI.jets(x, m, order=1)
    n = p.n
    d_cZ = (jZ[:, :n], jZ[:, n:])
    d_cE = (jE[:, :n], jE[:, n:])
    d_cI = (jI[:, :n], jI[:, n:])
    active = tuple(int(i) for i in np.flatnonzero(np.abs(vI) <= eps))

    # unit lower triangular: I - d2cZ * Sigma, with d2cZ strictly lower
    L = np.eye(s) - d_cZ[1] * sigma[None, :]
    dz = solve_triangular(L, d_cZ[0], lower=True, unit_diagonal=True) if s else np.zeros((0, n))
    resid = float(np.abs(z - vZ).max()) if s else 0.0
    return SwitchingState(x, z, sigma, alpha, active, dz, vE, vI, resid, tol,
                          d_cE, d_cI, d_cZ)


def require_feasible(p: AbsNormalProblem, st: SwitchingState):
    """Raise :class:`InfeasiblePointError` unless ``st`` is feasible within ``eps_act``."""
    if not st.is_feasible():
        eqr = float(np.abs(st.cE).max()) if st.cE.size else 0.0
        ineq = float(-st.cI.min()) if st.cI.size else 0.0
        raise InfeasiblePointError(
            f"point infeasible for {p.name}: max|cE| = {eqr:.3g}, "
            f"max violation of cI >= 0 is {max(ineq, 0.0):.3g}",
            {"eq": eqr, "ineq": max(ineq, 0.0)})


@dataclass(frozen=True, eq=False)
class JacobianBundle:
    JE: np.ndarray
    JA: np.ndarray
    Jalpha: np.ndarray

    @property
    def Jabs(self):
        return np.vstack([self.JE, self.JA, self.Jalpha])

    @property
    def JEalpha(self):
        return np.vstack([self.JE, self.Jalpha])


def assemble_jacobians(p: AbsNormalProblem, st: SwitchingState) -> JacobianBundle:
    """Total derivatives ``d1 c + d2 c * Sigma * dz/dx`` of the active constraints."""
    sd = st.sigma[:, None] * st.dz_dx
    JE = st.d_cE[0] + st.d_cE[1] @ sd
    JI = st.d_cI[0] + st.d_cI[1] @ sd
    JA = JI[list(st.active_ineq)] if st.active_ineq else np.zeros((0, p.n))
    Jalpha = st.dz_dx[list(st.alpha)] if st.alpha else np.zeros((0, p.n))
    return JacobianBundle(JE.reshape(p.m1, p.n), JA, Jalpha)


def lagrangian_hessian_abs(p: AbsNormalProblem, st: SwitchingState, lam) -> np.ndarray:
    """Hessian of ``f + lamE.cE - lamI.cI + lamZ.cZ`` in ``(x, m)`` at ``(x, |z|)``."""
    lamE = np.asarray(lam.lamE, dtype=float)
    lamI = np.asarray(lam.lamI, dtype=float)
    lamZ = np.asarray(lam.lamZ, dtype=float)
    if (lamE.size, lamI.size, lamZ.size) != (p.m1, p.m2, p.s):
        raise ValueError(
            f"multiplier sizes {(lamE.size, lamI.size, lamZ.size)} do not match "
            f"{(p.m1, p.m2, p.s)}")
    m = st.abs_z
    size = p.n + p.s
    H = np.zeros((size, size))
    H[: p.n, : p.n] = p.f.weighted_hessian([1.0], st.x)
    H += p.cE.weighted_hessian(lamE, st.x, m)
    H -= p.cI.weighted_hessian(lamI, st.x, m)
    H += p.cZ.weighted_hessian(lamZ, st.x, m)
    return 0.5 * (H + H.T)
