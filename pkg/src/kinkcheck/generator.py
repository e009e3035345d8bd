"""Seeded random abs-normal instances with known feasible points.

Smooth parts are polynomials of degree at most 3 with coefficients in
[-2, 2].  Constant shifts place a chosen point ``t0`` on prescribed active
sets; more feasible points come from Newton's method on the constraints
that are kept active.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from .absnormal import AbsNormalProblem, evaluate_switching
from .expr import AbsRef, Const, Mul, Pow, SmoothFunction, Var, add_all
from .multipliers import MultiplierSet
from .policy import DEFAULT, Tolerances

__all__ = ["Instance", "random_instance", "feasible_points", "random_polynomial"]

MAX_N, MAX_S, MAX_M1, MAX_M2 = 6, 4, 2, 3
COEF = 2.0


@dataclass(frozen=True, eq=False)
class Instance:
    problem: AbsNormalProblem
    points: List[np.ndarray]
    multipliers: Optional[MultiplierSet] = None   # set in stationary mode, valid at points[0]
    seed: Optional[int] = None


def _monomial(rng, n, abs_idx, max_deg):
    """Random coefficient times a product of powers of ``t`` and ``|z|`` entries."""
    deg = int(rng.integers(1, max_deg + 1))
    pool = [("t", i) for i in range(n)] + [("m", j) for j in abs_idx]
    picks = [pool[int(k)] for k in rng.integers(0, len(pool), size=deg)]
    counts = {}
    for key in picks:
        counts[key] = counts.get(key, 0) + 1
    factors = []
    for (kind, i), k in sorted(counts.items()):
        leaf = Var("t", i) if kind == "t" else AbsRef(i)
        factors.append(leaf if k == 1 else Pow(leaf, k))
    c = float(np.round(rng.uniform(-COEF, COEF), 3)) or 1.0
    node = Const(c)
    for f in factors:
        node = Mul(node, f)
    return node


def random_polynomial(rng, n, abs_idx=(), max_deg=3, terms=None):
    """Sum of 2-5 random monomials over ``t_1..t_n`` and ``|z_j|``, ``j`` in ``abs_idx``."""
    k = int(rng.integers(2, 6)) if terms is None else terms
    return [_monomial(rng, n, list(abs_idx), max_deg) for _ in range(k)]


def _build(name, n, z_terms, e_terms, i_terms, f_terms):
    layout = (("t", n),)
    s = len(z_terms)

    def rows(groups):
        return tuple(add_all(g) for g in groups)

    return AbsNormalProblem(
        name=name,
        layout=layout,
        f=SmoothFunction(rows([f_terms]), layout, 0),
        cE=SmoothFunction(rows(e_terms), layout, s),
        cI=SmoothFunction(rows(i_terms), layout, s),
        cZ=SmoothFunction(rows(z_terms), layout, s),
    )


def _eval_terms(terms, t, m):
    fn = SmoothFunction((add_all(terms),), (("t", t.size),), m.size)
    return float(fn.eval(t, m)[0])


def random_instance(rng, stationary=False, degenerate=False, n_points=8,
                    tol: Tolerances = DEFAULT, name="random", max_tries=50) -> Instance:
    """Draw one instance; ``stationary=True`` makes ``points[0]`` kink stationary.

    In stationary mode the multipliers are chosen first (positive on active
    inequalities, strictly inside the normal-growth cone on active switches)
    and the linear part of the objective is fitted to them, so the point has
    strict complementarity and strict normal growth by construction.

    ``degenerate=True`` appends a copy of an active inequality plus a term
    with zero gradient at ``t0``, so the active Jacobian loses rank there
    while an interior direction usually survives.
    """
    if stationary and degenerate:
        raise ValueError("stationary and degenerate modes are exclusive")
    for _ in range(max_tries):
        inst = _try_instance(rng, stationary, degenerate, n_points, tol, name)
        if inst is not None:
            return inst
    raise RuntimeError("could not generate an instance")


def _try_instance(rng, stationary, degenerate, n_points, tol, name):
    n = int(rng.integers(2, MAX_N + 1))
    s = int(rng.integers(0, MAX_S + 1))
    m1 = int(rng.integers(0, MAX_M1 + 1))
    m2 = int(rng.integers(1, MAX_M2)) if degenerate else int(rng.integers(0, MAX_M2 + 1))
    t0 = np.round(rng.uniform(-1.0, 1.0, size=n), 3)
    alpha = set(int(i) for i in np.flatnonzero(rng.random(s) < 0.5))
    active = set(int(i) for i in np.flatnonzero(rng.random(m2) < 0.6))
    if degenerate:
        active.add(0)
    if stationary and m1 + len(active) + len(alpha) > n:
        return None

    m0 = np.zeros(s)
    z_terms = []
    for i in range(s):
        terms = random_polynomial(rng, n, range(i))
        target = 0.0 if i in alpha else float(rng.choice([-1, 1]) * rng.uniform(0.5, 2.0))
        shift = target - _eval_terms(terms, t0, m0)
        z_terms.append(terms + [Const(shift)])
        m0[i] = abs(target)
    e_terms = []
    for _ in range(m1):
        terms = random_polynomial(rng, n, range(s))
        e_terms.append(terms + [Const(-_eval_terms(terms, t0, m0))])
    i_terms = []
    for j in range(m2):
        terms = random_polynomial(rng, n, range(s))
        target = 0.0 if j in active else float(rng.uniform(0.5, 2.0))
        i_terms.append(terms + [Const(target - _eval_terms(terms, t0, m0))])
    if degenerate:
        k = int(rng.integers(0, n))
        bump = Mul(Const(float(np.round(rng.uniform(-COEF, COEF), 3)) or 1.0),
                   Pow(add_all([Var("t", k), Const(-float(t0[k]))]), 2))
        i_terms.append(list(i_terms[0]) + [bump])
        active.add(m2)
        m2 += 1
    f_terms = random_polynomial(rng, n, (), terms=int(rng.integers(2, 6)))

    lam = None
    if stationary:
        built = _fit_stationary(rng, n, s, m1, m2, t0, alpha, active,
                                z_terms, e_terms, i_terms, f_terms, tol)
        if built is None:
            return None
        f_terms, lam = built
    p = _build(name, n, z_terms, e_terms, i_terms, f_terms)
    st = evaluate_switching(p, t0, tol)
    if not st.is_feasible() or set(st.alpha) != alpha or set(st.active_ineq) != active:
        return None
    pts = [t0] + feasible_points(p, t0, rng, n_points - 1, tol)
    return Instance(p, pts, lam)


def _fit_stationary(rng, n, s, m1, m2, t0, alpha, active, z_terms, e_terms, i_terms,
                    f_terms, tol):
    p = _build("tmp", n, z_terms, e_terms, i_terms, f_terms)
    st = evaluate_switching(p, t0, tol)
    lamE = np.round(rng.uniform(-2.0, 2.0, size=m1), 3)
    lamI = np.array([float(np.round(rng.uniform(0.5, 2.0), 3)) if j in active else 0.0
                     for j in range(m2)])
    lamZ = np.zeros(s)
    E2, I2, Z2 = st.d_cE[1], st.d_cI[1], st.d_cZ[1]
    base = E2.T @ lamE - I2.T @ lamI
    sigma = st.sigma
    for i in reversed(range(s)):
        r = base[i] + Z2[:, i] @ lamZ
        if i not in alpha:
            lamZ[i] = sigma[i] * r
            continue
        if r <= 0.2:
            # raise r_i by a term k*|z_i|, which vanishes at t0 and leaves JE unchanged
            want = float(rng.uniform(0.5, 2.0)) - r
            hosts = [("E", j, lamE[j]) for j in range(m1) if abs(lamE[j]) > 0.1]
            hosts += [("I", j, -lamI[j]) for j in range(m2) if lamI[j] > 0.1]
            hosts += [("Z", k, lamZ[k]) for k in range(i + 1, s) if abs(lamZ[k]) > 0.1]
            if not hosts:
                return None
            kind, j, weight = hosts[int(rng.integers(0, len(hosts)))]
            k = want / weight
            term = Mul(Const(float(k)), AbsRef(i))
            {"E": e_terms, "I": i_terms, "Z": z_terms}[kind][j].append(term)
            r += want
        lamZ[i] = float(rng.uniform(-0.5, 0.5)) * r
    p = _build("tmp", n, z_terms, e_terms, i_terms, f_terms)
    st = evaluate_switching(p, t0, tol)
    lam = MultiplierSet(lamE, lamI, lamZ)
    _, gpoly, _ = p.f.jets(t0, order=1)
    g = -(gpoly[0] + st.d_cE[0].T @ lamE - st.d_cI[0].T @ lamI + st.d_cZ[0].T @ lamZ)
    f_terms = list(f_terms) + [Mul(Const(float(g[i])), Var("t", i)) for i in range(n)]
    return f_terms, lam


def _residual_system(p, st, keep_ineq, keep_switch):
    sd = st.sigma[:, None] * st.dz_dx
    JE = st.d_cE[0] + st.d_cE[1] @ sd
    JI = st.d_cI[0] + st.d_cI[1] @ sd
    F = np.concatenate([st.cE, st.cI[keep_ineq], st.z[keep_switch]])
    J = np.vstack([JE.reshape(p.m1, p.n), JI[keep_ineq].reshape(-1, p.n),
                   st.dz_dx[keep_switch].reshape(-1, p.n)])
    return F, J


def _clean(st, gap=1e-5, zero=1e-11):
    az = np.abs(st.z)
    if np.any((az > zero) & (az < gap)):
        return False
    c = st.cI
    if np.any(c < -zero) or np.any((np.abs(c) > zero) & (c < gap)):
        return False
    return bool(np.all(np.abs(st.cE) <= zero))


def feasible_points(p: AbsNormalProblem, x0, rng, count, tol: Tolerances = DEFAULT,
                    attempts=None, scale=(0.05, 0.3)):
    """Up to ``count`` further feasible points near ``x0`` with clean activity margins.

    Each attempt perturbs ``x0``, keeps a random subset of its active
    inequalities and switches active and runs min-norm Newton steps on the
    resulting square-or-underdetermined system.  Points whose switches or
    inequalities sit between ``1e-11`` and ``1e-5`` are discarded so the
    activity classification is unambiguous.
    """
    x0 = np.asarray(x0, dtype=float)
    st0 = evaluate_switching(p, x0, tol)
    out = []
    attempts = attempts or 4 * count
    for _ in range(attempts):
        if len(out) >= count:
            break
        keep_i = [j for j in st0.active_ineq if rng.random() < 0.7]
        keep_z = [i for i in st0.alpha if rng.random() < 0.7]
        x = x0 + rng.uniform(*scale) * rng.standard_normal(x0.size)
        ok = False
        for _ in range(40):
            st = evaluate_switching(p, x, tol)
            F, J = _residual_system(p, st, keep_i, keep_z)
            if F.size == 0 or np.abs(F).max() <= 1e-13:
                ok = True
                break
            step, *_ = np.linalg.lstsq(J, -F, rcond=None)
            if not np.all(np.isfinite(step)) or np.abs(step).max() > 10:
                break
            x = x + step
        if not ok:
            continue
        st = evaluate_switching(p, x, tol)
        if not _clean(st):
            continue
        if any(np.abs(x - y).max() < 1e-6 for y in [x0] + out):
            continue
        out.append(x)
    return out
