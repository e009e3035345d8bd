"""
Reduced Hessians on both sides
==============================

At a kink stationary point the Lagrangian Hessian is projected onto the
critical subspace.  The abs-normal and MPCC projections use different
bases but give the same matrix.
"""

from pathlib import Path

import numpy as np

from kinkcheck import evaluate_switching, parse_problem, solve_kink_multipliers
from kinkcheck.generator import random_instance
from kinkcheck.soc import basis_uabs, basis_umpcc, classify_second_order, reduced_hessians
from kinkcheck.reform import build_counterpart_mpcc, phi_inv

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"

for name, x in (("kink_qp.anf", [0.0, 0.0, 0.0]), ("cubic.anf", [0.0])):
    p = parse_problem((FIXTURES / name).read_text())
    st = evaluate_switching(p, x)
    sol = solve_kink_multipliers(p, st)
    Ra, Rm = reduced_hessians(p, st, sol.multipliers)
    flags = {"likq": True, **sol.verdict.qualifiers}
    rep = classify_second_order("abs", Ra, flags)
    print(f"{p.name}: reduced abs {Ra.tolist()} mpcc {Rm.tolist()} -> {rep.classification}")

# A generated instance, stationary by construction, with a nontrivial critical subspace.
rng = np.random.default_rng(4)
while True:
    inst = random_instance(rng, stationary=True, n_points=1)
    p, x = inst.problem, inst.points[0]
    st = evaluate_switching(p, x)
    if st.alpha and basis_uabs(p, st).shape[1] >= 2:
        break
mp = build_counterpart_mpcc(p, "I")
pt = phi_inv(mp, st)
print(f"\n{p.name}: n={p.n} s={p.s} alpha={st.alpha}")
print("Uabs shape", basis_uabs(p, st).shape, " Umpcc shape", basis_umpcc(mp, pt).shape)
Ra, Rm = reduced_hessians(p, st, inst.multipliers, mp, pt)
print("eigenvalues abs :", np.round(np.linalg.eigvalsh(Ra), 10))
print("eigenvalues mpcc:", np.round(np.linalg.eigvalsh(Rm), 10))
print("max difference  :", np.abs(Ra - Rm).max())
