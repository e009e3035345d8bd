"""
Kink qualifications at a degenerate point
=========================================

A three-variable program with one switching variable where the linear
independence kink qualification fails but the weaker interior-direction
qualification still holds.
"""

from pathlib import Path

import numpy as np

from kinkcheck import check_idkq, check_likq, evaluate_switching, parse_problem
from kinkcheck.absnormal import assemble_jacobians

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"

p = parse_problem((FIXTURES / "ex2_8.anf").read_text())
print(f"{p.name}: n={p.n} s={p.s} m1={p.m1} m2={p.m2}")

# At the origin the switch z1 = t1 - t2 vanishes and both inequalities are active.
st = evaluate_switching(p, np.zeros(3))
print("z =", st.z, " alpha =", st.alpha, " active inequalities =", st.active_ineq)

# The kink Jacobians: equalities, active inequalities, active switches.
jb = assemble_jacobians(p, st)
print("JE     =", jb.JE.tolist())
print("JA     =", jb.JA.tolist())
print("Jalpha =", jb.Jalpha.tolist())

# Four rows in R^3 cannot be independent.
likq = check_likq(p, st)
print("LIKQ holds:", likq.holds, " rank", likq.rank.rank, "of", likq.rank.shape[0], "rows")

# The interior-direction qualification only needs [JE; Jalpha] to have full
# rank plus a direction strictly into the active inequalities.
idkq = check_idkq(p, st)
d = idkq.witness.d
print("IDKQ holds:", idkq.holds, " witness d =", d, " JA d =", jb.JA @ d)
