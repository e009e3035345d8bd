"""
Slack form and counterpart MPCCs
================================

Inequalities can be moved into the switching system with slack variables,
and every abs-normal program has a counterpart with complementarity pairs
(u_i, v_i) standing for the positive and negative parts of z_i.
"""

from pathlib import Path

import numpy as np

from kinkcheck import (build_counterpart_mpcc, build_slack_nlp, dump_problem, evaluate_switching,
                       parse_problem, phi, phi_inv)
from kinkcheck.reform import enumerate_slack_choices, slack_state

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"
p = parse_problem((FIXTURES / "ex2_8.anf").read_text())

# Slack form: cI(t, |z|) - |w| = 0 with new switches z = w.
q = build_slack_nlp(p)
print(dump_problem(q))

# Counterpart with inequalities kept ...
mi = build_counterpart_mpcc(p, "I")
print(dump_problem(mi))

# ... and the counterpart of the slack form.
me = build_counterpart_mpcc(p, "E")
print(f"{me.name}: {me.n} variables, {me.eq.dim} equalities, {me.n_pairs} pairs\n")

# Points map back and forth: u = max(z, 0), v = max(-z, 0).
x = np.array([0.25, 0.0, 0.0])   # feasible: t1 + t2 = |t1 - t2|, second inequality active
st = evaluate_switching(p, x)
pt = phi_inv(mi, st)
print("x =", x, " z =", st.z, " y =", pt.y)
print("recovered x, z:", *phi(mi, pt))

# A feasible x lifts to the slack form through every admissible w.
for w in enumerate_slack_choices(p, st):
    stw = slack_state(p, st, w, q)
    print("w =", w, " feasible in slack form:", stw.is_feasible())
