"""
Kink stationarity and S-stationarity
====================================

Multipliers are found by a small linear program.  When none exist the
solver explains why, and when they do they translate directly into
S-stationarity multipliers of the counterpart MPCC.
"""

import json
from pathlib import Path

import numpy as np

from kinkcheck import (build_counterpart_mpcc, check_s_stationarity, evaluate_switching,
                       map_multipliers, parse_problem, phi_inv, solve_kink_multipliers)

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def load(name):
    return parse_problem((FIXTURES / name).read_text())


# A kink minimizer: min |t1| + t2^2 with an epigraph variable t3.
p = load("kink_qp.anf")
st = evaluate_switching(p, np.zeros(3))
sol = solve_kink_multipliers(p, st)
print("kink_qp stationary:", sol.found, sol.multipliers.to_dict())
print("qualifiers:", sol.verdict.qualifiers)

mp = build_counterpart_mpcc(p, "I")
pt = phi_inv(mp, st)
s_lam = map_multipliers("kink-to-s", sol.multipliers, p, st)
print("mapped to the MPCC:", s_lam.to_dict())
print("S-stationary:", check_s_stationarity(mp, pt, s_lam).holds)
print("reverse map recovers the input:", map_multipliers("s-to-kink", s_lam) == sol.multipliers)

# The origin of the degenerate example is not stationary; the certificate
# names the forced quantities.
p = load("ex2_8.anf")
sol = solve_kink_multipliers(p, evaluate_switching(p, np.zeros(3)))
print("\nex2_8 stationary:", sol.found)
for line in sol.certificate["explanation"]:
    print("  ", line)
print(json.dumps(sol.certificate["farkas"], indent=None)[:120], "...")
