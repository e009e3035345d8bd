"""
The equivalence suite
=====================

Every qualification and stationarity verdict is computed on both sides of
each correspondence, at seeded random instances, and the pairs are
compared.
"""

import time

from kinkcheck import run_suite

t0 = time.perf_counter()
data = run_suite(seed=42, samples=7, n_random=50)
print(f"{len(data['points'])} instances, {sum(data['points'])} points, "
      f"{time.perf_counter() - t0:.1f}s\n")

print(f"{'check':28s} {'kind':12s} {'checked':>8s} {'agree':>6s}")
for name, row in data["summary"].items():
    extra = f"  converse fails {row['converseFailures']}" if "converseFailures" in row else ""
    print(f"{name:28s} {row['kind']:12s} {row['checked']:8d} {row['agree']:6d}{extra}")

print("\nviolations:", len(data["violations"]))
