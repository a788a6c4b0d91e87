"""Hardy Z-functions for the class group of -10000003.

Builds the theta-series coefficients r_chi(n), precomputes the Taylor-grid
sums once, then evaluates every character's Z(t) from a shared kernel.  A
few values are checked against the term-by-term sum.
"""

import time

import numpy as np

from lconductor import direct_eval, theta_run

q, D = 10000003, 6

t0 = time.perf_counter()
run = theta_run(q, D)
g = run.grid
print(f"h={run.group.h}  characters={len(run.chars)}  N={g.N} T={g.T} B={g.B}  setup {time.perf_counter() - t0:.1f}s")

ts = np.linspace(0, 1, 6)
t0 = time.perf_counter()
table = np.array([run.evaluator.z_all(t) for t in ts])
print(f"{len(ts)} x {len(run.chars)} values in {time.perf_counter() - t0:.2f}s")
for chi, row in list(zip(run.chars, table.T))[:5]:
    print(chi, " ".join(f"{v:+.6f}" for v in row))

# the slow way, for comparison
p = run.evaluator.p
for i, t in [(0, 0.3), (100, 0.77)]:
    t0 = time.perf_counter()
    slow = float(direct_eval(t, run.coeffs, g, p, row=i))
    print(f"chi={run.chars[i]} t={t}: taylor {run.z(t, i):+.9f}  direct {slow:+.9f}"
          f"  ({time.perf_counter() - t0:.2f}s direct)")

# Z is even in t
print("max |Z(t) - Z(-t)| at t=0.4:", np.max(np.abs(run.evaluator.z_all(0.4) - run.evaluator.z_all(-0.4))))
