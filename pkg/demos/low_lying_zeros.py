"""Low-lying zeros for one discriminant and their statistics.

Scans every usable character of -q for sign changes of Z(t) on [0, 1],
refines each zero, and compares the 1-level density with the symplectic
model 1 - sin(2 pi x)/(2 pi x).  Pass another q on the command line to
change the discriminant.
"""

import sys
import time

from lconductor import lowest_zero_stats, one_level_density, theta_run
from lconductor.zeros import scan_characters, write_density_csv, write_zeros_csv

q = int(sys.argv[1]) if len(sys.argv) > 1 else 10000003
D = 6

run = theta_run(q, D)
t0 = time.perf_counter()
zeros = scan_characters(run.evaluator, run.chars, q, D)
print(f"q={q}: {len(run.chars)} L-functions, {len(zeros)} zeros below t=1 ({time.perf_counter() - t0:.0f}s)")

mean, _ = lowest_zero_stats(zeros)
print(f"mean normalized lowest zero: {mean:.3f}")

dens = one_level_density(zeros, len(run.chars))
width = 40
for lo, w, m in zip(dens.bin_lo, dens.weights, dens.model):
    bar = "#" * int(round(w * width / 2))
    print(f"{lo:4.2f} {w:5.2f} {m:5.2f} {bar}")

write_zeros_csv(zeros, f"zeros_{q}.csv", D)
write_density_csv(dens, f"density_{q}.csv")
print(f"wrote zeros_{q}.csv and density_{q}.csv")
