"""Class groups of the discriminants just below -10^7.

Prints h(-q), the invariant factors and how many L-functions each group
contributes (one per conjugate pair of non-real characters).
"""

import time
import warnings

from lconductor import forms as bqf
from lconductor.reference import REFERENCE_GROUPS

warnings.simplefilter("ignore")  # a few of these discriminants are not fundamental

start = time.perf_counter()
total = 0
print(f"{'q':>9} {'h':>5}  {'structure':<18} usable")
for q in REFERENCE_GROUPS:
    G = bqf.class_group(q)
    usable = bqf.count_usable_characters(G)
    total += usable
    print(f"{q:>9} {G.h:>5}  {G.display_structure():<18} {usable}")
print(f"{total} L-functions in all, {time.perf_counter() - start:.1f}s")

# a small group by hand: disc -23 is cyclic of order 3
G = bqf.class_group(23)
f = G.generators[0]
print(f, "squared is", G.compose(f, f), "= inverse", f.inverse())
print("coordinates:", {str(g): G.coords[g] for g in G.forms})
