"""The first zero of L(s, chi_d) for d = -175990483, to many digits.

The coefficients are integers, so the Taylor power sums are exact and only
the kernel needs high precision.  Digits default to 40 (seconds); 110 takes
about a minute and agrees with the tabulated value to over 100 digits.
"""

import sys
import time

import gmpy2

from lconductor import generic_engine, kronecker_series, refine
from lconductor.reference import KRONECKER_D, KRONECKER_ZERO

D = int(sys.argv[1]) if len(sys.argv) > 1 else 40

t0 = time.perf_counter()
L = kronecker_series(KRONECKER_D, D)
E = generic_engine(L, D)
print(f"{len(L.coeffs)} coefficients, N={E.grid.N}, T={E.grid.T}, B={E.grid.B}, "
      f"precompute {time.perf_counter() - t0:.1f}s")

print("Z(0)    =", f"{E.z(0):.{D}g}")
print("Z(0.01) =", f"{E.z(0.01):.{D}g}")

t0 = time.perf_counter()
z = refine(E.z, 0, 0.01, tol=gmpy2.mpfr(10) ** -(D + 2), bits=E.evaluator.p.bits)
print(f"zero after {time.perf_counter() - t0:.1f}s:")
print(" ", f"{z:.{D}g}")
print(" ", KRONECKER_ZERO[: D + 5], "(tabulated)")
