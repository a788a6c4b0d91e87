"""Genus characters give products of two Dirichlet L-functions.

For -84 the class group is {2, 2}; each of its three non-trivial characters is
real and its L-function splits as L(s, chi_d1) L(s, chi_d2) with d1 d2 = -84.
Here the three Z values are compared against mpmath's Hurwitz zeta.
"""

import mpmath

from lconductor import forms as bqf
from lconductor import theta_run
from lconductor.generic import kronecker

q = 84
run = theta_run(q, 12, chars="genus")
mpmath.mp.dps = 30


def L(d, s):
    k = abs(d)
    return sum(kronecker(d, n) * mpmath.zeta(s, mpmath.mpf(n) / k) for n in range(1, k + 1)) / mpmath.mpf(k) ** s


def z_product(d1, d2, t):
    s = mpmath.mpc(0.5, t)
    theta = t * mpmath.log(mpmath.sqrt(q) / (2 * mpmath.pi)) + mpmath.im(mpmath.loggamma(s))
    return mpmath.re(mpmath.exp(1j * theta) * L(d1, s) * L(d2, s))


for f in run.group.forms:
    print(f, "values:", [round(bqf.character_value(run.group, chi, f).real) for chi in run.chars])

# matched by hand from the values on (2, 2, 11) and (3, 0, 7)
pairs = {(0, 1): (-7, 12), (1, 0): (-3, 28), (1, 1): (-4, 21)}
for i, chi in enumerate(run.chars):
    if chi not in pairs:
        continue
    for t in (0.1, 0.5, 0.9):
        print(chi, pairs[chi], t, f"{float(run.z(t, i)):+.14f}", mpmath.nstr(z_product(*pairs[chi], t), 15))
