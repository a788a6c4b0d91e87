"""The incomplete gamma kernel G(s, x) = x^-s Gamma(s, x) and its x-derivatives.

All arithmetic is MPFR/MPC through gmpy2.  Complex Gamma(s), which MPC does
not provide, comes from mpmath.  Derivatives follow from

    d/dx G(s, x) = -G(s + 1, x),    G(s + 1, x) = exp(-x)/x + (s/x) G(s, x).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import gmpy2
import mpmath
from gmpy2 import mpc, mpfr

from .errors import InputError

GUARD_BITS = 24
MAX_ITER = 100_000


@dataclass(frozen=True)
class Precision:
    """``D`` output digits and ``work_digits`` internal digits."""

    D: int
    work_digits: int

    @classmethod
    def for_conductor(cls, D: int, q) -> "Precision":
        return cls(D, D + math.ceil(math.log10(q)) + 10)

    @property
    def bits(self) -> int:
        return math.ceil(self.work_digits * math.log2(10))

    @property
    def context(self):
        return gmpy2.context(gmpy2.get_context(), precision=self.bits + GUARD_BITS)


def _mp_to_mpfr(v) -> mpfr:
    sign, man, exp, _ = v._mpf_
    if not man:
        return mpfr(0)
    r = gmpy2.mul_2exp(mpfr(int(man)), exp)
    return -r if sign else r


def as_mpfr(x) -> mpfr:
    """Convert any real scalar (int, float, Fraction, mpmath, gmpy2, str) to mpfr."""
    if isinstance(x, mpfr):
        return +x
    if hasattr(x, "dtype"):
        x = x.item()
    if isinstance(x, mpmath.mpf):
        return _mp_to_mpfr(x)
    if isinstance(x, Fraction):
        return mpfr(x.numerator) / x.denominator
    if isinstance(x, mpc):
        return +x.real
    return mpfr(x)


def as_mpc(z) -> mpc:
    if isinstance(z, mpc):
        return +z
    if isinstance(z, mpmath.mpc):
        return mpc(_mp_to_mpfr(z.real), _mp_to_mpfr(z.imag))
    if isinstance(z, complex):
        return mpc(mpfr(z.real), mpfr(z.imag))
    return mpc(as_mpfr(z), 0)


def _mpfr_to_mp(x):
    # mpmath.mpf(mpfr(0)) builds a malformed zero, so go through (man, exp)
    if not gmpy2.is_finite(x):
        return mpmath.mpf(float(x))
    man, exp = x.as_mantissa_exp()
    return mpmath.mpf(mpmath.libmp.from_man_exp(int(man), int(exp)))


def to_mpmath(z):
    """Exact conversion of a gmpy2 (or plain) number to mpmath."""
    if isinstance(z, mpc):
        return mpmath.mpc(_mpfr_to_mp(z.real), _mpfr_to_mp(z.imag))
    if isinstance(z, mpfr):
        return _mpfr_to_mp(z)
    return mpmath.mpmathify(z)


@lru_cache(maxsize=4096)
def _gamma_cached(re: mpfr, im: mpfr, bits: int):
    with mpmath.workprec(bits):
        g = mpmath.gamma(mpmath.mpc(_mpfr_to_mp(re), _mpfr_to_mp(im)))
    return mpc(_mp_to_mpfr(g.real), _mp_to_mpfr(g.imag))


def complex_gamma(s) -> mpc:
    """Gamma(s) at the current gmpy2 context precision."""
    s = as_mpc(s)
    return _gamma_cached(s.real, s.imag, gmpy2.get_context().precision)


def complex_loggamma(s) -> mpc:
    s = as_mpc(s)
    with mpmath.workprec(gmpy2.get_context().precision):
        g = mpmath.loggamma(to_mpmath(s))
    return mpc(_mp_to_mpfr(g.real), _mp_to_mpfr(g.imag))


def _upper_cf(s: mpc, x: mpfr, eps: mpfr) -> mpc:
    # modified Lentz on the Legendre continued fraction; returns exp(x) x^-s Gamma(s,x)
    tiny = mpfr("1e-1000000")
    eps2 = eps * eps
    b = x + 1 - s
    c = 1 / tiny
    d = 1 / b
    h = d
    for i in range(1, MAX_ITER):
        an = -i * (i - s)
        b += 2
        d = an * d + b
        if not d:
            d = tiny
        c = b + an / c
        if not c:
            c = tiny
        d = 1 / d
        delta = c * d
        h *= delta
        if gmpy2.norm(delta - 1) < eps2:
            return h
    raise ArithmeticError(f"continued fraction for G({s}, {x}) did not converge")


def _lower_series(s: mpc, x: mpfr, eps: mpfr) -> mpc:
    # sum_k x^k / (s (s+1) ... (s+k)); positive terms for real s
    eps2 = eps * eps
    term = 1 / s
    total = term
    for k in range(1, MAX_ITER):
        term = term * x / (s + k)
        total += term
        if gmpy2.norm(term) < eps2 * gmpy2.norm(total):
            return total
    raise ArithmeticError(f"series for G({s}, {x}) did not converge")


def _g_base(s: mpc, x: mpfr) -> mpc:
    eps = gmpy2.mul_2exp(mpfr(1), -gmpy2.get_context().precision)
    if x >= s.real + 1:
        return gmpy2.exp(-x) * _upper_cf(s, x, eps)
    lower = gmpy2.exp(-x) * _lower_series(s, x, eps)
    return complex_gamma(s) * gmpy2.exp(-s * gmpy2.log(x)) - lower


def g_base(s, x, p: Precision) -> mpc:
    """G(s, x) with relative error about ``10^-work_digits``."""
    with p.context:
        x = as_mpfr(x)
        if x <= 0:
            raise InputError(f"G(s, x) needs x > 0, got {x}")
        return _g_base(as_mpc(s), x)


@dataclass(frozen=True)
class GDerivs:
    """``values[k] = G(s + k, x)``; the k-th x-derivative is ``(-1)^k values[k]``."""

    s: object
    x: object
    values: list = field(repr=False)
    reseeds: int = 0

    def _ctx(self, k):
        # keep the stored precision whatever the caller's context is
        return gmpy2.context(gmpy2.get_context(), precision=self.values[k].precision[0])

    def derivative(self, k: int):
        if k % 2 == 0:
            return self.values[k]
        with self._ctx(k):
            return -self.values[k]

    def taylor(self, k: int):
        """``G^(k)(s, x) / k!``."""
        with self._ctx(k):
            return self.derivative(k) / math.factorial(k)


def g_derivs(s, x, B: int, p: Precision) -> GDerivs:
    """G(s + k, x) for k = 0..B by forward recursion from the base value.

    The relative error is tracked through the recursion; if it exceeds
    ``10^(8 - work_digits)`` the next value is recomputed from scratch.
    """
    limit = 10.0 ** (8 - p.work_digits)
    with p.context:
        x = as_mpfr(x)
        if x <= 0:
            raise InputError(f"G(s, x) needs x > 0, got {x}")
        s = as_mpc(s)
        ulp = 2.0 ** -(p.bits + GUARD_BITS)
        e_over_x = gmpy2.exp(-x) / x
        v = _g_base(s, x)
        values = [v]
        err = ulp
        reseeds = 0
        for k in range(B):
            grown = (s + k) / x * v
            nxt = e_over_x + grown
            an = abs(nxt)
            err = (float(abs(grown) / an) * err if an else math.inf) + ulp
            if err > limit:
                nxt = _g_base(s + k + 1, x)
                err = ulp
                reseeds += 1
            values.append(nxt)
            v = nxt
    return GDerivs(s, x, values, reseeds)


def deriv_bound(x: float, R: float, k: int) -> float:
    """Cauchy bound on |G^(k)(s, x)|/k! for 0 < Re(s) < 1 using a circle of radius R."""
    if not 0 < R < x:
        raise InputError(f"need 0 < R < x, got R={R}, x={x}")
    return math.exp(R - x - k * math.log(R)) / (x - R)


def value_bound(x: float) -> float:
    """|G(s, x)| <= exp(-x)/x for 0 < Re(s) < 1."""
    return math.exp(-x) / x
