"""Taylor-grid evaluation of completed L-functions on the critical line.

A completed L-function is written as a sum over an integer index ``m``

    Lambda(s) = sum_m c(m) {G(s1, lam m) + eps G(s2, lam m)},

with ``lam = 2 pi / sqrt(q)`` and ``m = n`` for class-group theta series.
The index range is cut into intervals ``I_j`` around centres
``x_j = lam (3^(j-1) + 1)/2`` of radius ``Delta_j = lam 3^(j-1)/4``; on each
interval the kernel is Taylor expanded, so that after an s-independent
precomputation of power sums every evaluation costs ``T (B + 1)``
multiply-adds per character.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import gmpy2
import numpy as np
from gmpy2 import mpc, mpfr

from .errors import InputError, NumericalConsistencyError
from .gfun import Precision, as_mpfr, complex_gamma, complex_loggamma, g_base, g_derivs

# up to this many digits the final contraction runs in complex128
FAST_DIGITS = 8


# ---------------------------------------------------------------- parameters


def _log_q10D(q, D):
    return math.log(q) + D * math.log(10)


def choose_N(q: int, D: int) -> int:
    """Number of series terms: ceil(sqrt(q) ln(q 10^D) / 2 pi)."""
    return math.ceil(math.sqrt(q) * _log_q10D(q, D) / (2 * math.pi))


def _coverage_ok(T, N, q, D):
    # x_T + Delta_T = x1 (3^T + 2)/4 must reach both ln(q 10^D) and x1 N
    x1 = 2 * math.pi / math.sqrt(q)
    return 3**T + 2 >= 4 * N and x1 * (3**T + 2) / 4 >= _log_q10D(q, D)


def choose_T(q: int, D: int) -> int:
    """Number of Taylor intervals: ceil(ln(sqrt(q) ln(q 10^D))), raised until they cover N."""
    T = math.ceil(math.log(math.sqrt(q) * _log_q10D(q, D)))
    N = choose_N(q, D)
    while not _coverage_ok(T, N, q, D):
        T += 1
    return T


def choose_B(q: int, D: int, paranoid: bool = False) -> int:
    """Taylor terms: ceil(1.5 ln(q^(3/4) 10^D)) under the standard-error model.

    ``paranoid`` uses the maximal-error model, ceil(1.5 ln(q 10^D)).
    """
    if paranoid:
        return math.ceil(1.5 * _log_q10D(q, D))
    return math.ceil(1.5 * (0.75 * math.log(q) + D * math.log(10)))


def taylor_tail_eps(x1: float, B: int) -> float:
    """Tail of a Taylor patch with Delta/R = 1/2 and x - R = x1/2."""
    return 2 * math.exp(-x1 / 2) / x1 * 2.0 ** (1 - B)


# ---------------------------------------------------------------- grid


def interval_of(m: int) -> int:
    """1-based interval index j of the integer index m >= 1 (3^(j-1) < 4m - 2 < 3^j)."""
    v = 4 * m - 2
    j, p = 1, 3
    while p < v:
        p *= 3
        j += 1
    return j


def interval_range(j: int) -> tuple[int, int]:
    """Integers m with 3^(j-1) < 4m - 2 < 3^j."""
    return (3 ** (j - 1) + 2) // 4 + 1, (3**j + 2) // 4


@dataclass(frozen=True)
class TaylorGrid:
    """Interval layout in index units; ``lam`` maps index m to x = lam m."""

    lam: float
    N: int
    T: int
    B: int
    q: int | None = None
    D: int | None = None
    c_ratio: int = 2

    @property
    def x1(self) -> float:
        return self.lam

    @property
    def K(self) -> float:
        return self.lam / 2

    def center_index(self, j: int) -> int:
        """m_j = (3^(j-1) + 1)/2, so that x_j = lam m_j."""
        return (3 ** (j - 1) + 1) // 2

    @property
    def centers(self) -> list[float]:
        return [self.lam * (3 ** (j - 1) + 1) / 2 for j in range(1, self.T + 1)]

    @property
    def radii(self) -> list[float]:
        return [self.lam * 3 ** (j - 1) / 4 for j in range(1, self.T + 1)]

    @property
    def interval_ranges(self) -> list[range]:
        out = []
        for j in range(1, self.T + 1):
            lo, hi = interval_range(j)
            out.append(range(lo, min(hi, self.N) + 1))
        return out


def build_grid(q: int, D: int, paranoid: bool = False) -> TaylorGrid:
    return TaylorGrid(2 * math.pi / math.sqrt(q), choose_N(q, D), choose_T(q, D), choose_B(q, D, paranoid), q, D)


# ---------------------------------------------------------------- completions


@dataclass(frozen=True)
class Completion:
    """Gamma factor and kernel shape of a completed L-function.

    ``lam = lam_factor * pi / sqrt(lam_den_sq)``.  ``full`` shape of weight k:
    ``s1 = k/2 + it``, ``Lambda = lam^-s1 Gamma(s1) L``.  ``half`` shape of
    parity a: ``s1 = (1/2 + it + a)/2`` with ``lam = pi/|d|`` on m = n^2.
    In both cases ``s2 = conj(s1)`` on the critical line.
    """

    kind: str = "full"
    lam_factor: int = 2
    lam_den_sq: int = 1
    weight: int = 1
    parity: int = 0
    sign: int = 1

    @classmethod
    def theta(cls, q: int) -> "Completion":
        return cls("full", 2, q, 1, 0, 1)

    def lam(self) -> mpfr:
        return self.lam_factor * gmpy2.const_pi() / gmpy2.sqrt(mpfr(self.lam_den_sq))

    def s1(self, t) -> mpc:
        t = as_mpfr(t)
        if self.kind == "full":
            return mpc(mpfr(self.weight) / 2, t)
        return mpc((mpfr(1) / 2 + self.parity) / 2, t / 2)

    def prefactor(self, t) -> mpc:
        """exp(i theta) lam^s1 / Gamma(s1), with an extra -i for sign -1."""
        s1 = self.s1(t)
        lg = complex_loggamma(s1)
        ln_lam = gmpy2.log(self.lam())
        theta = -s1.imag * ln_lam + lg.imag
        pref = gmpy2.exp(mpc(0, theta)) * gmpy2.exp(s1 * ln_lam) / complex_gamma(s1)
        if self.sign == -1:
            pref *= mpc(0, -1)
        return pref

    def theta_phase(self, t) -> mpfr:
        s1 = self.s1(t)
        return -s1.imag * gmpy2.log(self.lam()) + complex_loggamma(s1).imag


def _pair(v: mpc, sign: int):
    # G(s1) + sign * G(conj s1) for real x, given v = G(s1)
    return mpc(2 * v.real, 0) if sign == 1 else mpc(0, 2 * v.imag)


def hardy_theta(t, q, p: Precision):
    """theta(t) = t ln(sqrt(q)/(2 pi)) + arg Gamma(1/2 + i t)."""
    with p.context:
        return Completion.theta(q).theta_phase(t)


# ---------------------------------------------------------------- coefficients


@dataclass(frozen=True)
class Coefficients:
    """Sparse coefficient sequences ``c_i(m)`` sharing one index set.

    ``index`` is a sorted int64 array of m values; ``values`` has shape
    ``(n_rows, len(index))`` and is float64, int64/object (exact integers)
    or object (mpfr).
    """

    index: np.ndarray
    values: np.ndarray

    @classmethod
    def from_dense(cls, rows) -> "Coefficients":
        rows = np.atleast_2d(np.asarray(rows))
        nz = np.nonzero(np.any(rows != 0, axis=0))[0]
        nz = nz[nz >= 1]
        return cls(nz.astype(np.int64), rows[:, nz])

    @property
    def n_rows(self) -> int:
        return self.values.shape[0]

    @property
    def integral(self) -> bool:
        if self.values.dtype.kind in "iu":
            return True
        return self.values.dtype == object and all(isinstance(v, int) for v in self.values.flat)

    def row(self, i) -> "Coefficients":
        return Coefficients(self.index, self.values[i:i + 1])


@dataclass
class CharSums:
    """Power sums ``S[i, j, k] = sum_{m in I_j} c_i(m) u^k`` plus direct-mode terms.

    ``normalized`` sums use ``u = (x_m - x_j)/Delta_j = 4 (m - m_j)/3^(j-1)``;
    otherwise ``u = m - m_j`` (exact integers for integer coefficients).
    Intervals listed in ``direct`` are not expanded; their terms are summed
    one by one at evaluation time.
    """

    grid: TaylorGrid
    normalized: bool
    S: np.ndarray  # (n_rows, T, B + 1)
    taylor: list  # 1-based j of expanded intervals
    direct_index: np.ndarray
    direct_values: np.ndarray  # (n_rows, len(direct_index))
    exact: bool = False

    @property
    def n_rows(self) -> int:
        return self.S.shape[0]

    def operations_per_eval(self) -> int:
        return len(self.taylor) * (self.grid.B + 1)


def _split(coeffs: Coefficients, grid: TaylorGrid, direct_mode: bool, members: str):
    idx = coeffs.index
    keep = idx <= grid.N
    idx = idx[keep]
    vals = coeffs.values[:, keep]
    js = np.array([interval_of(int(m)) for m in idx], dtype=np.int64) if idx.size else np.zeros(0, np.int64)
    taylor, direct_cols = [], []
    pos = {}
    for j in range(1, grid.T + 1):
        cols = np.nonzero(js == j)[0]
        lo, hi = interval_range(j)
        size = min(hi, grid.N) - lo + 1 if members == "slots" else cols.size
        if direct_mode and size < grid.B:
            direct_cols.extend(cols.tolist())
        elif cols.size:
            taylor.append(j)
            pos[j] = cols
    return idx, vals, taylor, pos, np.array(direct_cols, dtype=np.int64)


def precompute_sums(coeffs: Coefficients, grid: TaylorGrid, normalized: bool = True,
                    direct_mode: bool = True, p: Precision | None = None, members: str = "slots") -> CharSums:
    """Precompute ``S[i, j, k]`` for every coefficient row: O(N B) per row.

    Float rows give float64 sums.  Integer rows with ``normalized=False``
    give exact integer sums.  mpfr rows (or ``p`` given with float rows and
    more than ``FAST_DIGITS`` digits) give mpfr sums at ``p``'s precision.
    Direct mode applies to intervals with fewer than B members, counted as
    integer slots (``"slots"``) or nonzero coefficients (``"nonzero"``).
    """
    idx, vals, taylor, pos, dcols = _split(coeffs, grid, direct_mode, members)
    B, T = grid.B, grid.T
    n_rows = vals.shape[0]
    is_int = coeffs.integral and not normalized
    use_mp = not is_int and (vals.dtype == object or (p is not None and p.D > FAST_DIGITS))
    exact = is_int or use_mp
    S = np.zeros((n_rows, T, B + 1), dtype=object if exact else np.float64)
    if exact:
        S[...] = 0
    for j in taylor:
        cols = pos[j]
        m_j = grid.center_index(j)
        d = idx[cols] - m_j
        if is_int:
            v = [int(x) for x in d]
            for i in range(n_rows):
                pw = [int(c) for c in vals[i, cols]]
                for k in range(B + 1):
                    S[i, j - 1, k] = sum(pw)
                    if k < B:
                        pw = [a * b for a, b in zip(pw, v)]
        elif use_mp:
            with p.context:
                den = mpfr(3) ** (j - 1)
                u = [4 * int(x) / den for x in d]
                for i in range(n_rows):
                    pw = [as_mpfr(c) for c in vals[i, cols]]
                    for k in range(B + 1):
                        S[i, j - 1, k] = gmpy2.fsum(pw)
                        if k < B:
                            pw = [a * b for a, b in zip(pw, u)]
        else:
            u = 4.0 * d / 3.0 ** (j - 1) if normalized else d.astype(np.float64)
            U = np.vander(u, B + 1, increasing=True)
            S[:, j - 1, :] = np.asarray(vals[:, cols], dtype=np.float64) @ U
    dvals = vals[:, dcols] if dcols.size else np.zeros((n_rows, 0), dtype=vals.dtype)
    if use_mp:
        with p.context:
            dvals = np.array([[as_mpfr(c) for c in row] for row in dvals], dtype=object).reshape(n_rows, -1)
    return CharSums(grid, normalized, S, taylor, idx[dcols] if dcols.size else np.zeros(0, np.int64),
                    dvals, exact)


# ---------------------------------------------------------------- evaluation


@dataclass
class Kernel:
    """s-dependent half of the evaluation at one t."""

    t: object
    pref: mpc
    W: dict = field(repr=False)  # j -> list of mpc, W[j][k] = G_jk * sigma_j^k
    direct: dict = field(repr=False)  # m -> G(s1, lam m) + eps G(s2, lam m)

    def as_arrays(self, T, B, direct_index):
        Wa = np.zeros((T, B + 1), dtype=complex)
        for j, w in self.W.items():
            Wa[j - 1] = [complex(v) for v in w]
        g = np.array([complex(self.direct[int(m)]) for m in direct_index], dtype=complex)
        return complex(self.pref), Wa, g


def build_kernel(t, grid: TaylorGrid, completion: Completion, taylor, direct_index, normalized: bool,
                 p: Precision) -> Kernel:
    with p.context:
        lam = completion.lam()
        s1 = completion.s1(t)
        pref = completion.prefactor(t)
        W = {}
        for j in taylor:
            xj = lam * grid.center_index(j)
            sigma = lam * mpfr(3) ** (j - 1) / 4 if normalized else lam
            gd = g_derivs(s1, xj, grid.B, p)
            row = []
            fact = mpfr(1)
            spow = mpfr(1)
            for k, v in enumerate(gd.values):
                if k:
                    fact *= k
                    spow *= sigma
                val = _pair(v, completion.sign) * spow / fact
                row.append(-val if k % 2 else val)
            W[j] = row
        direct = {}
        for m in direct_index:
            m = int(m)
            direct[m] = _pair(g_base(s1, lam * m, p), completion.sign)
    return Kernel(t, pref, W, direct)


def _check_band(t):
    if abs(float(t)) > 1:
        raise InputError(f"|t| <= 1 required, got t={t}")


def _finish(val: mpc, D: int):
    re, im = val.real, val.imag
    if abs(im) > 10.0 ** -D * max(1, abs(re)):
        raise NumericalConsistencyError(f"Z has imaginary part {float(im):.3e} (real part {float(re):.6e})")
    return re


class Evaluator:
    """Hardy-function evaluator bound to precomputed sums.

    ``z(t, i)`` evaluates row ``i``; ``z_all(t)`` evaluates every row with one
    kernel.  Kernels are cached per t.
    """

    def __init__(self, sums: CharSums, completion: Completion, p: Precision, cache_size: int = 256):
        self.sums = sums
        self.grid = sums.grid
        self.completion = completion
        self.p = p
        self.fast = not sums.exact and p.D <= FAST_DIGITS
        self._cache = {}
        self._cache_size = cache_size
        self.kernel_builds = 0

    def kernel(self, t):
        key = t
        k = self._cache.get(key)
        if k is None:
            _check_band(t)
            kern = build_kernel(t, self.grid, self.completion, self.sums.taylor, self.sums.direct_index,
                                self.sums.normalized, self.p)
            self.kernel_builds += 1
            k = (kern, kern.as_arrays(self.grid.T, self.grid.B, self.sums.direct_index) if self.fast else None)
            if len(self._cache) >= self._cache_size:
                self._cache.pop(next(iter(self._cache)))
            self._cache[key] = k
        return k

    def z_all(self, t) -> np.ndarray:
        kern, arr = self.kernel(t)
        if self.fast:
            pref, Wa, g = arr
            tot = np.einsum("ijk,jk->i", self.sums.S, Wa) + self.sums.direct_values.astype(np.float64) @ g
            val = pref * tot
            bad = np.abs(val.imag) > 10.0 ** -self.p.D * np.maximum(1, np.abs(val.real))
            if bad.any():
                i = int(np.argmax(bad))
                raise NumericalConsistencyError(f"Z has imaginary part {val.imag[i]:.3e} for row {i}")
            return val.real
        return np.array([self._z_mp(kern, i) for i in range(self.sums.n_rows)], dtype=object)

    def z(self, t, i: int = 0):
        kern, arr = self.kernel(t)
        if self.fast:
            pref, Wa, g = arr
            tot = np.sum(self.sums.S[i] * Wa) + self.sums.direct_values[i].astype(np.float64) @ g
            val = pref * tot
            if abs(val.imag) > 10.0 ** -self.p.D * max(1, abs(val.real)):
                raise NumericalConsistencyError(f"Z has imaginary part {val.imag:.3e}")
            return float(val.real)
        return self._z_mp(kern, i)

    def _z_mp(self, kern: Kernel, i: int):
        S = self.sums.S[i]
        with self.p.context:
            re_terms, im_terms = [], []
            for j, w in kern.W.items():
                for k, wk in enumerate(w):
                    s = S[j - 1, k]
                    if s:
                        s = mpfr(s) if isinstance(s, int) else s
                        re_terms.append(wk.real * s)
                        im_terms.append(wk.imag * s)
            for m, c in zip(self.sums.direct_index, self.sums.direct_values[i]):
                if c:
                    g = kern.direct[int(m)]
                    c = as_mpfr(c)
                    re_terms.append(g.real * c)
                    im_terms.append(g.imag * c)
            tot = mpc(gmpy2.fsum(re_terms), gmpy2.fsum(im_terms))
            return _finish(kern.pref * tot, self.p.D)


def z_eval(t, row: int, sums: CharSums, grid: TaylorGrid, p: Precision, completion: Completion | None = None):
    """Z(t) for one precomputed row (theta completion of ``grid.q`` by default)."""
    completion = completion or Completion.theta(grid.q)
    return Evaluator(sums, completion, p).z(t, row)


def direct_eval(t, coeffs: Coefficients, grid: TaylorGrid, p: Precision, completion: Completion | None = None,
                row: int = 0):
    """Z(t) by summing every term with a fresh G evaluation (no Taylor patches)."""
    _check_band(t)
    completion = completion or Completion.theta(grid.q)
    with p.context:
        lam = completion.lam()
        s1 = completion.s1(t)
        re_terms, im_terms = [], []
        for m, c in zip(coeffs.index, coeffs.values[row]):
            if m > grid.N or not c:
                continue
            g = _pair(g_base(s1, lam * int(m), p), completion.sign)
            c = as_mpfr(c if not isinstance(c, (np.floating, np.integer)) else c.item())
            re_terms.append(g.real * c)
            im_terms.append(g.imag * c)
        tot = mpc(gmpy2.fsum(re_terms), gmpy2.fsum(im_terms))
        return _finish(completion.prefactor(t) * tot, p.D)


def theta_evaluator(C, grid: TaylorGrid, p: Precision | None = None, direct_mode: bool = True):
    """Evaluator over every row of a class-group ``CoeffTable``."""
    p = p or Precision.for_conductor(grid.D, grid.q)
    coeffs = Coefficients.from_dense(C.rows[:, : grid.N + 1])
    sums = precompute_sums(coeffs, grid, normalized=True, direct_mode=direct_mode, p=p)
    return Evaluator(sums, Completion.theta(grid.q), p), coeffs
