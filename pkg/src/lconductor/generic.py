"""L-series given by explicit integer coefficients (no class-group FFT).

Grid centres are integer multiples of the scale ``lam``, so the power sums
``sum a(m) (m - m_j)^k`` are exact integers; ``Delta_j^k`` is dropped and
``lam^k`` goes into the kernel instead.

Two gamma shapes are supported:

``full``  Lambda(s) = (sqrt(N)/2 pi)^s Gamma(s) L(s) for weight 1, and the
          arithmetic normalization of weight k (centre k/2) in general;
          index m = n, lam = 2 pi/sqrt(cond).
``half``  Lambda(s) = (cond/pi)^((s+a)/2) Gamma((s+a)/2) L(s) for a Dirichlet
          character of parity a; index m = n^2, coefficient a(n) n^a,
          lam = pi/cond.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import mpmath
import numpy as np

from .engine import CharSums, Coefficients, Completion, Evaluator, TaylorGrid, precompute_sums
from .errors import InputError, ParseError
from .gfun import Precision


def kronecker(d: int, n: int) -> int:
    """Kronecker symbol (d/n)."""
    if n == 0:
        return 1 if abs(d) == 1 else 0
    result = 1
    if n < 0:
        n = -n
        if d < 0:
            result = -result
    v = (n & -n).bit_length() - 1
    n >>= v
    if v:
        if d % 2 == 0:
            return 0
        if v % 2 and d % 8 in (3, 5):
            result = -result
    a = d % n if n > 1 else 0
    if n == 1:
        return result
    # Jacobi symbol (a/n), n odd
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def kronecker_row(d: int, n_max: int) -> list[int]:
    return [kronecker(d, n) for n in range(1, n_max + 1)]


@dataclass
class GenericLSeries:
    name: str
    cond: int
    shape: str
    sign: int
    coeffs: list = field(repr=False)  # a(1), ..., a(N)
    weight: int = 1
    parity: int = 0

    @property
    def N(self) -> int:
        return len(self.coeffs)

    def completion(self) -> Completion:
        if self.shape == "half":
            return Completion("half", 1, self.cond * self.cond, 1, self.parity, self.sign)
        return Completion("full", 2, self.cond, self.weight, 0, self.sign)

    @property
    def lam(self) -> float:
        if self.shape == "half":
            return math.pi / self.cond
        return 2 * math.pi / math.sqrt(self.cond)

    def index_of(self, n: int) -> int:
        return n * n if self.shape == "half" else n

    def coefficients(self, n_max: int | None = None) -> Coefficients:
        n_max = self.N if n_max is None else n_max
        idx, vals = [], []
        for n in range(1, n_max + 1):
            a = int(self.coeffs[n - 1])
            if a:
                idx.append(self.index_of(n))
                vals.append(a * n**self.parity if self.shape == "half" else a)
        values = np.empty((1, len(vals)), dtype=object)
        values[0, :] = vals
        return Coefficients(np.array(idx, dtype=np.int64), values)


def required_index(lam: float, D: int) -> int:
    """Truncation point M in index units: lam M >= D ln 10 + 2 ln(2 pi/lam)."""
    return math.ceil((D * math.log(10) + 2 * math.log(2 * math.pi / lam)) / lam)


def required_terms(L: GenericLSeries, D: int) -> int:
    M = required_index(L.lam, D)
    return math.isqrt(M) + 1 if L.shape == "half" else M


def generic_B(L: GenericLSeries, coeffs: Coefficients, D: int) -> int:
    """Taylor terms from the maximal-error bound sum|c| (4/lam) |pref| 2^-B < 10^-(D+1)."""
    total = sum(abs(int(c)) for c in coeffs.values[0])
    sigma = L.weight / 2 if L.shape == "full" else (0.5 + L.parity) / 2
    tmax = 1.0 if L.shape == "full" else 0.5
    pref = L.lam**sigma / abs(complex(mpmath.gamma(mpmath.mpc(sigma, tmax))))
    bound = math.log2(max(total, 1)) + math.log2(4 / L.lam) + math.log2(max(pref, 1e-300)) + (D + 1) * math.log2(10)
    return max(8, math.ceil(bound))


def generic_grid(L: GenericLSeries, D: int, coeffs: Coefficients) -> TaylorGrid:
    M = required_index(L.lam, D)
    T = 1
    while 3**T + 2 < 4 * M:
        T += 1
    return TaylorGrid(L.lam, M, T, generic_B(L, coeffs, D), L.cond, D)


@dataclass
class GenericEngine:
    series: GenericLSeries
    grid: TaylorGrid
    coeffs: Coefficients
    sums: CharSums
    evaluator: Evaluator

    def z(self, t):
        return self.evaluator.z(t, 0)

    __call__ = z


def generic_engine(L: GenericLSeries, D: int, direct_mode: bool = True, p: Precision | None = None) -> GenericEngine:
    """Exact-integer precomputation for a coefficient sequence."""
    need = required_terms(L, D)
    if L.N < need:
        raise InputError(f"{L.name}: {L.N} coefficients supplied, {need} required for D={D}")
    coeffs = L.coefficients(need)
    grid = generic_grid(L, D, coeffs)
    p = p or Precision.for_conductor(D, L.cond)
    sums = precompute_sums(coeffs, grid, normalized=False, direct_mode=direct_mode, p=p, members="nonzero")
    return GenericEngine(L, grid, coeffs, sums, Evaluator(sums, L.completion(), p))


def kronecker_series(d: int, D: int) -> GenericLSeries:
    """L(s, chi_d) for a fundamental discriminant d, coefficients generated to the needed length."""
    if d % 4 not in (0, 1) or d in (0, 1):
        raise InputError(f"{d} is not a nontrivial discriminant")
    parity = 1 if d < 0 else 0
    L = GenericLSeries(f"kronecker{d}", abs(d), "half", 1, [], parity=parity)
    L.coeffs = kronecker_row(d, required_terms(L, D))
    return L


# ---------------------------------------------------------------- GLF1 files


def read_glf(path) -> GenericLSeries:
    """Parse ``GLF1 <name> <cond> <half|full> <sign> <N> [weight=k] [parity=a]`` + ``n a(n)`` lines."""
    lines = Path(path).read_text(encoding="ascii").split("\n")
    if not lines or not lines[0].strip():
        raise ParseError("empty coefficient file", 1)
    head = lines[0].split()
    if len(head) < 6 or head[0] != "GLF1":
        raise ParseError("header must be 'GLF1 <name> <cond> <half|full> <sign> <N>'", 1)
    try:
        name, cond, shape, sign, N = head[1], int(head[2]), head[3], int(head[4]), int(head[5])
    except ValueError as exc:
        raise ParseError(f"bad header field: {exc}", 1) from None
    if shape not in ("half", "full") or sign not in (1, -1) or cond < 1 or N < 0:
        raise ParseError("bad header values", 1)
    extra = {}
    for tok in head[6:]:
        key, _, val = tok.partition("=")
        if key not in ("weight", "parity") or not val.lstrip("-").isdigit():
            raise ParseError(f"unknown header option {tok!r}", 1)
        extra[key] = int(val)
    coeffs = [0] * N
    seen = 0
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ParseError(f"expected 'n a(n)', got {line!r}", lineno)
        try:
            n, a = int(parts[0]), int(parts[1])
        except ValueError:
            raise ParseError(f"non-integer entry {line!r}", lineno) from None
        if not 1 <= n <= N:
            raise ParseError(f"index {n} outside 1..{N}", lineno)
        coeffs[n - 1] = a
        seen += 1
    if seen == 0:
        raise ParseError("no coefficients", len(lines))
    return GenericLSeries(name, cond, shape, sign, coeffs, extra.get("weight", 1), extra.get("parity", 0))


def write_glf(L: GenericLSeries, path) -> Path:
    head = f"GLF1 {L.name} {L.cond} {L.shape} {L.sign} {L.N}"
    if L.shape == "full" and L.weight != 1:
        head += f" weight={L.weight}"
    if L.shape == "half" and L.parity:
        head += f" parity={L.parity}"
    body = [f"{n} {a}" for n, a in enumerate(L.coeffs, start=1)]
    path = Path(path)
    path.write_bytes(("\n".join([head] + body) + "\n").encode("ascii"))
    return path
