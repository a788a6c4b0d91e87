"""Representation numbers of reduced forms and character-twisted theta coefficients.

``rep_numbers`` counts lattice points ``Q(x, y) = n`` for every reduced form;
``char_coeffs`` turns those counts into ``r_phi(n)`` for class-group
characters, either by the group FFT (double precision) or by a direct
character sum in MPFR arithmetic when more digits are needed.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import gmpy2
import numpy as np

from . import forms as bqf
from .errors import NumericalConsistencyError, ParseError, ResourceError
from .groupfft import dft_nd

DEFAULT_MAX_BYTES = 1 << 30
# double-precision FFT coefficients support at most this many digits
FFT_MAX_DIGITS = 10


def _ceil_sqrt_ratio(num: int, den: int) -> int:
    """Smallest integer X >= 0 with X^2 * den >= num."""
    if num <= 0:
        return 0
    x = math.isqrt(num // den)
    while x * x * den < num:
        x += 1
    return x


def grid_bounds(q: int, N: int, f) -> tuple[int, int]:
    """Box ``|x| <= x_max, |y| <= y_max`` containing every point with Q(x, y) <= N."""
    a, b, c = f
    if N <= 0:
        return 0, 0
    return _ceil_sqrt_ratio(4 * N * c, q), _ceil_sqrt_ratio(4 * N * a, q)


@dataclass(frozen=True)
class RepTable:
    q: int
    N: int
    counts: np.ndarray  # (h, N + 1) int32, column 0 unused

    def __getitem__(self, key):
        return self.counts[key]


def _points_on_row(f, y: int, N: int):
    """Integer x with Q(x, y) <= N for one fixed y, as a numpy array of n values."""
    a, b, c = f
    q = 4 * a * c - b * b
    disc = 4 * a * N - q * y * y
    if disc < 0:
        return None
    r = math.isqrt(disc)
    lo = (-b * y - r) // (2 * a) - 1
    hi = (-b * y + r) // (2 * a) + 1
    xs = np.arange(lo, hi + 1, dtype=np.int64)
    n = a * xs * xs + b * xs * y + c * y * y
    return n[(n <= N) & (n > 0)]


def rep_numbers(G: bqf.ClassGroup, N: int, max_bytes: int = DEFAULT_MAX_BYTES) -> RepTable:
    """r_Q(n) for all reduced forms Q of G and 1 <= n <= N."""
    if N < 1:
        raise ValueError("N must be positive")
    need = G.h * (N + 1) * 4
    if need > max_bytes:
        raise ResourceError(f"representation table needs {need} bytes (h={G.h}, N={N}), budget {max_bytes}")
    counts = np.zeros((G.h, N + 1), dtype=np.int64)
    for i, f in enumerate(G.forms):
        xmax, ymax = grid_bounds(G.q, N, f)
        row = counts[i]
        for y in range(-ymax, ymax + 1):
            n = _points_on_row(f, y, N)
            if n is not None and n.size:
                row += np.bincount(n, minlength=N + 1)
    if counts.max(initial=0) > np.iinfo(np.int32).max:
        raise ResourceError("representation count overflows 32 bits")
    return RepTable(G.q, N, counts.astype(np.int32))


@dataclass(frozen=True)
class CoeffTable:
    """Rows ``r_phi(1..N)`` for a set of characters; column 0 is zero padding."""

    q: int
    N: int
    normalization: str
    invariant_factors: tuple
    chars: tuple
    rows: np.ndarray  # (len(chars), N + 1), float64 or object (mpfr)
    precision_bits: int = 53

    def index_of(self, chi) -> int:
        chi = tuple(chi)
        idx = self.__dict__.get("_pos")
        if idx is None:
            idx = {c: i for i, c in enumerate(self.chars)}
            object.__setattr__(self, "_pos", idx)
        if chi in idx:
            return idx[chi]
        conj = bqf.conjugate_character(chi, self.invariant_factors)
        if conj in idx:
            return idx[conj]
        raise KeyError(f"character {chi} not stored")

    def row(self, chi):
        return self.rows[self.index_of(chi)]

    @property
    def exact(self) -> bool:
        return self.rows.dtype == object


def select_characters(invariant_factors, which="usable"):
    if which == "usable":
        return bqf.usable_characters(invariant_factors)
    if which == "genus":
        return bqf.genus_characters(invariant_factors)
    if which == "stored":
        return bqf.usable_characters(invariant_factors) + bqf.genus_characters(invariant_factors)
    if which == "all":
        return bqf.all_characters(invariant_factors)
    return [tuple(int(a) % m for a, m in zip(chi, invariant_factors)) for chi in which]


def _grouped(G: bqf.ClassGroup, R: RepTable):
    """Counts laid out on the group: array of shape (m_1, ..., m_r, N + 1)."""
    shape = tuple(G.invariant_factors) + (R.N + 1,)
    arr = np.zeros(shape, dtype=np.float64)
    co = G.coords_array()
    arr[tuple(co.T)] = R.counts
    return arr


def dft_group(values, G: bqf.ClassGroup) -> dict:
    """Character sums of a function on reduced forms (dict form -> value)."""
    shape = tuple(G.invariant_factors)
    arr = np.zeros(shape, dtype=complex)
    for f, v in values.items():
        arr[G.coords[G.lookup(f)]] = v
    out = dft_nd(arr, range(len(shape)))
    return {chi: complex(out[chi]) for chi in bqf.all_characters(shape)}


def char_coeffs(G: bqf.ClassGroup, R: RepTable, normalization="ideal", chars="usable",
                digits: int = 6, method: str | None = None, chunk_elems: int = 1 << 22) -> CoeffTable:
    """``r_phi(n) = sum_Q phi(Q) r_Q(n)`` (halved for the ``ideal`` normalization).

    ``method`` is ``"fft"`` (double precision, all characters at once) or
    ``"exact"`` (MPFR character sums over the nonzero counts); by default the
    FFT is used up to ``FFT_MAX_DIGITS`` digits.
    """
    if R.q != G.q:
        raise ValueError("representation table and class group disagree on q")
    if normalization not in ("ideal", "lattice"):
        raise ValueError(f"unknown normalization {normalization!r}")
    if method is None:
        method = "fft" if digits <= FFT_MAX_DIGITS else "exact"
    chars = [tuple(c) for c in select_characters(G.invariant_factors, chars)]
    scale = 0.5 if normalization == "ideal" else 1.0
    tol = 10.0 ** -(digits + 2)
    if method == "fft":
        rows = _fft_rows(G, R, chars, tol, chunk_elems) * scale
        bits = 53
    elif method == "exact":
        bits = int(math.ceil((digits + math.ceil(math.log10(G.q)) + 10) * math.log2(10))) + 16
        rows = _exact_rows(G, R, chars, bits, tol, scale)
    else:
        raise ValueError(f"unknown method {method!r}")
    return CoeffTable(G.q, R.N, normalization, tuple(G.invariant_factors), tuple(chars), rows, bits)


def _fft_rows(G, R, chars, tol, chunk_elems):
    r = G.rank
    out = np.zeros((len(chars), R.N + 1))
    if not chars:
        return out
    sel = tuple(np.array(chars, dtype=np.int64).reshape(len(chars), r).T)
    co = tuple(G.coords_array().T)
    step = max(1, chunk_elems // max(G.h, 1))
    for lo in range(0, R.N + 1, step):
        hi = min(R.N + 1, lo + step)
        block = np.zeros(tuple(G.invariant_factors) + (hi - lo,))
        block[co] = R.counts[:, lo:hi]
        y = dft_nd(block, range(r))[sel]
        re, im = y.real, y.imag
        bad = np.abs(im) > tol * np.maximum(1.0, np.abs(re))
        if bad.any():
            k = np.argwhere(bad)[0]
            raise NumericalConsistencyError(
                f"imaginary residue {im[tuple(k)]:.3e} at character {chars[k[0]]}, n={lo + k[1]}")
        out[:, lo:hi] = re
    return out


def _exact_rows(G, R, chars, bits, tol, scale):
    m = G.invariant_factors
    coords = [G.coords[f] for f in G.forms]
    nz = [np.nonzero(R.counts[i])[0] for i in range(G.h)]
    out = np.empty((len(chars), R.N + 1), dtype=object)
    with gmpy2.context(gmpy2.get_context(), precision=bits):
        two_pi = 2 * gmpy2.const_pi()
        zero = gmpy2.mpfr(0)
        half = gmpy2.mpfr(scale)
        trig = {}
        for ci, chi in enumerate(chars):
            re = [zero] * (R.N + 1)
            im = [zero] * (R.N + 1)
            for i, e in enumerate(coords):
                ph = sum((Fraction(a * x % mi, mi) for a, x, mi in zip(chi, e, m)), Fraction(0)) % 1
                cs = trig.get(ph)
                if cs is None:
                    ang = two_pi * ph.numerator / ph.denominator
                    cs = trig[ph] = (gmpy2.cos(ang), gmpy2.sin(ang))
                row = R.counts[i]
                for n in nz[i].tolist():
                    k = int(row[n])
                    re[n] += k * cs[0]
                    im[n] += k * cs[1]
            for n in range(R.N + 1):
                if abs(im[n]) > tol * max(1, abs(re[n])):
                    raise NumericalConsistencyError(f"imaginary residue {float(im[n]):.3e} at {chi}, n={n}")
                out[ci, n] = re[n] * half
    return out


def coefficient_rows(G: bqf.ClassGroup, N: int, normalization="ideal", chars="usable", digits=6,
                     method=None, max_bytes=DEFAULT_MAX_BYTES) -> CoeffTable:
    """Convenience: representation numbers followed by the character transform."""
    R = rep_numbers(G, N, max_bytes=max_bytes)
    return char_coeffs(G, R, normalization, chars, digits=digits, method=method)


# ---------------------------------------------------------------- cache file

_MAGIC = b"LFC1"


def write_coeff_cache(C: CoeffTable, path, include_genus=None) -> Path:
    """Binary cache: header then float64 rows for usable (+ genus) characters.

    Header, little-endian: magic ``LFC1``, u64 q, u64 N, u64 h, u32 r,
    r x u32 invariant factors, u8 flags (bit 0: lattice normalization,
    bit 1: genus characters stored).  Rows follow in the deterministic
    order of ``select_characters`` for ``usable`` then ``genus``.
    """
    if C.exact:
        raise ValueError("only double-precision coefficient tables are cached")
    m = C.invariant_factors
    usable = bqf.usable_characters(m)
    genus = bqf.genus_characters(m)
    if include_genus is None:
        include_genus = all(g in C.chars for g in genus)
    order = usable + (genus if include_genus else [])
    h = math.prod(m) if m else 1
    flags = (1 if C.normalization == "lattice" else 0) | (2 if include_genus else 0)
    head = _MAGIC + struct.pack("<QQQI", C.q, C.N, h, len(m)) + struct.pack(f"<{len(m)}I", *m) + struct.pack("<B", flags)
    body = np.stack([np.asarray(C.row(chi)[1:], dtype="<f8") for chi in order]) if order else np.zeros((0, C.N), "<f8")
    path = Path(path)
    path.write_bytes(head + body.tobytes())
    return path


def read_coeff_cache(path) -> CoeffTable:
    data = Path(path).read_bytes()
    if data[:4] != _MAGIC:
        raise ParseError("not an LFC1 coefficient cache")
    q, N, h, r = struct.unpack_from("<QQQI", data, 4)
    off = 4 + struct.calcsize("<QQQI")
    m = struct.unpack_from(f"<{r}I", data, off)
    off += 4 * r
    (flags,) = struct.unpack_from("<B", data, off)
    off += 1
    order = bqf.usable_characters(m) + (bqf.genus_characters(m) if flags & 2 else [])
    body = np.frombuffer(data, dtype="<f8", offset=off)
    if body.size != len(order) * N:
        raise ParseError(f"cache body has {body.size} floats, expected {len(order) * N}")
    rows = np.zeros((len(order), N + 1))
    rows[:, 1:] = body.reshape(len(order), N)
    norm = "lattice" if flags & 1 else "ideal"
    return CoeffTable(q, N, norm, tuple(m), tuple(order), rows)
