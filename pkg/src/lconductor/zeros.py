"""Zero location on the critical line and low-lying zero statistics."""

from __future__ import annotations

import csv
import math
from collections import defaultdict
from dataclasses import dataclass
from pathlib import Path

import gmpy2
import numpy as np

from .errors import ConvergenceError, InputError

DEFAULT_RESCALE = 0.78 / 1.18
USP_MEAN_FIRST_ZERO = 0.78
PAPER_MEAN_FIRST_ZERO = 1.13
DENSITY_EDGES = np.round(np.arange(0, 1.80 + 1e-9, 0.05), 2)


def _sign(v) -> int:
    return (v > 0) - (v < 0)


def refine(f, lo, hi, tol=1e-8, max_iter=200, flo=None, fhi=None, bits=None):
    """Brent's method on a sign-changing bracket; the iterate never leaves it.

    Works on floats or, with ``bits`` set, in MPFR arithmetic at that precision.
    """
    ctx = gmpy2.context(gmpy2.get_context(), precision=bits) if bits else None
    if ctx is not None:
        with ctx:
            return _brent(f, gmpy2.mpfr(lo), gmpy2.mpfr(hi), gmpy2.mpfr(tol), max_iter, flo, fhi)
    return _brent(f, float(lo), float(hi), float(tol), max_iter, flo, fhi)


def _brent(f, a, b, tol, max_iter, fa, fb):
    fa = f(a) if fa is None else fa
    fb = f(b) if fb is None else fb
    if fa == 0:
        return a
    if fb == 0:
        return b
    if _sign(fa) == _sign(fb):
        raise InputError(f"no sign change on [{a}, {b}]")
    c, fc = a, fa
    d = e = b - a
    for _ in range(max_iter):
        if _sign(fb) == _sign(fc):
            c, fc = a, fa
            d = e = b - a
        if abs(fc) < abs(fb):
            a, b, c = b, c, b
            fa, fb, fc = fb, fc, fb
        tol1 = tol / 2
        xm = (c - b) / 2
        if abs(xm) <= tol1 or fb == 0:
            return b
        if abs(e) >= tol1 and abs(fa) > abs(fb):
            s = fb / fa
            if a == c:
                p = 2 * xm * s
                q = 1 - s
            else:
                q0 = fa / fc
                r = fb / fc
                p = s * (2 * xm * q0 * (q0 - r) - (b - a) * (r - 1))
                q = (q0 - 1) * (r - 1) * (s - 1)
            if p > 0:
                q = -q
            p = abs(p)
            if 2 * p < min(3 * xm * q - abs(tol1 * q), abs(e * q)):
                e, d = d, p / q
            else:
                d = xm
                e = d
        else:
            d = xm
            e = d
        a, fa = b, fb
        if abs(d) > tol1:
            b = b + d
        else:
            b = b + (tol1 if xm > 0 else -tol1)
        fb = f(b)
    raise ConvergenceError(f"Brent refinement did not converge in {max_iter} iterations")


@dataclass(frozen=True)
class ZeroRecord:
    q: int
    char: tuple
    t: object
    central: bool = False

    @property
    def gamma_tilde(self):
        return self.t * math.log(self.q) / (2 * math.pi) if isinstance(self.t, float) else self.t * gmpy2.log(self.q) / (2 * gmpy2.const_pi())


def scan_step(q: int) -> float:
    return 2 * math.pi / (20 * math.log(q))


def sample_points(q, t_lo=0.0, t_hi=1.0, step=None):
    step = scan_step(q) if step is None else step
    n = int(math.floor((t_hi - t_lo) / step + 1e-12))
    ts = [t_lo + i * step for i in range(n + 1)]
    if t_hi - ts[-1] > 1e-12:
        ts.append(t_hi)
    return ts


def default_tol(D: int) -> float:
    return 10.0 ** -(D + 2)


def scan_zeros(f, q, D, char=(), t_lo=0.0, t_hi=1.0, step=None, tol=None, bits=None):
    """Sign-change scan of ``f(t)`` on [t_lo, t_hi] followed by Brent refinement.

    A vanishing sample at t = 0 (``|f| < 10^(2-D)``) is recorded with
    ``central=True``; any other sample that is exactly zero is recorded as is.
    """
    tol = default_tol(D) if tol is None else tol
    ts = sample_points(q, t_lo, t_hi, step)
    vals = [f(t) for t in ts]
    return _zeros_from_samples(f, q, D, char, ts, vals, tol, bits)


def _zeros_from_samples(f, q, D, char, ts, vals, tol, bits):
    out = []
    for i, (t, v) in enumerate(zip(ts, vals)):
        if t == 0 and abs(v) < 10.0 ** (2 - D):
            out.append(ZeroRecord(q, tuple(char), 0.0, central=True))
        elif v == 0 and t != 0:
            out.append(ZeroRecord(q, tuple(char), t))
        if i and v != 0 and vals[i - 1] != 0 and _sign(v) != _sign(vals[i - 1]):
            z = refine(f, ts[i - 1], t, tol, flo=vals[i - 1], fhi=v, bits=bits)
            out.append(ZeroRecord(q, tuple(char), z if bits else float(z)))
    out.sort(key=lambda r: r.t)
    return out


def scan_characters(evaluator, chars, q, D, t_lo=0.0, t_hi=1.0, step=None, tol=None, progress=None):
    """Scan every row of an evaluator; one kernel per sample serves all rows."""
    tol = default_tol(D) if tol is None else tol
    ts = sample_points(q, t_lo, t_hi, step)
    table = np.array([evaluator.z_all(t) for t in ts], dtype=float)
    records = []
    for i, chi in enumerate(chars):
        def f(t, i=i):
            return float(evaluator.z(t, i))
        records.extend(_zeros_from_samples(f, q, D, chi, ts, table[:, i].tolist(), tol, None))
        if progress:
            progress(i)
    return records


# ---------------------------------------------------------------- statistics


@dataclass(frozen=True)
class DensityHistogram:
    edges: np.ndarray
    weights: np.ndarray
    model: np.ndarray

    @property
    def bin_lo(self):
        return self.edges[:-1]

    @property
    def bin_hi(self):
        return self.edges[1:]


def usp_density(x):
    """1-level density of USp(infinity): 1 - sin(2 pi x)/(2 pi x)."""
    x = np.asarray(x, dtype=float)
    return 1 - np.sinc(2 * x)


def _histogram(values, n_chars, edges):
    counts, _ = np.histogram(np.asarray(values, dtype=float), bins=edges)
    widths = np.diff(edges)
    weights = counts / widths / n_chars
    centers = (edges[:-1] + edges[1:]) / 2
    return DensityHistogram(edges, weights, usp_density(centers))


def first_zeros(records):
    """Lowest positive zero per (q, character)."""
    best = {}
    for r in records:
        if r.central or r.t <= 0:
            continue
        key = (r.q, r.char)
        if key not in best or r.t < best[key].t:
            best[key] = r
    return best


def lowest_zero_stats(records, edges=DENSITY_EDGES):
    """Mean normalized first zero and its histogram (density per character)."""
    firsts = first_zeros(records)
    if not firsts:
        raise InputError("no zeros to summarize")
    g = [float(r.gamma_tilde) for r in firsts.values()]
    return float(np.mean(g)), _histogram(g, len(g), edges)


def one_level_density(records, n_chars: int, rescale: float = DEFAULT_RESCALE, edges=DENSITY_EDGES):
    """Averaged counts of rescaled zeros per bin, divided by bin width and character count."""
    if n_chars < 1:
        raise InputError("need at least one character")
    vals = [rescale * float(r.gamma_tilde) for r in records if not r.central and r.t > 0]
    return _histogram(vals, n_chars, edges)


def per_discriminant_means(records):
    byq = defaultdict(list)
    for (q, _), r in first_zeros(records).items():
        byq[q].append(float(r.gamma_tilde))
    return {q: float(np.mean(v)) for q, v in byq.items()}


def class_number_correlation(means, ratios) -> float:
    """Pearson correlation of mean first zero against h(-q)/sqrt(q)."""
    x = np.asarray(means, dtype=float)
    y = np.asarray(ratios, dtype=float)
    if x.size != y.size:
        raise InputError("means and ratios differ in length")
    if x.size < 3:
        raise InputError("need at least 3 discriminants")
    if np.ptp(x) == 0 or np.ptp(y) == 0:
        raise InputError("zero variance; correlation undefined")
    return float(np.corrcoef(x, y)[0, 1])


# ---------------------------------------------------------------- output files


def format_char(chi) -> str:
    return ":".join(str(a) for a in chi)


def _fmt(v, digits):
    return f"{v:.{digits}g}"


def write_zeros_csv(records, path, D: int) -> Path:
    path = Path(path)
    with path.open("w", newline="", encoding="ascii") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["q", "char_index", "t", "gamma_tilde"])
        for r in records:
            w.writerow([r.q, format_char(r.char), _fmt(r.t, D), _fmt(r.gamma_tilde, D)])
    return path


def read_zeros_csv(path):
    out = []
    with Path(path).open(newline="", encoding="ascii") as fh:
        for row in csv.DictReader(fh):
            chi = tuple(int(a) for a in row["char_index"].split(":") if a != "")
            t = float(row["t"])
            out.append(ZeroRecord(int(row["q"]), chi, t, central=(t == 0)))
    return out


def write_density_csv(hist: DensityHistogram, path) -> Path:
    path = Path(path)
    with path.open("w", newline="", encoding="ascii") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["bin_lo", "bin_hi", "weight", "model_value"])
        for lo, hi, wt, mv in zip(hist.bin_lo, hist.bin_hi, hist.weights, hist.model):
            w.writerow([f"{lo:.2f}", f"{hi:.2f}", f"{wt:.10g}", f"{mv:.10g}"])
    return path
