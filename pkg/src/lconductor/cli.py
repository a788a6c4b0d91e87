"""Command-line front end: ``python -m lconductor <command> ...``.

Caches live in ``--cache-dir`` (``forms_<q>.tsv``, ``coeffs_<q>_<D>.bin``);
results and a JSON run manifest go to ``--out-dir``.  Nothing time-dependent
is written, so identical runs produce identical files.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import platform
import sys
import warnings
from concurrent.futures import ProcessPoolExecutor
from importlib import metadata
from pathlib import Path

import numpy as np

from . import forms as bqf
from .engine import Coefficients, Completion, Evaluator, build_grid, direct_eval, precompute_sums
from .errors import InputError, LFunctionError, NumericalConsistencyError
from .generic import generic_engine, kronecker_series, read_glf
from .gfun import Precision
from .reference import REFERENCE_GROUPS
from .theta import FFT_MAX_DIGITS, coefficient_rows, read_coeff_cache, select_characters, write_coeff_cache
from .zeros import (DEFAULT_RESCALE, class_number_correlation, lowest_zero_stats, one_level_density,
                    per_discriminant_means, read_zeros_csv, sample_points, scan_characters, scan_zeros,
                    write_density_csv, write_zeros_csv)

ORACLE_STRIDE = 100  # one evaluation in a hundred is re-done term by term


def _default_workers() -> int:
    try:
        return len(os.sched_getaffinity(0))
    except AttributeError:
        return os.cpu_count() or 1


def ensemble_discriminants():
    """The 29 reference discriminants with a tabulated usable count (21336 L-functions)."""
    return [q for q, (_, _, usable) in REFERENCE_GROUPS.items() if usable is not None]


def _say(*parts):
    print(*parts, flush=True)


# ---------------------------------------------------------------- caches


def load_group(q: int, cache_dir: Path) -> bqf.ClassGroup:
    path = cache_dir / f"forms_{q}.tsv"
    if path.exists():
        G = bqf.read_forms_cache(path)
        if G.q == q:
            return G
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        G = bqf.class_group(q)
    cache_dir.mkdir(parents=True, exist_ok=True)
    bqf.write_forms_cache(G, path)
    return G


def coeff_cache_path(cache_dir: Path, q: int, D: int, normalization: str) -> Path:
    suffix = "" if normalization == "ideal" else f"_{normalization}"
    return cache_dir / f"coeffs_{q}_{D}{suffix}.bin"


def load_coeffs(G, q, D, normalization, cache_dir: Path, paranoid=False):
    """Coefficient table for usable and genus characters; returns (table, rebuilt)."""
    grid = build_grid(q, D, paranoid)
    if D > FFT_MAX_DIGITS:
        return coefficient_rows(G, grid.N, normalization, "stored", digits=D), True
    path = coeff_cache_path(cache_dir, q, D, normalization)
    if path.exists():
        try:
            C = read_coeff_cache(path)
        except InputError:
            C = None
        if C is not None and C.q == q and C.N >= grid.N and C.normalization == normalization:
            return C, False
    C = coefficient_rows(G, grid.N, normalization, "stored", digits=D)
    cache_dir.mkdir(parents=True, exist_ok=True)
    write_coeff_cache(C, path, include_genus=True)
    return C, True


# ---------------------------------------------------------------- manifest


def _versions() -> dict:
    out = {"python": platform.python_version()}
    for pkg in ("lconductor", "numpy", "gmpy2", "mpmath"):
        try:
            out[pkg] = metadata.version(pkg)
        except metadata.PackageNotFoundError:
            out[pkg] = "unknown"
    return out


def write_manifest(args, argv, outputs, extra=None) -> Path:
    out_dir = Path(args.out_dir)
    tag = getattr(args, "tag", None) or args.command
    params = {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "from_manifest")}
    doc = {
        "argv": list(argv),
        "parameters": params,
        "versions": _versions(),
        "outputs": {Path(p).name: hashlib.sha256(Path(p).read_bytes()).hexdigest() for p in outputs},
    }
    if extra:
        doc["results"] = extra
    path = out_dir / f"manifest_{args.command}_{tag}.json"
    path.write_text(json.dumps(doc, indent=2, sort_keys=True, default=str) + "\n", encoding="ascii")
    return path


# ---------------------------------------------------------------- argument helpers


def parse_chars(spec: str, invariant_factors):
    """``usable``, ``genus``, ``all``, ``usable:K`` (first K) or ``a:b;c:d`` exponent vectors."""
    spec = spec.strip()
    base, _, count = spec.partition(":")
    if base in ("usable", "genus", "all"):
        chars = select_characters(invariant_factors, base)
        if count:
            if not count.isdigit():
                raise InputError(f"bad character count in {spec!r}")
            chars = chars[: int(count)]
        return [tuple(c) for c in chars]
    out = []
    for part in spec.split(";"):
        try:
            chi = tuple(int(a) for a in part.split(":"))
        except ValueError:
            raise InputError(f"bad character {part!r}") from None
        if len(chi) != len(invariant_factors):
            raise InputError(f"character {part!r} needs {len(invariant_factors)} components")
        out.append(tuple(a % m for a, m in zip(chi, invariant_factors)))
    return out


def _t_range(args):
    lo, hi = args.t_range
    if not (-1 <= lo < hi <= 1):
        raise InputError(f"t-range must satisfy -1 <= lo < hi <= 1, got {lo} {hi}")
    return lo, hi


def _check_digits(D):
    if D < 1:
        raise InputError("--digits must be at least 1")


# ---------------------------------------------------------------- commands


def cmd_classgroup(args, argv):
    G = load_group(args.q, Path(args.cache_dir))
    usable = bqf.count_usable_characters(G)
    _say(f"q={G.q} h={G.h} C(-q)={G.display_structure()} usable={usable}")
    if not bqf.is_fundamental(G.q):
        _say(f"note: -{G.q} is not fundamental; primitive forms only")
    return 0


def cmd_coeffs(args, argv):
    _check_digits(args.digits)
    q, D = args.q, args.digits
    cache = Path(args.cache_dir)
    G = load_group(q, cache)
    grid = build_grid(q, D, args.paranoid)
    C, rebuilt = load_coeffs(G, q, D, args.normalization, cache, args.paranoid)
    where = coeff_cache_path(cache, q, D, args.normalization) if D <= FFT_MAX_DIGITS else "not cached (MPFR rows)"
    _say(f"q={q} D={D} N={grid.N} T={grid.T} B={grid.B} rows={len(C.chars)} "
         f"{'built' if rebuilt else 'cached'}: {where}")
    return 0


def _scan_chunk(task):
    """Worker: precompute and scan one contiguous block of character rows."""
    rows, chars, offset, n_total, grid, q, D, t_lo, t_hi, oracle = task
    p = Precision.for_conductor(D, q)
    coeffs = Coefficients.from_dense(rows[:, : grid.N + 1])
    sums = precompute_sums(coeffs, grid, normalized=True, p=p)
    ev = Evaluator(sums, Completion.theta(q), p)
    recs = scan_characters(ev, chars, q, D, t_lo, t_hi)
    checked, worst = 0, 0.0
    if oracle:
        for s, t in enumerate(sample_points(q, t_lo, t_hi)):
            for i in range(len(chars)):
                if (s * n_total + offset + i) % ORACLE_STRIDE:
                    continue
                a = float(ev.z(t, i))
                b = float(direct_eval(t, coeffs, grid, p, row=i))
                worst = max(worst, abs(a - b))
                checked += 1
    return recs, checked, worst


def scan_discriminant(q, D, args, out_dir: Path):
    cache = Path(args.cache_dir)
    G = load_group(q, cache)
    C, _ = load_coeffs(G, q, D, args.normalization, cache, args.paranoid)
    chars = parse_chars(args.chars, G.invariant_factors)
    rows = np.stack([C.row(chi) for chi in chars]) if chars else np.zeros((0, C.N + 1))
    grid = build_grid(q, D, args.paranoid)
    t_lo, t_hi = _t_range(args)
    workers = max(1, min(args.workers or _default_workers(), len(chars) or 1))
    bounds = np.linspace(0, len(chars), workers + 1).astype(int)
    tasks = [(rows[a:b], chars[a:b], int(a), len(chars), grid, q, D, t_lo, t_hi, args.oracle)
             for a, b in zip(bounds[:-1], bounds[1:]) if b > a]
    if workers == 1:
        results = [_scan_chunk(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_scan_chunk, tasks))
    records = [r for recs, _, _ in results for r in recs]
    checked = sum(c for _, c, _ in results)
    worst = max((w for _, _, w in results), default=0.0)
    if args.oracle and worst > 10.0 ** -D:
        raise NumericalConsistencyError(f"oracle disagreement {worst:.3e} exceeds 1e-{D}")
    zpath = write_zeros_csv(records, out_dir / f"zeros_{q}.csv", D)
    hist = one_level_density(records, max(len(chars), 1), args.rescale)
    dpath = write_density_csv(hist, out_dir / f"density_{q}.csv")
    info = {"q": q, "h": G.h, "characters": len(chars), "zeros": len(records),
            "central": sum(r.central for r in records), "N": grid.N, "T": grid.T, "B": grid.B}
    if any(not r.central for r in records):
        info["mean_first_gamma_tilde"] = round(lowest_zero_stats(records)[0], 10)
    if args.oracle:
        info["oracle_checks"] = checked
        info["oracle_max_diff"] = float(f"{worst:.3e}")
    return records, [zpath, dpath], info


def scan_series(L, D, args, out_dir: Path):
    """Zeros of a coefficient-file or Kronecker L-series on the t-range."""
    E = generic_engine(L, D)
    verify_integer_sums(E)
    t_lo, t_hi = _t_range(args)
    bits = E.evaluator.p.bits
    records = scan_zeros(E.z, L.cond, D, (), t_lo, t_hi, bits=bits)
    path = write_zeros_csv(records, out_dir / f"zeros_{L.name}.csv", D)
    for r in records:
        _say(f"zero t={r.t:.{D}g}")
    info = {"name": L.name, "cond": L.cond, "zeros": len(records), "N": E.grid.N, "T": E.grid.T, "B": E.grid.B,
            "taylor_intervals": len(E.sums.taylor)}
    return records, [path], info


def verify_integer_sums(E):
    """Recompute the highest-power sum of the last expanded interval with plain integers."""
    if not E.sums.taylor:
        return
    j = E.sums.taylor[-1]
    B = E.grid.B
    m_j = E.grid.center_index(j)
    lo, hi = E.grid.interval_ranges[j - 1].start, E.grid.interval_ranges[j - 1].stop
    total = sum(int(c) * pow(int(m) - m_j, B) for m, c in zip(E.coeffs.index, E.coeffs.values[0]) if lo <= m < hi)
    if total != E.sums.S[0, j - 1, B]:
        raise NumericalConsistencyError(f"integer power sum mismatch in interval {j}")


def _series_from_target(target: str, D: int):
    if Path(target).is_file():
        return read_glf(target)
    raise InputError(f"{target!r} is neither a discriminant nor a coefficient file")


def cmd_zeros(args, argv):
    _check_digits(args.digits)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    targets = [str(q) for q in ensemble_discriminants()] if args.full_paper else args.targets
    if not targets:
        raise InputError("no discriminant or coefficient file given")
    if args.full_paper:
        _say(f"full ensemble: {len(targets)} discriminants; this runs for many hours")
    outputs, infos, all_records, n_chars = [], [], [], 0
    for target in targets:
        if target.lstrip("-").isdigit():
            q = abs(int(target))
            records, paths, info = scan_discriminant(q, args.digits, args, out_dir)
            n_chars += info["characters"]
            _say(f"q={q} characters={info['characters']} zeros={info['zeros']}"
                 + (f" mean_first={info['mean_first_gamma_tilde']:.4f}" if "mean_first_gamma_tilde" in info else ""))
        else:
            records, paths, info = scan_series(_series_from_target(target, args.digits), args.digits, args, out_dir)
        all_records.extend(records)
        outputs.extend(paths)
        infos.append(info)
    if args.full_paper:
        outputs.extend(_ensemble_stats(all_records, n_chars, args.rescale, out_dir, "full"))
    write_manifest(args, argv, outputs, infos)
    return 0


def cmd_generic(args, argv):
    _check_digits(args.digits)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    if (args.kronecker is None) == (args.file is None):
        raise InputError("give exactly one of a coefficient file or --kronecker d")
    L = kronecker_series(args.kronecker, args.digits) if args.kronecker is not None else read_glf(args.file)
    _, paths, info = scan_series(L, args.digits, args, out_dir)
    _say(f"{L.name}: cond={L.cond} N={info['N']} T={info['T']} B={info['B']} zeros={info['zeros']}")
    write_manifest(args, argv, paths, [info])
    return 0


def _ensemble_stats(records, n_chars, rescale, out_dir: Path, tag):
    if not records:
        raise InputError("no zeros to summarize")
    mean, first_hist = lowest_zero_stats(records)
    dens = one_level_density(records, max(n_chars, 1), rescale)
    paths = [write_density_csv(dens, out_dir / f"density_{tag}.csv"),
             write_density_csv(first_hist, out_dir / f"lowest_{tag}.csv")]
    _say(f"characters={n_chars} zeros={len(records)} mean_first_gamma_tilde={mean:.6f}")
    means = per_discriminant_means(records)
    if len(means) >= 3:
        qs = sorted(means)
        ratios = []
        for q in qs:
            h = REFERENCE_GROUPS[q][0] if q in REFERENCE_GROUPS else _class_number(q)
            ratios.append(h / math.sqrt(q))
        r = class_number_correlation([means[q] for q in qs], ratios)
        _say(f"correlation(mean first zero, h/sqrt(q)) over {len(qs)} discriminants = {r:.4f}")
    return paths


def _class_number(q):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return bqf.class_group(q).h


def cmd_stats(args, argv):
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    records = [r for path in args.csv for r in read_zeros_csv(path)]
    n_chars = args.n_chars or len({(r.q, r.char) for r in records})
    paths = _ensemble_stats(records, n_chars, args.rescale, out_dir, args.tag)
    write_manifest(args, argv, paths)
    return 0


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="lconductor", description="L-functions of large conductor near the real axis")
    ap.add_argument("--from-manifest", metavar="PATH", help="re-run the command recorded in a manifest")
    sub = ap.add_subparsers(dest="command")

    def common(p, digits=True):
        p.add_argument("--cache-dir", default=".", help="directory for forms and coefficient caches")
        p.add_argument("--out-dir", default=".", help="directory for results and the run manifest")
        if digits:
            p.add_argument("--digits", type=int, default=6, help="output digits D")

    p = sub.add_parser("classgroup", help="class group of discriminant -q")
    p.add_argument("q", type=lambda s: abs(int(s)))
    common(p, digits=False)
    p.set_defaults(func=cmd_classgroup)

    p = sub.add_parser("coeffs", help="build the coefficient cache for -q")
    p.add_argument("q", type=lambda s: abs(int(s)))
    common(p)
    p.add_argument("--normalization", choices=("ideal", "lattice"), default="ideal")
    p.add_argument("--paranoid", action="store_true", help="maximal-error Taylor length")
    p.set_defaults(func=cmd_coeffs)

    p = sub.add_parser("zeros", help="scan Z(t) for sign changes and refine the zeros")
    p.add_argument("targets", nargs="*", help="discriminants q (or -q) or GLF1 coefficient files")
    common(p)
    p.add_argument("--t-range", nargs=2, type=float, default=(0.0, 1.0), metavar=("LO", "HI"))
    p.add_argument("--chars", default="usable", help="usable | genus | all | usable:K | a:b;c:d")
    p.add_argument("--workers", type=int, default=0, help="worker processes (default: available CPUs)")
    p.add_argument("--normalization", choices=("ideal", "lattice"), default="ideal")
    p.add_argument("--rescale", type=float, default=DEFAULT_RESCALE)
    p.add_argument("--paranoid", action="store_true")
    p.add_argument("--oracle", action="store_true", help="re-check 1%% of evaluations term by term")
    p.add_argument("--full-paper", action="store_true", help="the 29-discriminant reference ensemble (many hours)")
    p.add_argument("--tag", default=None)
    p.set_defaults(func=cmd_zeros)

    p = sub.add_parser("generic", help="zeros of an L-series given by integer coefficients")
    p.add_argument("file", nargs="?", help="GLF1 coefficient file")
    p.add_argument("--kronecker", type=int, metavar="d", help="use L(s, chi_d) instead of a file")
    common(p)
    p.add_argument("--t-range", nargs=2, type=float, default=(0.0, 1.0), metavar=("LO", "HI"))
    p.add_argument("--tag", default=None)
    p.set_defaults(func=cmd_generic)

    p = sub.add_parser("stats", help="lowest-zero and 1-level density statistics from zeros CSV files")
    p.add_argument("csv", nargs="+")
    p.add_argument("--out-dir", default=".")
    p.add_argument("--rescale", type=float, default=DEFAULT_RESCALE)
    p.add_argument("--n-chars", type=int, default=0, help="characters scanned (default: distinct in input)")
    p.add_argument("--tag", default="stats")
    p.set_defaults(func=cmd_stats)
    return ap


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.from_manifest:
        argv = json.loads(Path(args.from_manifest).read_text(encoding="ascii"))["argv"]
        args = parser.parse_args(argv)
    if not args.command:
        parser.print_help()
        return 2
    try:
        return args.func(args, argv)
    except LFunctionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
