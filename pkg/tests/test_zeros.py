import math

import gmpy2
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lconductor.errors import ConvergenceError, InputError
from lconductor.zeros import (DENSITY_EDGES, ZeroRecord, class_number_correlation, lowest_zero_stats,
                              one_level_density, read_zeros_csv, refine, sample_points, scan_step, scan_zeros,
                              usp_density, write_density_csv, write_zeros_csv)


def test_refine_linear_and_cosine():
    assert abs(refine(lambda x: 3 * x - 1, 0, 1, tol=1e-14) - 1 / 3) < 1e-13
    assert abs(refine(math.cos, 1, 2, tol=1e-14) - math.pi / 2) < 1e-13
    assert abs(refine(lambda x: (x - 0.7) ** 3, 0, 1, tol=1e-12) - 0.7) < 1e-11


@settings(max_examples=100, deadline=None)
@given(st.floats(-5, 5), st.floats(0.01, 3), st.floats(0.01, 3))
def test_refine_stays_in_bracket(root, left, right):
    f = lambda x: math.tanh(x - root)
    x = refine(f, root - left, root + right, tol=1e-12)
    assert root - left <= x <= root + right
    assert abs(x - root) < 1e-10


def test_refine_in_mpfr():
    bits = 400
    x = refine(gmpy2.cos, 1, 2, tol=gmpy2.mpfr("1e-110"), bits=bits)
    with gmpy2.context(gmpy2.get_context(), precision=bits):
        assert abs(x - gmpy2.const_pi() / 2) < gmpy2.mpfr("1e-105")


def test_refine_errors():
    with pytest.raises(InputError):
        refine(lambda x: x * x + 1, -1, 1)
    with pytest.raises(ConvergenceError):
        refine(math.cos, 1, 2, tol=1e-15, max_iter=1)


def test_refine_returns_exact_endpoint_zero():
    assert refine(lambda x: x, 0.0, 1.0) == 0.0


def test_scan_step_and_samples():
    q = 10000003
    assert math.isclose(scan_step(q), 2 * math.pi / (20 * math.log(q)))
    ts = sample_points(q)
    assert ts[0] == 0 and ts[-1] == 1.0
    assert all(b - a <= scan_step(q) + 1e-15 for a, b in zip(ts, ts[1:]))


def test_scan_finds_sine_zeros():
    recs = scan_zeros(lambda t: math.sin(10 * t + 0.1), 10**7, 8)
    want = [(k * math.pi - 0.1) / 10 for k in range(1, 4)]
    assert [round(r.t, 8) for r in recs] == [round(w, 8) for w in want]
    for r in recs:
        assert abs(math.sin(10 * r.t + 0.1)) < 1e-6
        assert math.isclose(r.gamma_tilde / r.t, math.log(r.q) / (2 * math.pi), rel_tol=1e-15)


def test_central_zero_is_flagged():
    recs = scan_zeros(lambda t: math.sin(10 * t), 10**7, 6)
    assert recs[0].central and recs[0].t == 0
    assert not any(r.central for r in recs[1:])


def test_usp_density_values():
    assert usp_density(0) == pytest.approx(0)
    assert usp_density(0.5) == pytest.approx(1)
    assert usp_density(0.25) == pytest.approx(1 - 2 / math.pi)


def test_density_counting_identity():
    rng = np.random.default_rng(3)
    recs = [ZeroRecord(10**7, (i % 5,), float(t)) for i, t in enumerate(rng.uniform(0.01, 1, 200))]
    h = one_level_density(recs, 5, rescale=1.0)
    gt = np.array([r.gamma_tilde for r in recs])
    assert (h.weights * 0.05).sum() == pytest.approx((gt < 1.8).sum() / 5)
    assert len(h.weights) == 36 and h.edges[0] == 0 and h.edges[-1] == pytest.approx(1.8)
    with pytest.raises(InputError):
        one_level_density(recs, 0)


def test_lowest_zero_stats():
    recs = [ZeroRecord(100, (1,), 0.5), ZeroRecord(100, (1,), 0.2), ZeroRecord(100, (2,), 0.4),
            ZeroRecord(100, (3,), 0.0, central=True)]
    mean, hist = lowest_zero_stats(recs)
    assert mean == pytest.approx((0.2 + 0.4) / 2 * math.log(100) / (2 * math.pi))
    assert hist.weights.sum() * 0.05 == pytest.approx(1)
    with pytest.raises(InputError):
        lowest_zero_stats([])


def test_correlation():
    assert class_number_correlation([1, 2, 3, 4], [4, 3, 2, 1]) == pytest.approx(-1)
    with pytest.raises(InputError):
        class_number_correlation([1, 2], [2, 1])
    with pytest.raises(InputError):
        class_number_correlation([1, 1, 1], [1, 2, 3])


def test_csv_files(tmp_path):
    recs = [ZeroRecord(10000003, (3,), 0.28492131), ZeroRecord(10000088, (1, 5, 1), 0.9)]
    p = write_zeros_csv(recs, tmp_path / "z.csv", 6)
    lines = p.read_text().splitlines()
    assert lines[0] == "q,char_index,t,gamma_tilde"
    assert lines[1].startswith("10000003,3,0.284921,")
    assert lines[2].startswith("10000088,1:5:1,0.9,")
    back = read_zeros_csv(p)
    assert back[1].char == (1, 5, 1) and back[0].t == pytest.approx(0.284921)
    d = write_density_csv(one_level_density(recs, 2), tmp_path / "d.csv")
    rows = d.read_text().splitlines()
    assert rows[0] == "bin_lo,bin_hi,weight,model_value" and rows[1].startswith("0.00,0.05,")
    assert len(rows) == len(DENSITY_EDGES)
