import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lconductor.engine import (Coefficients, Completion, build_grid, choose_B, choose_N, choose_T, direct_eval,
                               hardy_theta, interval_of, interval_range, precompute_sums, taylor_tail_eps,
                               theta_evaluator)
from lconductor.errors import InputError
from lconductor.gfun import Precision, to_mpmath
from lconductor.pipeline import theta_run


def test_parameter_examples():
    q, D = 10000003, 6
    assert choose_N(q, D) == math.ceil(math.sqrt(q) * math.log(q * 10**D) / (2 * math.pi)) == 15066
    assert choose_B(q, D) == 39
    assert choose_B(q, D, paranoid=True) == math.ceil(1.5 * math.log(q * 1e6)) == 45
    assert 12 <= choose_T(q, D) <= 13


def test_first_interval_ranges():
    g = build_grid(10000003, 6)
    assert [list(r) for r in g.interval_ranges[:3]] == [[1], [2], [3, 4, 5, 6, 7]]


@pytest.mark.parametrize("q,D", [(23, 6), (10000003, 6), (10000003, 30), (175990483, 20)])
def test_intervals_tile_the_index_range(q, D):
    g = build_grid(q, D)
    seen = [m for r in g.interval_ranges for m in r]
    assert seen == list(range(1, g.N + 1))
    assert 3**g.T >= 4 * g.N - 2
    for j, r in enumerate(g.interval_ranges, start=1):
        mj = g.center_index(j)
        assert math.isclose(g.centers[j - 1], g.lam * mj)
        for m in (r.start, r.stop - 1) if len(r) else ():
            assert 4 * abs(m - mj) <= 3 ** (j - 1)
            assert abs(g.lam * m - g.centers[j - 1]) <= g.radii[j - 1] * (1 + 1e-12)


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 10**9))
def test_interval_of_is_consistent(m):
    j = interval_of(m)
    lo, hi = interval_range(j)
    assert lo <= m <= hi
    assert 3 ** (j - 1) < 4 * m - 2 < 3**j


def test_taylor_tail_decreases_geometrically():
    e = [taylor_tail_eps(0.002, B) for B in range(10, 15)]
    assert all(math.isclose(a / b, 2.0) for a, b in zip(e, e[1:]))


def test_hardy_theta_matches_mpmath():
    q, t = 10000003, 0.37
    p = Precision(20, 30)
    with mpmath.workdps(30):
        want = t * mpmath.log(mpmath.sqrt(q) / (2 * mpmath.pi)) + mpmath.im(mpmath.loggamma(mpmath.mpc(0.5, t)))
        assert abs(to_mpmath(hardy_theta(t, q, p)) - want) < 1e-25


@pytest.fixture(scope="module")
def run100003():
    return theta_run(100003, 6)


def test_taylor_matches_direct(run100003):
    R = run100003
    p = R.evaluator.p
    rng = np.random.default_rng(7)
    for _ in range(6):
        t = float(rng.uniform(0, 1))
        i = int(rng.integers(len(R.chars)))
        a = R.z(t, i)
        b = float(direct_eval(t, R.coeffs, R.grid, p, row=i))
        assert abs(a - b) < 1e-7


def test_z_is_even(run100003):
    for t in (0.05, 0.4, 0.99):
        assert np.allclose(run100003.evaluator.z_all(t), run100003.evaluator.z_all(-t), atol=1e-9)


def test_z_all_agrees_with_single_rows(run100003):
    ev = run100003.evaluator
    allz = ev.z_all(0.3)
    assert all(abs(allz[i] - ev.z(0.3, i)) < 1e-12 for i in range(0, len(allz), 3))
    assert ev.kernel_builds >= 1


def test_band_is_enforced(run100003):
    with pytest.raises(InputError):
        run100003.z(1.5)
    with pytest.raises(InputError):
        direct_eval(-1.01, run100003.coeffs, run100003.grid, run100003.evaluator.p)


def test_direct_mode_and_full_taylor_agree(run100003):
    R = run100003
    ev_direct, _ = theta_evaluator(R.table, R.grid, direct_mode=True)
    ev_taylor, _ = theta_evaluator(R.table, R.grid, direct_mode=False)
    assert ev_direct.sums.direct_index.size > 0 and 1 not in ev_direct.sums.taylor
    assert ev_taylor.sums.direct_index.size == 0
    assert np.allclose(ev_direct.z_all(0.6), ev_taylor.z_all(0.6), atol=1e-8)


def test_high_precision_path_matches_direct():
    R = theta_run(4004, 20)
    assert R.evaluator.sums.exact and not R.evaluator.fast
    for i, t in [(0, 0.21), (len(R.chars) - 1, 0.83)]:
        a = R.z(t, i)
        b = direct_eval(t, R.coeffs, R.grid, R.evaluator.p, row=i)
        assert abs(to_mpmath(a) - to_mpmath(b)) < 1e-20


def test_integer_sums_are_exact():
    from lconductor.engine import TaylorGrid
    idx = np.arange(1, 301)
    vals = np.empty((1, 300), dtype=object)
    vals[0, :] = [(-1) ** n * n for n in range(1, 301)]
    g = TaylorGrid(0.05, 300, 6, 12)
    S = precompute_sums(Coefficients(idx, vals), g, normalized=False, direct_mode=False)
    j = 5
    mj = g.center_index(j)
    want = sum(int(c) * (int(m) - mj) ** 12 for m, c in zip(idx, vals[0]) if interval_of(int(m)) == j)
    assert S.S[0, j - 1, 12] == want and isinstance(S.S[0, j - 1, 12], int)


def test_completion_shapes():
    full = Completion.theta(10000003)
    assert math.isclose(float(full.lam()), 2 * math.pi / math.sqrt(10000003))
    half = Completion("half", 1, 7 * 7, 1, 1, 1)
    assert math.isclose(float(half.lam()), math.pi / 7)
    s = half.s1(0.4)
    assert math.isclose(float(s.real), 0.75) and math.isclose(float(s.imag), 0.2)
