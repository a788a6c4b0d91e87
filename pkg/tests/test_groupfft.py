import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lconductor import forms as bqf
from lconductor.groupfft import NAIVE_CUTOFF, dft_axis, dft_nd, naive_group_dft


def dft_matrix(m):
    k = np.arange(m)
    return np.exp(2j * np.pi * np.outer(k, k) / m)


@pytest.mark.parametrize("m", [1, 2, 3, NAIVE_CUTOFF, NAIVE_CUTOFF + 1, 353, 706, 1000])
def test_axis_matches_matrix(m):
    rng = np.random.default_rng(m)
    x = rng.normal(size=(m, 3)) + 1j * rng.normal(size=(m, 3))
    want = dft_matrix(m) @ x
    got = dft_axis(x, axis=0)
    assert np.max(np.abs(got - want)) < 1e-9 * max(1, m)


@pytest.mark.parametrize("shape", [(258, 2, 2, 2), (126, 6, 2), (330, 3), (353,), (706,)])
def test_nd_matches_naive_group_dft(shape):
    rng = np.random.default_rng(sum(shape))
    coords = np.array(np.unravel_index(np.arange(np.prod(shape)), shape)).T
    vals = rng.integers(0, 20, size=len(coords)).astype(float)
    arr = np.zeros(shape)
    arr[tuple(coords.T)] = vals
    got = dft_nd(arr, range(len(shape)))
    ref = naive_group_dft(vals, coords, shape)
    err = max(abs(got[chi] - v) for chi, v in ref.items())
    assert err < 1e-8 * vals.sum()


def test_vector_valued_transform_acts_per_column():
    rng = np.random.default_rng(1)
    x = rng.normal(size=(353, 2, 7))
    y = dft_nd(x, (0, 1))
    for n in range(7):
        assert np.allclose(y[..., n], dft_nd(x[..., n], (0, 1)))


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 400), st.integers(0, 2**32 - 1))
def test_matches_numpy_inverse_fft(m, seed):
    x = np.random.default_rng(seed).normal(size=m)
    assert np.allclose(dft_axis(x), np.fft.ifft(x) * m, atol=1e-9 * m)


def test_on_real_class_group():
    G = bqf.class_group(4004)
    vals = np.arange(G.h, dtype=float)
    co = G.coords_array()
    arr = np.zeros(G.invariant_factors)
    arr[tuple(co.T)] = vals
    got = dft_nd(arr, range(G.rank))
    for chi, v in naive_group_dft(vals, co, G.invariant_factors).items():
        assert abs(got[chi] - v) < 1e-9
