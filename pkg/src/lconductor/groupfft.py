"""Discrete Fourier transforms over finite abelian groups of arbitrary shape.

Sign convention is the character sum ``X[a] = sum_e x[e] exp(+2 pi i a.e/m)``,
i.e. an unnormalized inverse DFT.  Short axes use the direct matrix product;
longer ones use Bluestein's chirp convolution on power-of-two FFT lengths.
"""

import itertools

import numpy as np

NAIVE_CUTOFF = 64


def _naive_axis(x, axis):
    m = x.shape[axis]
    k = np.arange(m)
    # reduce k*j mod m before scaling to keep phases exact
    w = np.exp(2j * np.pi * (np.outer(k, k) % m) / m)
    x = np.moveaxis(x, axis, -1)
    y = x @ w.T
    return np.moveaxis(y, -1, axis)


def _chirp_axis(x, axis):
    m = x.shape[axis]
    x = np.moveaxis(x, axis, -1)
    k = np.arange(m)
    # exp(i pi k^2/m) with k^2 reduced mod 2m to keep the argument small
    chirp = np.exp(1j * np.pi * ((k * k) % (2 * m)) / m)
    L = 1 << int(2 * m - 1).bit_length()
    a = np.zeros(x.shape[:-1] + (L,), dtype=complex)
    a[..., :m] = x * chirp
    b = np.zeros(L, dtype=complex)
    b[:m] = np.conj(chirp)
    b[L - m + 1:] = np.conj(chirp[1:][::-1])
    conv = np.fft.ifft(np.fft.fft(a, axis=-1) * np.fft.fft(b), axis=-1)[..., :m]
    y = conv * chirp
    return np.moveaxis(y, -1, axis)


def dft_axis(x, axis=-1):
    """Character-sum transform of ``x`` along one axis."""
    x = np.asarray(x, dtype=complex)
    if x.shape[axis] <= NAIVE_CUTOFF:
        return _naive_axis(x, axis)
    return _chirp_axis(x, axis)


def dft_nd(x, axes):
    y = np.asarray(x, dtype=complex)
    for ax in axes:
        y = dft_axis(y, ax)
    return y


def naive_group_dft(values, coords, invariant_factors):
    """O(h^2) reference: ``X[chi] = sum_Q values[Q] exp(2 pi i chi.coords(Q)/m)``.

    ``values`` has one entry per group element (rows of ``coords``); returns a
    dict keyed by character exponent tuples.
    """
    m = np.asarray(invariant_factors, dtype=np.int64)
    coords = np.asarray(coords, dtype=np.int64).reshape(len(values), len(m))
    values = np.asarray(values)
    out = {}
    for chi in itertools.product(*(range(int(mi)) for mi in m)):
        chi_a = np.asarray(chi, dtype=np.int64)
        phase = ((coords * chi_a) % m / m).sum(axis=1) if len(m) else np.zeros(len(values))
        out[chi] = complex(np.sum(values * np.exp(2j * np.pi * phase)))
    return out
