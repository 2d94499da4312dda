"""Counter-based random numbers for reproducible matrix sampling.

The generator is Philox4x32-10 (Salmon et al., the counter-based
generator from the Random123 family): a bijective keyed permutation of
a 128-bit counter, applied for 10 rounds.  There is no hidden state —
every variate is a pure function of (seed, counter) — so entries of a
random field can be drawn in any order, any slice, on any number of
workers, and always agree bit for bit.

Stream splitting is by counter word:

    word0 = trial index
    word1 = first matrix index  (the smaller one, for symmetric fields)
    word2 = second matrix index
    word3 = substream (0: filtered-model Y field, 1: colored Gaussian field)

and the 64-bit seed occupies the two key words.  Gaussian variates are
fixed to the Box-Muller cosine branch, one variate per counter, with
both uniforms built by gluing the four 32-bit output words pairwise
into 53-bit mantissas via u = ((x >> 11) + 0.5) * 2^-53 (never 0 or 1,
so the logarithm is safe).
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "philox4x32_10",
    "uniform_pair",
    "gaussian_entries",
    "rademacher_entries",
]

_M0 = np.uint64(0xD2511F53)
_M1 = np.uint64(0xCD9E8D57)
_W0 = 0x9E3779B9
_W1 = 0xBB67AE85
_MASK32 = 0xFFFFFFFF


def _u32(x) -> np.ndarray:
    """Cast integers (possibly negative: two's complement) to uint32."""
    return (np.asarray(x, dtype=np.int64) & _MASK32).astype(np.uint32)


def _mulhilo(m: np.uint64, x: np.ndarray):
    prod = m * x.astype(np.uint64)
    return (prod >> np.uint64(32)).astype(np.uint32), prod.astype(np.uint32)


def philox4x32_10(c0, c1, c2, c3, seed: int):
    """The raw generator: four uint32 output words per counter.

    Inputs broadcast against each other; negative indices are taken mod
    2^32.  The seed (64-bit) is split little-endian into the two key
    words.
    """
    c0, c1, c2, c3 = np.broadcast_arrays(_u32(c0), _u32(c1), _u32(c2), _u32(c3))
    k0 = int(seed) & _MASK32
    k1 = (int(seed) >> 32) & _MASK32
    for _ in range(10):
        hi0, lo0 = _mulhilo(_M0, c0)
        hi1, lo1 = _mulhilo(_M1, c2)
        c0, c1, c2, c3 = (hi1 ^ c1 ^ np.uint32(k0), lo1,
                          hi0 ^ c3 ^ np.uint32(k1), lo0)
        k0 = (k0 + _W0) & _MASK32
        k1 = (k1 + _W1) & _MASK32
    return c0, c1, c2, c3


def _to_unit(hi: np.ndarray, lo: np.ndarray) -> np.ndarray:
    x = (hi.astype(np.uint64) << np.uint64(32)) | lo.astype(np.uint64)
    return ((x >> np.uint64(11)).astype(np.float64) + 0.5) * 2.0 ** -53


def uniform_pair(seed: int, trial, a, b, stream=0):
    """Two independent uniforms on (0,1) per counter (vectorized)."""
    o0, o1, o2, o3 = philox4x32_10(trial, a, b, stream, seed)
    return _to_unit(o0, o1), _to_unit(o2, o3)


def gaussian_entries(seed: int, trial, a, b, stream=0) -> np.ndarray:
    """Standard normal variates, one per (trial, a, b, stream) counter."""
    u1, u2 = uniform_pair(seed, trial, a, b, stream)
    return np.sqrt(-2.0 * np.log(u1)) * np.cos(2.0 * np.pi * u2)


def rademacher_entries(seed: int, trial, a, b, stream=0) -> np.ndarray:
    """Fair signs (+1/-1), one per counter: bit 0 of the first word."""
    o0, _, _, _ = philox4x32_10(trial, a, b, stream, seed)
    return (o0 & np.uint32(1)).astype(np.float64) * 2.0 - 1.0
