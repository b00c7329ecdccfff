"""Seeded randomness shared by every module.

Two sources are used:

* ``numpy.random.Generator`` (PCG64) for sequential draws such as graph
  generation and permutations.
* A counter-mode hash (splitmix64 finalizer) for draws that must be
  random-access, e.g. the threshold of vertex ``v`` at iteration ``t`` or the
  machine a vertex lands on in a given phase. The hash is compiled with numba
  and is the single implementation used from both Python and kernels.
"""

from __future__ import annotations

import numba
import numpy as np

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_S11 = np.uint64(11)
_INV53 = 1.0 / 9007199254740992.0  # 2**-53

# stream tags keep the hash families of different consumers disjoint
STREAM_THRESHOLD = 0x7468726573686F6C
STREAM_PARTITION = 0x7061727469746E6E
STREAM_SEED = 0x7365656473656564


@numba.njit(cache=True, inline="always")
def mix64(z):
    z = z + _GOLDEN
    z = (z ^ (z >> _S30)) * _MIX1
    z = (z ^ (z >> _S27)) * _MIX2
    return z ^ (z >> _S31)


@numba.njit(cache=True, inline="always")
def hash3(key, a, b):
    h = mix64(np.uint64(key) ^ np.uint64(a))
    return mix64(h ^ np.uint64(b))


@numba.njit(cache=True, inline="always")
def unit_float(h):
    """Top 53 bits of ``h`` as a float in [0, 1)."""
    return np.float64(h >> _S11) * _INV53


@numba.njit(cache=True)
def _stream_key(seed, stream):
    return mix64(mix64(np.uint64(seed)) ^ np.uint64(stream))


def stream_key(seed: int, stream: int) -> np.uint64:
    return np.uint64(_stream_key(np.uint64(seed & 0xFFFFFFFFFFFFFFFF), np.uint64(stream)))


def hash_key(key, a: int, b: int = 0) -> np.uint64:
    """Python-side ``hash3`` that keeps the result typed as uint64."""
    return np.uint64(hash3(np.uint64(key), np.uint64(a & 0xFFFFFFFFFFFFFFFF), np.uint64(b)))


def derive_seed(seed: int, *tags: int) -> int:
    """Deterministic child seed for ``(seed, *tags)``, as a non-negative int."""
    key = stream_key(seed, STREAM_SEED)
    for tag in tags:
        key = hash_key(key, tag)
    return int(key) >> 1


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))
