"""Counter-based noise streams for reproducible parallel Monte Carlo.

Every trajectory owns a stateless stream identified by a single 64-bit key
derived from (master_seed, trajectory_index). The k-th normal pair of a
stream is a pure function of (key, k), so results do not depend on worker
count or scheduling order, and any trajectory can be replayed in isolation.

The generator is the SplitMix64 output function applied to a Weyl sequence
(golden-gamma increments), followed by Box-Muller. It is implemented here
with numba so the same code runs inside nopython trajectory kernels.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numba import njit

U64 = np.uint64

_GAMMA = U64(0x9E3779B97F4A7C15)
_MIX1 = U64(0xBF58476D1CE4E5B9)
_MIX2 = U64(0x94D049BB133111EB)
_TWO_M53 = 2.0 ** -53


@njit(cache=True, inline="always")
def mix64(z):
    """SplitMix64 finalizer: avalanching 64-bit mix."""
    # cast first: a signed argument must not trigger int64+uint64 -> float64
    z = U64(z)
    z = (z ^ (z >> U64(30))) * _MIX1
    z = (z ^ (z >> U64(27))) * _MIX2
    return z ^ (z >> U64(31))


@njit(cache=True, inline="always")
def u01(key, ctr):
    """ctr-th uniform draw of the stream, in the half-open interval (0, 1]."""
    bits = mix64(U64(key) + _GAMMA * (U64(ctr) + U64(1)))
    return ((bits >> U64(11)) + U64(1)) * _TWO_M53


@njit(cache=True, inline="always")
def normal_pair(key, k):
    """k-th standard-normal pair of the stream (Box-Muller, exact)."""
    a = u01(U64(key), U64(2) * U64(k))
    b = u01(U64(key), U64(2) * U64(k) + U64(1))
    r = math.sqrt(-2.0 * math.log(a))
    th = 2.0 * math.pi * b
    return r * math.cos(th), r * math.sin(th)


@njit(cache=True)
def stream_key(master_seed, index):
    """64-bit stream key for substream `index` under `master_seed`."""
    return mix64(mix64(U64(master_seed)) + _GAMMA * U64(index) + U64(1))


def derive_seed(master_seed: int, index: int) -> int:
    """Independent master seed for the index-th row of a sweep."""
    return int(stream_key(U64(master_seed), U64(index)))


@dataclass(frozen=True)
class NoiseStream:
    """Replayable noise stream of one trajectory."""

    master_seed: int
    index: int

    @property
    def key(self) -> int:
        return int(stream_key(U64(self.master_seed), U64(self.index)))

    def normal_pair(self, k: int) -> tuple[float, float]:
        return normal_pair(U64(self.key), U64(k))

    def normals(self, n_pairs: int) -> np.ndarray:
        """First n_pairs pairs as an (n_pairs, 2) array, for inspection."""
        key = U64(self.key)
        out = np.empty((n_pairs, 2))
        for k in range(n_pairs):
            out[k, 0], out[k, 1] = normal_pair(key, U64(k))
        return out
