"""Counter-based random streams.

Every draw is a pure function of ``(seed, key...)``: an integer key tuple is
hashed to a uniform in [0, 1) and the target CDF is inverted on top of it.
Lattice sites and Monte Carlo replicas can therefore be sampled in any
order, or in parallel, without sharing generator state.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

_MASK = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_MULT1 = 0xBF58476D1CE4E5B9
_MULT2 = 0x94D049BB133111EB

_U_GOLDEN = np.uint64(_GOLDEN)
_U_MULT1 = np.uint64(_MULT1)
_U_MULT2 = np.uint64(_MULT2)
_TO_UNIT = 2.0 ** -53


def _mix(h: int) -> int:
    """SplitMix64 finalizer on a python int, wrapped to 64 bits."""
    h &= _MASK
    h ^= h >> 30
    h = (h * _MULT1) & _MASK
    h ^= h >> 27
    h = (h * _MULT2) & _MASK
    return h ^ (h >> 31)


def stream_base(seed: int, *keys: int) -> int:
    """Fold a seed and an integer key tuple into one 64-bit stream id."""
    h = _mix((seed & _MASK) ^ _GOLDEN)
    for k in keys:
        h = _mix(h ^ ((k + _GOLDEN) & _MASK))
    return h


def uniform(seed: int, *keys: int) -> float:
    """One uniform in [0, 1) addressed purely by ``(seed, keys)``."""
    return (stream_base(seed, *keys) >> 11) * _TO_UNIT


def _mix_array(h: np.ndarray) -> np.ndarray:
    h = h.astype(np.uint64, copy=True)
    h ^= h >> np.uint64(30)
    h *= _U_MULT1
    h ^= h >> np.uint64(27)
    h *= _U_MULT2
    h ^= h >> np.uint64(31)
    return h


def uniforms(base: int, count: int) -> np.ndarray:
    """Vector of uniforms in [0, 1) for counters ``0 .. count-1``."""
    idx = np.arange(count, dtype=np.uint64) + _U_GOLDEN
    h = _mix_array(np.uint64(base & _MASK) ^ idx)
    return (h >> np.uint64(11)).astype(np.float64) * _TO_UNIT


def uniform_grid(base: int, rows: int, cols: int) -> np.ndarray:
    """(rows, cols) array of uniforms addressed by (base, row, col)."""
    row_keys = _mix_array(
        np.uint64(base & _MASK) ^ (np.arange(rows, dtype=np.uint64) + _U_GOLDEN)
    )
    col_keys = np.arange(cols, dtype=np.uint64) + _U_GOLDEN
    h = _mix_array(row_keys[:, None] ^ col_keys[None, :])
    return (h >> np.uint64(11)).astype(np.float64) * _TO_UNIT


@dataclass
class Stream:
    """Sequential view of a counter-based stream.

    ``(seed, key)`` select the stream; the draw position advances with
    every call, so a stream is an ordinary stateful sampler while staying
    reproducible from its address alone.
    """

    seed: int
    key: tuple[int, ...] = ()
    position: int = field(default=0)

    def next_uniform(self) -> float:
        u = uniform(self.seed, *self.key, self.position)
        self.position += 1
        return u

    def substream(self, *extra: int) -> "Stream":
        return Stream(self.seed, self.key + extra)
