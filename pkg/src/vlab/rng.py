"""Counter-based pseudo-randomness (SplitMix64 finaliser).

Draw ``i`` of stream ``s`` under seed ``seed`` is ``mix(seed + G * (s * 2^32 + i + 1))``
mod 2^64, where ``G = 0x9E3779B97F4A7C15`` and ``mix`` is the SplitMix64 output
function.  No hidden state, so any draw can be regenerated independently and the
sequence is easy to reproduce in other languages.
"""

from __future__ import annotations

import numpy as np

GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MASK = (1 << 64) - 1


def splitmix64(seed: int, n: int, stream: int = 0) -> np.ndarray:
    counter = np.arange(n, dtype=np.uint64) + np.uint64(((stream << 32) + 1) & _MASK)
    z = np.uint64(seed & _MASK) + GOLDEN * counter
    z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return z ^ (z >> np.uint64(31))


def uniform(seed: int, n: int, stream: int = 0) -> np.ndarray:
    """Doubles in ``[0, 1)`` from the top 53 bits."""
    return (splitmix64(seed, n, stream) >> np.uint64(11)).astype(np.float64) * 2.0**-53


def signed_uniform(seed: int, shape: tuple[int, ...] | int, stream: int = 0) -> np.ndarray:
    """Doubles in ``[-1, 1)`` reshaped to ``shape``."""
    shape = (shape,) if isinstance(shape, int) else tuple(shape)
    return 2.0 * uniform(seed, int(np.prod(shape)), stream).reshape(shape) - 1.0


def random_digits(seed: int, radices: tuple[int, ...], count: int, stream: int = 0) -> np.ndarray:
    """``count`` points as digit rows; digit ``k`` is a draw reduced mod ``m_k``."""
    raw = splitmix64(seed, count * len(radices), stream).reshape(count, len(radices))
    m = np.array(radices, dtype=np.uint64)
    return (raw % m[None, :]).astype(np.int64)
