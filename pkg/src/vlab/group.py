"""Mixed-radix arithmetic on a truncated bounded Vilenkin group.

A point of the level-``N`` group is a digit tuple ``(x_0, ..., x_{N-1})`` with
``0 <= x_k < m_k``.  Dense data is stored in little-endian mixed-radix order:
the flat index of a point is ``t = sum(x_k * M_k)`` so ``x_0`` varies fastest.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from math import lcm
from typing import Sequence

import numpy as np

DEFAULT_DENSE_CAP = 2**24


class DenseCapError(ValueError):
    """Raised when an operation would allocate more than the dense cap."""


def dense_cap() -> int:
    """Largest ``M_N`` allowed for dense work (env ``VLAB_DENSE_CAP``)."""
    raw = os.environ.get("VLAB_DENSE_CAP")
    if raw is None:
        return DEFAULT_DENSE_CAP
    return int(raw)


@dataclass(frozen=True)
class Basis:
    """Radix sequence ``m`` truncated at depth ``N = len(m)``.

    ``Mk[k]`` are the generalized powers ``M_0 = 1, M_{k+1} = m_k M_k`` (Python
    ints, so arbitrarily deep bases are fine for symbolic work).
    """

    m: tuple[int, ...]

    def __post_init__(self):
        if len(self.m) < 1:
            raise ValueError("depth N must be >= 1")
        if any(int(mk) < 2 for mk in self.m):
            raise ValueError(f"every radix must be >= 2, got {self.m}")
        object.__setattr__(self, "m", tuple(int(mk) for mk in self.m))

    @property
    def N(self) -> int:
        return len(self.m)

    @cached_property
    def Mk(self) -> tuple[int, ...]:
        out = [1]
        for mk in self.m:
            out.append(out[-1] * mk)
        return tuple(out)

    @property
    def size(self) -> int:
        """``M_N``, the number of level-N cylinders."""
        return self.Mk[-1]

    @property
    def lam(self) -> int:
        """``lambda = max m_k``."""
        return max(self.m)

    @property
    def is_walsh(self) -> bool:
        return all(mk == 2 for mk in self.m)

    @cached_property
    def phase_denominator(self) -> int:
        """Common denominator ``L = lcm(m_k)`` for exact character phases."""
        return lcm(*self.m)

    def require_dense(self) -> None:
        cap = dense_cap()
        if self.size > cap:
            raise DenseCapError(f"M_N = {self.size} exceeds dense cap {cap}")

    def truncate(self, n: int) -> "Basis":
        return Basis(self.m[:n])

    @cached_property
    def digit_table(self) -> np.ndarray:
        """``(M_N, N)`` int64 array; row ``t`` holds the digits of point ``t``."""
        self.require_dense()
        t = np.arange(self.size, dtype=np.int64)
        Mk = np.array(self.Mk[:-1], dtype=np.int64)
        m = np.array(self.m, dtype=np.int64)
        return (t[:, None] // Mk[None, :]) % m[None, :]


def build_basis(m: int | Sequence[int], N: int) -> Basis:
    """Basis of depth ``N``; ``m`` is a constant radix or a sequence of length >= N."""
    if N < 1:
        raise ValueError(f"depth N must be >= 1, got {N}")
    if isinstance(m, (int, np.integer)):
        radices = (int(m),) * N
    else:
        radices = tuple(int(v) for v in m)
        if len(radices) < N:
            raise ValueError(f"radix sequence has {len(radices)} entries, need {N}")
        radices = radices[:N]
    return Basis(radices)


def index_to_digits(b: Basis, t: int) -> tuple[int, ...]:
    t = int(t)
    if not 0 <= t < b.size:
        raise IndexError(f"index {t} outside [0, {b.size})")
    out = []
    for mk in b.m:
        t, d = divmod(t, mk)
        out.append(d)
    return tuple(out)


def digits_to_index(b: Basis, x: Sequence[int]) -> int:
    _check_point(b, x)
    return sum(int(d) * Mk for d, Mk in zip(x, b.Mk))


def _check_point(b: Basis, x: Sequence[int]) -> None:
    if len(x) != b.N:
        raise ValueError(f"point has {len(x)} digits, basis depth is {b.N}")
    for k, (d, mk) in enumerate(zip(x, b.m)):
        if not 0 <= d < mk:
            raise ValueError(f"digit {k} = {d} outside Z_{mk}")


def group_add(b: Basis, x: Sequence[int], y: Sequence[int]) -> tuple[int, ...]:
    _check_point(b, x)
    _check_point(b, y)
    return tuple((a + c) % mk for a, c, mk in zip(x, y, b.m))


def group_sub(b: Basis, x: Sequence[int], y: Sequence[int]) -> tuple[int, ...]:
    _check_point(b, x)
    _check_point(b, y)
    return tuple((a - c) % mk for a, c, mk in zip(x, y, b.m))


def sub_indices(b: Basis, s: np.ndarray, t: np.ndarray) -> np.ndarray:
    """Flat index of ``x - y`` for broadcastable flat-index arrays ``s``, ``t``."""
    s = np.asarray(s, dtype=np.int64)
    t = np.asarray(t, dtype=np.int64)
    out = np.zeros(np.broadcast(s, t).shape, dtype=np.int64)
    for mk, Mk in zip(b.m, b.Mk):
        out += ((s // Mk - t // Mk) % mk) * Mk
    return out


@dataclass(frozen=True)
class Cylinder:
    """``I_n(x)``: points agreeing with ``anchor`` in the first ``level`` digits."""

    level: int
    anchor: tuple[int, ...] = ()

    def __post_init__(self):
        if self.level < 0:
            raise ValueError("cylinder level must be >= 0")
        anchor = tuple(self.anchor)
        if len(anchor) < self.level:
            anchor = anchor + (0,) * (self.level - len(anchor))
        object.__setattr__(self, "anchor", anchor[: self.level])

    def measure(self, b: Basis) -> Fraction:
        if self.level > b.N:
            raise ValueError(f"cylinder level {self.level} deeper than basis depth {b.N}")
        return Fraction(1, b.Mk[self.level])

    def anchor_index(self, b: Basis) -> int:
        return sum(d * Mk for d, Mk in zip(self.anchor, b.Mk))

    def mask(self, b: Basis) -> np.ndarray:
        """Boolean membership over all points of ``b`` in flat order."""
        b.require_dense()
        self.measure(b)
        t = np.arange(b.size, dtype=np.int64)
        return (t % b.Mk[self.level]) == self.anchor_index(b)

    def contains(self, x: Sequence[int]) -> bool:
        return tuple(x[: self.level]) == self.anchor


def cylinders(b: Basis, n: int) -> list[Cylinder]:
    """All level-``n`` cylinders of ``b`` (there are ``M_n`` of them)."""
    return [Cylinder(n, index_to_digits(b.truncate(n), t)) if n else Cylinder(0)
            for t in range(b.Mk[n])]
