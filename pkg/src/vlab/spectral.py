"""Vilenkin characters, the fast Vilenkin-Fourier transform and Dirichlet kernels.

The character ``psi_n(x) = prod_k exp(2 pi i n_k x_k / m_k)`` factors over the
digits, so the transform on ``M_N`` points is a tensor product of ``N`` small
DFTs of sizes ``m_k``.  Each stage views the flat array as
``(M_N / M_{k+1}, m_k, M_k)`` and applies one ``m_k x m_k`` twiddle matrix along
the middle axis; stage 0 is the stride-1 one.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from .group import Basis, _check_point


@lru_cache(maxsize=64)
def unit_roots(L: int) -> np.ndarray:
    """``exp(2 pi i j / L)`` for ``j < L`` with quarter turns snapped exactly."""
    j = np.arange(L)
    ang = 2.0 * np.pi * j / L
    out = np.cos(ang) + 1j * np.sin(ang)
    exact = {0: 1.0 + 0j, 1: 1j, 2: -1.0 + 0j, 3: -1j}
    for idx in np.flatnonzero((4 * j) % L == 0):
        out[idx] = exact[(4 * idx) // L]
    out.setflags(write=False)
    return out


@lru_cache(maxsize=64)
def _twiddle(m: int, sign: int) -> np.ndarray:
    n = np.arange(m)
    roots = unit_roots(m)
    W = roots[(sign * np.outer(n, n)) % m]
    W.setflags(write=False)
    return W


@dataclass(frozen=True, eq=False)
class GridFunction:
    """A function constant on level-N cylinders, one value per point."""

    basis: Basis
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values)
        if vals.shape != (self.basis.size,):
            raise ValueError(f"expected {self.basis.size} values, got shape {vals.shape}")
        object.__setattr__(self, "values", vals)

    def integral(self) -> complex:
        return complex(self.values.sum() / self.basis.size)

    def __abs__(self) -> "GridFunction":
        return GridFunction(self.basis, np.abs(self.values))


@dataclass(frozen=True, eq=False)
class SpectralFunction:
    """Vilenkin-Fourier coefficients ``coeffs[n] = f^(n)`` for ``n < M_N``."""

    basis: Basis
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coeffs)
        if c.shape != (self.basis.size,):
            raise ValueError(f"expected {self.basis.size} coefficients, got shape {c.shape}")
        object.__setattr__(self, "coeffs", c)


def rademacher(b: Basis, k: int, x: Sequence[int]) -> complex:
    if not 0 <= k < b.N:
        raise IndexError(f"Rademacher index {k} outside [0, {b.N})")
    return complex(unit_roots(b.m[k])[x[k] % b.m[k]])


def character(b: Basis, n: int, x: Sequence[int]) -> complex:
    if not 0 <= n < b.size:
        raise IndexError(f"character index {n} outside [0, {b.size})")
    _check_point(b, x)
    L = b.phase_denominator
    phase = 0
    for mk, xk in zip(b.m, x):
        n, nk = divmod(n, mk)
        phase += nk * xk * (L // mk)
    return complex(unit_roots(L)[phase % L])


def _phase_weights(b: Basis) -> np.ndarray:
    L = b.phase_denominator
    return np.array([L // mk for mk in b.m], dtype=np.int64)


def character_phases(b: Basis, n: np.ndarray | int) -> np.ndarray:
    """Integer phases ``L * arg(psi_n(x)) / 2pi`` (mod ``L``) for all points ``x``.

    ``n`` may be a scalar or a 1-d index array; the result has shape
    ``(len(n), M_N)`` (or ``(M_N,)`` for scalar ``n``).
    """
    D = b.digit_table
    scalar = np.ndim(n) == 0
    n = np.atleast_1d(np.asarray(n, dtype=np.int64))
    if n.size and (n.min() < 0 or n.max() >= b.size):
        raise IndexError("character index out of range")
    nd = D[n] * _phase_weights(b)[None, :]
    ph = (nd @ D.T) % b.phase_denominator
    return ph[0] if scalar else ph


def character_row(b: Basis, n: int) -> np.ndarray:
    """``psi_n`` evaluated at every point, in flat order."""
    return unit_roots(b.phase_denominator)[character_phases(b, n)]


def _stages(b: Basis, a: np.ndarray, sign: int) -> np.ndarray:
    lead = a.shape[:-1]
    M = b.size
    real_walsh = b.is_walsh and not np.iscomplexobj(a)
    a = np.array(a, dtype=np.float64 if real_walsh else np.complex128, copy=True)
    a = a.reshape(-1, M)
    for mk, Mk in zip(b.m, b.Mk):
        v = a.reshape(a.shape[0], M // (Mk * mk), mk, Mk)
        if mk == 2:
            lo = v[:, :, 0, :].copy()
            hi = v[:, :, 1, :]
            v[:, :, 0, :] += hi
            lo -= hi
            v[:, :, 1, :] = lo
        else:
            a = np.matmul(_twiddle(mk, sign), v).reshape(-1, M)
    return a.reshape(*lead, M)


def forward(b: Basis, values: np.ndarray) -> np.ndarray:
    """Array-level transform over the last axis (leading axes are a batch)."""
    b.require_dense()
    values = np.asarray(values)
    if values.shape[-1] != b.size:
        raise ValueError(f"last axis must have length {b.size}")
    out = _stages(b, values, -1) / b.size
    return out.astype(np.complex128, copy=False)


def inverse(b: Basis, coeffs: np.ndarray) -> np.ndarray:
    """Synthesis ``sum_n c_n psi_n`` over the last axis."""
    b.require_dense()
    coeffs = np.asarray(coeffs)
    if coeffs.shape[-1] != b.size:
        raise ValueError(f"last axis must have length {b.size}")
    return _stages(b, coeffs, 1).astype(np.complex128, copy=False)


def vft_forward(f: GridFunction) -> SpectralFunction:
    return SpectralFunction(f.basis, forward(f.basis, f.values))


def vft_inverse(c: SpectralFunction) -> GridFunction:
    return GridFunction(c.basis, inverse(c.basis, c.coeffs))


def vft_naive(f: GridFunction, chunk: int = 256) -> SpectralFunction:
    """Direct ``O(M_N^2)`` evaluation of ``(1/M_N) sum_x f(x) conj(psi_n(x))``."""
    b = f.basis
    b.require_dense()
    roots = unit_roots(b.phase_denominator)
    vals = np.asarray(f.values, dtype=np.complex128)
    out = np.empty(b.size, dtype=np.complex128)
    for start in range(0, b.size, chunk):
        n = np.arange(start, min(start + chunk, b.size))
        psi = roots[character_phases(b, n)]
        out[n] = psi.conj() @ vals
    return SpectralFunction(b, out / b.size)


def _check_same_basis(*fs) -> None:
    if any(g.basis != fs[0].basis for g in fs[1:]):
        raise ValueError("basis mismatch")


def convolve(f: GridFunction, g: GridFunction) -> GridFunction:
    """Group convolution ``(f*g)(x) = int f(t) g(x - t) dmu(t)`` through the spectra."""
    _check_same_basis(f, g)
    b = f.basis
    return GridFunction(b, inverse(b, forward(b, f.values) * forward(b, g.values)))


def dirichlet_dense(b: Basis, n: int) -> GridFunction:
    """``D_n = sum_{k<n} psi_k`` on every point."""
    if not 0 <= n <= b.size:
        raise IndexError(f"Dirichlet index {n} outside [0, {b.size}]")
    c = np.zeros(b.size)
    c[:n] = 1.0
    return GridFunction(b, inverse(b, c))


def dirichlet_eval(b: Basis, n: int, x: Sequence[int]) -> complex:
    """``D_n(x)`` from the digits of ``n`` alone; no dense storage.

    Uses ``D_n(x) = sum_k psi_{n^(k+1)}(x) D_{M_k}(x) sum_{u<n_k} r_k(x)^u`` where
    ``n^(k+1)`` keeps the digits of ``n`` above position ``k`` and
    ``D_{M_k}(x) = M_k`` on ``I_k`` and 0 elsewhere.  ``n`` may be a big integer.
    """
    n = int(n)
    if not 0 <= n <= b.size:
        raise OverflowError(f"Dirichlet index {n} outside [0, M_N = {b.size}]")
    _check_point(b, x)
    # D_{M_k}(x) != 0 only for k <= (number of leading zero digits of x)
    zeros = 0
    while zeros < b.N and x[zeros] == 0:
        zeros += 1
    if n == b.size:
        return complex(b.size) if zeros == b.N else 0j

    digits = []
    for mk in b.m:
        n, d = divmod(n, mk)
        digits.append(d)

    L = b.phase_denominator
    roots = unit_roots(L)
    total = 0j
    phase = 0  # phase of psi_{n^(k+1)}(x), accumulated from the top digit down
    for k in range(b.N - 1, -1, -1):
        nk = digits[k]
        step = x[k] * (L // b.m[k])
        if nk and k <= zeros:
            geo = sum(roots[(u * step) % L] for u in range(nk))
            total += roots[phase % L] * float(b.Mk[k]) * geo
        phase += nk * step
    return complex(total)
