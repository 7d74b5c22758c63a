"""Compiled sweep over all partial-sum indices for maximal operators.

Every mean we maximise has the form ``mean_n = S_n - G_n / den_n`` with
``G_n = sum_{j<n} num_j c_j psi_j``.  The sweep walks ``j = 0 .. M_N - 1`` once,
updates ``S`` and each ``G`` at all points, and keeps a running maximum of
``|mean_n(x)| - slope_n * ref(x)``.  ``O(K M_N^2)`` time, ``O(K M_N)`` memory.

Inner loops run over points with unit stride and no branches so they vectorise;
the argmax-tracking variant gives that up and is meant for single functions.
"""

from __future__ import annotations

import numba
import numpy as np

from .group import Basis
from .spectral import unit_roots


@numba.njit(cache=True)
def _step(j, c, roots, delta_t, carry, ph, t, S):
    M = ph.shape[0]
    L = roots.shape[0]
    if j > 0:
        row = delta_t[carry[j]]
        for x in range(M):
            p = ph[x] + row[x]
            ph[x] = p - L if p >= L else p
    for x in range(M):
        v = c * roots[ph[x]]
        t[x] = v
        S[x] += v


@numba.njit(cache=True)
def _sweep_max(coeffs, roots, delta_t, carry, nums, inv_dens, slopes, ref, start, out):
    M = coeffs.shape[0]
    K = nums.shape[0]
    ph = np.zeros(M, np.int64)
    S = np.zeros(M, coeffs.dtype)
    t = np.zeros(M, coeffs.dtype)
    G = np.zeros((K, M), coeffs.dtype)
    for j in range(M):
        n = j + 1
        _step(j, coeffs[j], roots, delta_t, carry, ph, t, S)
        for k in range(K):
            a = nums[k, j]
            Gk = G[k]
            if n < start[k]:
                for x in range(M):
                    Gk[x] += a * t[x]
                continue
            d = inv_dens[k, n]
            sl = slopes[k, n]
            ok = out[k]
            for x in range(M):
                g = Gk[x] + a * t[x]
                Gk[x] = g
                e = S[x] - g * d
                sc = np.sqrt(e.real * e.real + e.imag * e.imag) - sl * ref[x]
                ok[x] = max(ok[x], sc)


@numba.njit(cache=True)
def _sweep_arg(coeffs, roots, delta_t, carry, nums, inv_dens, slopes, ref, start, out, arg):
    M = coeffs.shape[0]
    K = nums.shape[0]
    ph = np.zeros(M, np.int64)
    S = np.zeros(M, coeffs.dtype)
    t = np.zeros(M, coeffs.dtype)
    G = np.zeros((K, M), coeffs.dtype)
    for j in range(M):
        n = j + 1
        _step(j, coeffs[j], roots, delta_t, carry, ph, t, S)
        for k in range(K):
            a = nums[k, j]
            for x in range(M):
                g = G[k, x] + a * t[x]
                G[k, x] = g
                if n >= start[k]:
                    e = S[x] - g * inv_dens[k, n]
                    sc = np.sqrt(e.real * e.real + e.imag * e.imag) - slopes[k, n] * ref[x]
                    if sc > out[k, x]:
                        out[k, x] = sc
                        arg[k, x] = n


def phase_steps(b: Basis) -> tuple[np.ndarray, np.ndarray]:
    """Per-point phase increments for stepping ``psi_{j-1} -> psi_j``.

    ``carry[j]`` is the number of trailing digits of ``j - 1`` equal to
    ``m_i - 1``; ``delta_t[c, x]`` is the phase change at ``x`` when exactly
    ``c`` digits wrap and digit ``c`` increments.
    """
    D = b.digit_table
    L = b.phase_denominator
    w = np.array([L // mk for mk in b.m], dtype=np.int64)
    m = np.array(b.m, dtype=np.int64)
    wrapped = np.cumsum((m - 1)[None, :] * D * w[None, :], axis=1)
    delta = np.empty((b.size, b.N), dtype=np.int64)
    delta[:, 0] = D[:, 0] * w[0]
    delta[:, 1:] = D[:, 1:] * w[None, 1:] - wrapped[:, :-1]
    delta %= L
    carry = np.zeros(b.size, dtype=np.int64)
    full = D == (m - 1)[None, :]
    run = np.cumprod(full, axis=1).sum(axis=1)
    carry[1:] = np.minimum(run[:-1], b.N - 1)
    return np.ascontiguousarray(delta.T), carry


def sweep(b: Basis, coeffs: np.ndarray, nums: np.ndarray, inv_dens: np.ndarray,
          start: np.ndarray, slopes: np.ndarray | None = None,
          ref: np.ndarray | None = None, track_arg: bool = False):
    """Run the sweep for one spectrum.

    Returns ``max_scores`` of shape ``(K, M_N)``, plus the maximising ``n`` per
    entry when ``track_arg`` is set.  Real Walsh spectra run in real arithmetic.
    """
    M = b.size
    K = nums.shape[0]
    coeffs = np.asarray(coeffs)
    if b.is_walsh and (not np.iscomplexobj(coeffs) or not np.any(coeffs.imag)):
        coeffs = np.ascontiguousarray(coeffs.real, dtype=np.float64)
        roots = np.array([1.0, -1.0])
    else:
        coeffs = np.ascontiguousarray(coeffs, dtype=np.complex128)
        roots = np.ascontiguousarray(unit_roots(b.phase_denominator))
    delta_t, carry = phase_steps(b)
    slopes = np.zeros((K, M + 1)) if slopes is None else slopes
    ref = np.zeros(M) if ref is None else ref
    args = (coeffs, roots, delta_t, carry,
            np.ascontiguousarray(nums, dtype=np.float64),
            np.ascontiguousarray(inv_dens, dtype=np.float64),
            np.ascontiguousarray(slopes, dtype=np.float64),
            np.ascontiguousarray(ref, dtype=np.float64),
            np.asarray(start, dtype=np.int64))
    out = np.full((K, M), -np.inf)
    if not track_arg:
        _sweep_max(*args, out)
        return out
    arg = np.zeros((K, M), dtype=np.int64)
    _sweep_arg(*args, out, arg)
    return out, arg
