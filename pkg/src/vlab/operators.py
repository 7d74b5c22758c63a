"""Maximal operators, L_p / weak-L_p quasi-norms, martingales and p-atoms.

Maximal operators are exact for level-N data.  For ``n >= M_N`` every partial
sum equals ``f``, so ``T_n f = t T_{M_N} f + (1 - t) f`` with
``t = Q_{M_N} / Q_n``; the modulus is convex in ``t`` and ``t -> 0`` for a
regular method, so the supremum over the tail is ``max(|T_{M_N} f|, |f|)``.
The same argument applies to the Fejer means.  A finite sweep over
``1 <= n <= M_N`` followed by a pointwise max with ``|f|`` is therefore the
full supremum.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ._sweep import sweep
from .group import Basis, Cylinder
from .spectral import GridFunction, forward
from .summability import NON_DECREASING, WeightSequence

TAIL = -1  # argmax marker: supremum approached as n -> infinity


def _values(f) -> np.ndarray:
    return f.values if isinstance(f, GridFunction) else np.asarray(f)


def lp_norm(f: GridFunction | np.ndarray, p: float) -> float:
    """``(mean |f|^p)^(1/p)`` against the normalised Haar measure."""
    if p <= 0:
        raise ValueError(f"p must be > 0, got {p}")
    a = np.abs(_values(f))
    return float(np.mean(a**p) ** (1.0 / p))


def weak_lp(f: GridFunction | np.ndarray, p: float) -> float:
    """``sup_y y mu(|f| > y)^(1/p)``, exact for step functions.

    With ``|f|`` sorted descending, the sup is reached just below a value and
    equals ``max_i |f|_(i) (i / M)^(1/p)``; ties fall to the last index of the
    run, which is also the largest candidate.
    """
    if p <= 0:
        raise ValueError(f"p must be > 0, got {p}")
    a = np.abs(_values(f)).ravel()
    s = np.sort(a)[::-1]
    i = np.arange(1, s.size + 1)
    return float(np.max(s * (i / s.size) ** (1.0 / p)))


# -- maximal operators --------------------------------------------------------


@dataclass(frozen=True, eq=False)
class MaximalResult:
    """``sup_n |mean_n f|`` with the maximising ``n`` (``TAIL`` for the limit ``n -> inf``)."""

    value: GridFunction
    argmax: np.ndarray
    n_range: tuple[int, int]


def _t_plan(w: WeightSequence, M: int):
    Q = w.Q_array(M)
    if Q[-1] <= 0:
        raise ZeroDivisionError(f"Q_n = 0 for all n <= {M} ({w.label})")
    pos = Q > 0
    inv = np.zeros(M + 1)
    inv[pos] = 1.0 / Q[pos]
    start = int(np.argmax(pos))
    return Q[1:], inv, start


def _fejer_plan(M: int):
    n = np.arange(M + 1, dtype=np.float64)
    inv = np.zeros(M + 1)
    inv[1:] = 1.0 / n[1:]
    return n[:M], inv, 1


def _stack(plans):
    nums = np.stack([p[0] for p in plans])
    invs = np.stack([p[1] for p in plans])
    start = np.array([p[2] for p in plans], dtype=np.int64)
    return nums, invs, start


def _maximal(f: GridFunction, plan) -> MaximalResult:
    b = f.basis
    b.require_dense()
    nums, invs, start = _stack([plan])
    out, arg = sweep(b, forward(b, f.values), nums, invs, start, track_arg=True)
    tail = np.abs(f.values)
    use_tail = tail > out[0]
    vals = np.where(use_tail, tail, out[0])
    return MaximalResult(GridFunction(b, vals), np.where(use_tail, TAIL, arg[0]),
                         (int(start[0]), b.size))


def maximal_t(f: GridFunction, w: WeightSequence) -> MaximalResult:
    """``T* f = sup_{n >= 1} |T_n f|`` (tail closed analytically, see module doc)."""
    return _maximal(f, _t_plan(w, f.basis.size))


def maximal_fejer(f: GridFunction) -> MaximalResult:
    """``sigma* f = sup_{n >= 1} |sigma_n f|``."""
    return _maximal(f, _fejer_plan(f.basis.size))


def maximal_batch(b: Basis, values: np.ndarray, ws: Sequence[WeightSequence | None]) -> np.ndarray:
    """Maximal functions of a batch of functions for several means in one sweep each.

    ``None`` in ``ws`` selects the Fejer means.  Returns shape ``(B, len(ws), M_N)``.
    """
    b.require_dense()
    values = np.atleast_2d(values)
    nums, invs, start = _stack([_fejer_plan(b.size) if w is None else _t_plan(w, b.size)
                                for w in ws])
    coeffs = forward(b, values)
    out = np.empty((values.shape[0], len(ws), b.size))
    for i in range(values.shape[0]):
        out[i] = np.maximum(sweep(b, coeffs[i], nums, invs, start), np.abs(values[i])[None, :])
    return out


def abel_coefficient(w: WeightSequence, n: int) -> float:
    """``(2 q_{n-1} (n-1) - Q_n + q_0) / Q_n``.

    Abel summation writes ``T_n f`` through ``sigma_1 f .. sigma_{n-1} f``; for
    non-decreasing weights the absolute coefficient sum is this number.
    """
    if n < 2:
        raise ValueError("n must be >= 2")
    Qn = w.Q(n)
    if Qn <= 0:
        raise ZeroDivisionError(f"Q_{n} = 0 for {w.label}")
    return (2.0 * w.q(n - 1) * (n - 1) - Qn + w.q(0)) / Qn


def domination_bound(w: WeightSequence, n: int) -> float:
    """Certified ``c_n`` with ``|T_n f| <= c_n sigma* f`` pointwise.

    1 for non-increasing weights, :func:`abel_coefficient` for non-decreasing ones.
    """
    if n < 2:
        raise ValueError("n must be >= 2")
    if w.monotonicity == NON_DECREASING:
        return abel_coefficient(w, n)
    return 1.0


def domination_bounds(w: WeightSequence, n_max: int) -> np.ndarray:
    """``c_n`` for ``n = 0 .. n_max`` (``nan`` where ``Q_n = 0`` or ``n < 2``)."""
    Q = w.Q_array(n_max)
    out = np.full(n_max + 1, np.nan)
    n = np.arange(2, n_max + 1)
    ok = Q[n] > 0
    if w.monotonicity == NON_DECREASING:
        q = w.q_array(n_max)
        with np.errstate(divide="ignore", invalid="ignore"):
            c = (2.0 * q[n - 1] * (n - 1) - Q[n] + q[0]) / Q[n]
        out[n[ok]] = c[ok]
    else:
        out[n[ok]] = 1.0
    return out


def domination_excess(b: Basis, values: np.ndarray, w: WeightSequence,
                      sigma_star: np.ndarray) -> np.ndarray:
    """``max_n (|T_n f| - c_n sigma* f)`` per point, ``n`` over ``[start, M_N]``.

    Non-positive (up to rounding) is the domination claim.  ``values`` and
    ``sigma_star`` may be batches of shape ``(B, M_N)``.
    """
    b.require_dense()
    values = np.atleast_2d(values)
    sigma_star = np.atleast_2d(sigma_star)
    num, inv, start = _t_plan(w, b.size)
    c = domination_bounds(w, b.size)
    start = max(start, 2)
    slopes = np.nan_to_num(c, nan=0.0)[None, :]
    coeffs = forward(b, values)
    out = np.empty(values.shape)
    for i in range(values.shape[0]):
        out[i] = sweep(b, coeffs[i], num[None, :], inv[None, :], np.array([start]),
                       slopes=slopes, ref=sigma_star[i])[0]
    return out


# -- martingales and Hardy norms ----------------------------------------------


@dataclass(frozen=True, eq=False)
class Martingale:
    """Levels ``f^(0), ..., f^(N)``; level ``n`` is constant on level-n cylinders."""

    levels: tuple[GridFunction, ...]

    @property
    def basis(self) -> Basis:
        return self.levels[0].basis

    def compatibility_error(self) -> float:
        """Largest gap between ``f^(n)`` and the level-n averages of ``f^(n+1)``."""
        b = self.basis
        worst = 0.0
        for n in range(len(self.levels) - 1):
            avg = conditional_expectation(self.levels[n + 1].values, b, n)
            worst = max(worst, float(np.abs(avg - self.levels[n].values).max()))
        return worst


def conditional_expectation(values: np.ndarray, b: Basis, n: int) -> np.ndarray:
    """Average over each level-``n`` cylinder, spread back onto its points."""
    Mn = b.Mk[n]
    avg = np.asarray(values).reshape(b.size // Mn, Mn).mean(axis=0)
    return np.tile(avg, b.size // Mn)


def martingale_from_function(f: GridFunction) -> Martingale:
    b = f.basis
    return Martingale(tuple(GridFunction(b, conditional_expectation(f.values, b, n))
                            for n in range(b.N + 1)))


def maximal_function(mart: Martingale) -> GridFunction:
    """``f* = max_n |f^(n)|``."""
    return GridFunction(mart.basis, np.max([np.abs(g.values) for g in mart.levels], axis=0))


def hp_norm(f: GridFunction, p: float) -> float:
    """``||f*||_p`` for the martingale generated by ``f`` on levels ``0..N``."""
    return lp_norm(maximal_function(martingale_from_function(f)), p)


# -- atoms ----------------------------------------------------------------------


@dataclass(frozen=True)
class AtomCheck:
    ok: bool
    reasons: tuple[str, ...] = ()

    def __bool__(self) -> bool:
        return self.ok


def validate_atom(a: GridFunction, I: Cylinder, p: float, tol: float = 1e-10) -> AtomCheck:
    """Check the three p-atom conditions on the cylinder ``I``.

    Tolerances are relative to the atom's own scale: the sup bound
    ``mu(I)^(-1/p)`` for pointwise tests and ``mu(I)^(1-1/p)`` (the largest
    possible ``|int_I a|``) for the mean, each floored at 1.
    """
    b = a.basis
    mu = float(I.measure(b))
    bound = mu ** (-1.0 / p)
    inside = I.mask(b)
    vals = a.values
    reasons = []
    mean = vals[inside].sum() / b.size
    if abs(mean) > tol * max(1.0, bound * mu):
        reasons.append("mean")
    if np.abs(vals).max() > bound * (1 + tol):
        reasons.append("sup")
    if (~inside).any() and np.abs(vals[~inside]).max() > tol * max(1.0, bound):
        reasons.append("support")
    return AtomCheck(not reasons, tuple(reasons))


@dataclass
class AtomicDecomposition:
    """Triples ``(mu_k, a_k, I_k)`` making up ``sum mu_k a_k``."""

    p: float
    terms: list[tuple[float, GridFunction, Cylinder]] = field(default_factory=list)

    def assemble(self) -> GridFunction:
        b = self.terms[0][1].basis
        return GridFunction(b, sum(mu * a.values for mu, a, _ in self.terms))


def hp_atomic_bound(dec: AtomicDecomposition) -> float:
    """``(sum |mu_k|^p)^(1/p)``; raises if any atom fails :func:`validate_atom`."""
    for k, (_, a, I) in enumerate(dec.terms):
        check = validate_atom(a, I, dec.p)
        if not check:
            raise ValueError(f"term {k} is not a {dec.p}-atom: {', '.join(check.reasons)}")
    return float(sum(abs(mu) ** dec.p for mu, _, _ in dec.terms) ** (1.0 / dec.p))
