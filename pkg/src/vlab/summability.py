"""Weight sequences, partial sums, T means, Noerlund means and T kernels.

Every mean here is a spectral multiplier.  With ``S_0 = 0`` and
``S_k f = sum_{j<k} c_j psi_j``::

    T_n f = (1/Q_n) sum_{k<n} q_k S_k f = sum_{j<n} c_j psi_j (Q_n - Q_{j+1}) / Q_n
    t_n f = (1/Q_n) sum_{k=1}^{n} q_{n-k} S_k f = sum_{j<n} c_j psi_j Q_{n-j} / Q_n
    sigma_n f = (1/n) sum_{k=1}^{n} S_k f = sum_{j<n} c_j psi_j (n - j) / n

so a mean costs one synthesis.  ``t_kernel`` and ``partial_sums_prefix`` take
the direct route instead and serve as cross-checks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import mpmath
import numpy as np

from .group import Basis
from .spectral import (
    GridFunction,
    SpectralFunction,
    character_phases,
    forward,
    inverse,
    unit_roots,
)

KINDS = ("fejer", "cesaro", "inverse_cesaro", "power", "riesz", "norlund_log", "iterlog")
NON_INCREASING = "non-increasing"
NON_DECREASING = "non-decreasing"

# Q_n up to this index is an exact running sum; beyond it a closed form is used.
EXACT_LIMIT = 2**20


@dataclass(frozen=True)
class WeightSequence:
    """A named generator ``k -> q_k`` with ``Q_n = sum_{k<n} q_k``.

    Monotonicity is declared for ``k >= 1``: ``q_0`` only ever multiplies
    ``S_0 f = 0`` and ``D_0 = 0``, and Riesz/iterated-log weights set it to 0.
    """

    kind: str
    alpha: float | None = None
    beta: int | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown weight kind {self.kind!r}; expected one of {KINDS}")
        if self.kind in ("cesaro", "inverse_cesaro", "power"):
            if self.alpha is None or not 0 < self.alpha < 1:
                raise ValueError(f"{self.kind} needs 0 < alpha < 1, got {self.alpha}")
        elif self.kind == "iterlog":
            if self.alpha is None or self.alpha <= 0:
                raise ValueError(f"iterlog needs alpha > 0, got {self.alpha}")
            if self.beta is None or int(self.beta) != self.beta or self.beta < 1:
                raise ValueError(f"iterlog needs integer beta >= 1, got {self.beta}")
            object.__setattr__(self, "beta", int(self.beta))
        elif self.alpha is not None or self.beta is not None:
            raise ValueError(f"{self.kind} takes no parameters")
        if self.alpha is not None:
            object.__setattr__(self, "alpha", float(self.alpha))

    @property
    def monotonicity(self) -> str:
        return NON_DECREASING if self.kind == "iterlog" else NON_INCREASING

    @property
    def label(self) -> str:
        if self.kind == "iterlog":
            return f"iterlog:{self.alpha:g},{self.beta}"
        if self.alpha is not None:
            return f"{self.kind}:{self.alpha:g}"
        return self.kind

    # -- single terms -----------------------------------------------------

    def q(self, k: int) -> float:
        k = int(k)
        if k < 0:
            raise ValueError("weight index must be >= 0")
        if k < EXACT_LIMIT:
            return float(_terms(self, _bucket(k + 1))[k])
        return _q_far(self, k)

    def q_array(self, n: int) -> np.ndarray:
        """``q_0, ..., q_{n-1}``."""
        return _terms(self, _bucket(n))[:n].copy()

    # -- cumulative sums --------------------------------------------------

    def Q(self, n: int) -> float:
        n = int(n)
        if n < 0:
            raise ValueError("Q index must be >= 0")
        if n <= EXACT_LIMIT:
            return float(_cumulative(self, _bucket(n + 1))[n])
        return _Q_far(self, n)

    def Q_array(self, n_max: int) -> np.ndarray:
        """``Q_0, ..., Q_{n_max}`` with ``Q_0 = 0``."""
        return _cumulative(self, _bucket(n_max + 1))[: n_max + 1].copy()


def weights(kind: str, alpha: float | None = None, beta: int | None = None) -> WeightSequence:
    return WeightSequence(kind, alpha, beta)


def parse_weight(text: str) -> WeightSequence:
    """Parse ``"riesz"``, ``"power:0.5"`` or ``"iterlog:1,2"``."""
    kind, _, params = text.strip().partition(":")
    kind = kind.strip()
    vals = [p.strip() for p in params.split(",") if p.strip()] if params else []
    try:
        if kind == "iterlog":
            if len(vals) != 2:
                raise ValueError
            return WeightSequence(kind, float(vals[0]), int(vals[1]))
        if len(vals) > 1:
            raise ValueError
        return WeightSequence(kind, float(vals[0]) if vals else None)
    except ValueError as exc:
        if exc.args:
            raise
        raise ValueError(f"cannot parse weight spec {text!r}") from None


def _bucket(n: int) -> int:
    return max(1024, 1 << (max(int(n), 1) - 1).bit_length())


def _iterlog(w: WeightSequence, k: np.ndarray | float) -> np.ndarray:
    with np.errstate(divide="ignore", invalid="ignore"):
        v = w.alpha * np.log(np.asarray(k, dtype=np.float64))
        for _ in range(w.beta - 1):
            v = np.where(v > 0, np.log(np.where(v > 0, v, 1.0)), -np.inf)
    return np.where(np.isfinite(v) & (v > 0), v, 0.0)


@lru_cache(maxsize=32)
def _terms(w: WeightSequence, length: int) -> np.ndarray:
    k = np.arange(length, dtype=np.float64)
    if w.kind == "fejer":
        q = np.ones(length)
    elif w.kind in ("cesaro", "inverse_cesaro"):
        # A_k^{alpha-1} by A_k = A_{k-1} (k + alpha - 1) / k, A_0 = 1
        ratios = np.ones(length)
        ratios[1:] = (k[1:] + w.alpha - 1.0) / k[1:]
        q = np.cumprod(ratios)
    elif w.kind == "power":
        q = np.ones(length)
        q[1:] = k[1:] ** (w.alpha - 1.0)
    elif w.kind in ("riesz", "norlund_log"):
        q = np.zeros(length)
        q[1:] = 1.0 / k[1:]
    else:
        q = np.zeros(length)
        q[1:] = _iterlog(w, k[1:])
    q.setflags(write=False)
    return q


@lru_cache(maxsize=32)
def _cumulative(w: WeightSequence, length: int) -> np.ndarray:
    Q = np.empty(length)
    Q[0] = 0.0
    np.cumsum(_terms(w, length - 1), out=Q[1:])
    Q.setflags(write=False)
    return Q


@lru_cache(maxsize=256)
def _q_far(w: WeightSequence, k: int) -> float:
    if w.kind == "fejer":
        return 1.0
    if w.kind in ("riesz", "norlund_log"):
        return 1.0 / k
    if w.kind == "power":
        return float(mpmath.power(k, w.alpha - 1.0))
    if w.kind == "iterlog":
        v = w.alpha * math.log(k)
        for _ in range(w.beta - 1):
            v = math.log(v) if v > 0 else 0.0
        return max(v, 0.0)
    with mpmath.workdps(30):
        return float(mpmath.rf(k + 1, w.alpha - 1.0) / mpmath.gamma(w.alpha))


@lru_cache(maxsize=256)
def _Q_far(w: WeightSequence, n: int) -> float:
    """Closed forms / Euler-Maclaurin for ``Q_n`` past the exact range."""
    with mpmath.workdps(30):
        if w.kind == "fejer":
            return float(n)
        if w.kind in ("riesz", "norlund_log"):
            return float(mpmath.digamma(n) + mpmath.euler)
        if w.kind in ("cesaro", "inverse_cesaro"):
            # sum_{k<n} A_k^{alpha-1} = A_{n-1}^{alpha}
            return float(mpmath.rf(n, w.alpha) / mpmath.gamma(w.alpha + 1))
        if w.kind == "power":
            s = 1.0 - w.alpha
            return float(1 + mpmath.zeta(s) - mpmath.zeta(s, n))
        return _iterlog_tail(w, n)


def _iterlog_tail(w: WeightSequence, n: int) -> float:
    K = EXACT_LIMIT
    head = float(_cumulative(w, _bucket(K + 1))[K])

    def g(t):
        v = w.alpha * mpmath.log(t)
        for _ in range(w.beta - 1):
            v = mpmath.log(v) if v > 0 else mpmath.mpf(0)
        return v if v > 0 else mpmath.mpf(0)

    hi = mpmath.mpf(n - 1)
    pts = [mpmath.mpf(K)]
    while pts[-1] * 2 < hi:
        pts.append(pts[-1] * 2)
    pts.append(hi)
    integral = mpmath.quad(g, pts)
    dg = mpmath.diff(g, hi) - mpmath.diff(g, mpmath.mpf(K))
    return float(head + integral + (g(mpmath.mpf(K)) + g(hi)) / 2 + dg / 12)


# -- partial sums and means ---------------------------------------------------


@dataclass(frozen=True, eq=False)
class MeanResult:
    value: GridFunction
    n: int
    kind: str


def partial_sums_prefix(c: SpectralFunction, n_max: int) -> np.ndarray:
    """Rows ``S_0 f, ..., S_{n_max} f`` built incrementally, shape ``(n_max+1, M_N)``."""
    b = c.basis
    if not 0 <= n_max <= b.size:
        raise IndexError(f"n_max {n_max} outside [0, {b.size}]")
    roots = unit_roots(b.phase_denominator)
    out = np.zeros((n_max + 1, b.size), dtype=np.complex128)
    acc = np.zeros(b.size, dtype=np.complex128)
    for start in range(0, n_max, 256):
        n = np.arange(start, min(start + 256, n_max))
        terms = c.coeffs[n, None] * roots[character_phases(b, n)]
        block = np.cumsum(terms, axis=0) + acc
        out[n + 1] = block
        acc = block[-1]
    return out


def t_multiplier(w: WeightSequence, n: int, size: int) -> np.ndarray:
    """``(Q_n - Q_{j+1}) / Q_n`` for ``j < min(n, size)``, zero above."""
    Qn = w.Q(n)
    if Qn <= 0:
        raise ZeroDivisionError(f"Q_{n} = 0 for {w.label}; T_{n} undefined")
    out = np.zeros(size)
    top = min(n, size)
    Q = w.Q_array(top)
    out[:top] = (Qn - Q[1 : top + 1]) / Qn
    return out


def t_mean(f: GridFunction, w: WeightSequence, n: int) -> MeanResult:
    """``T_n f``.  Any ``n >= 1`` is accepted; past ``M_N`` the partial sums equal ``f``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    b = f.basis
    mult = t_multiplier(w, n, b.size)
    vals = inverse(b, forward(b, f.values) * mult)
    return MeanResult(GridFunction(b, vals), n, w.label)


def fejer_mean(f: GridFunction, n: int) -> GridFunction:
    """``sigma_n f = (1/n) sum_{k=1}^{n} S_k f``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    b = f.basis
    j = np.arange(b.size)
    mult = np.where(j < n, (n - j) / n, 0.0)
    return GridFunction(b, inverse(b, forward(b, f.values) * mult))


def norlund_mean(f: GridFunction, w: WeightSequence, n: int) -> MeanResult:
    """``t_n f = (1/Q_n) sum_{k=1}^{n} q_{n-k} S_k f`` for ``1 <= n <= M_N``."""
    b = f.basis
    if not 1 <= n <= b.size:
        raise IndexError(f"n {n} outside [1, {b.size}]")
    Q = w.Q_array(n)
    if Q[n] <= 0:
        raise ZeroDivisionError(f"Q_{n} = 0 for {w.label}")
    mult = np.zeros(b.size)
    mult[:n] = Q[n - np.arange(n)] / Q[n]
    vals = inverse(b, forward(b, f.values) * mult)
    return MeanResult(GridFunction(b, vals), n, w.label)


def _dirichlet_rows(b: Basis, n: int):
    """Yield ``(k, D_k)`` for ``k = 0 .. n`` by adding one character at a time."""
    roots = unit_roots(b.phase_denominator)
    D = np.zeros(b.size, dtype=np.complex128)
    yield 0, D.copy()
    for start in range(0, n, 256):
        ks = np.arange(start, min(start + 256, n))
        rows = roots[character_phases(b, ks)]
        for k, row in zip(ks, rows):
            D += row
            yield int(k) + 1, D.copy()


def t_kernel(b: Basis, w: WeightSequence, n: int) -> GridFunction:
    """``F_n = (1/Q_n) sum_{k<n} q_k D_k``, summed directly over Dirichlet kernels."""
    if not 1 <= n <= b.size:
        raise IndexError(f"n {n} outside [1, {b.size}]")
    Qn = w.Q(n)
    if Qn <= 0:
        raise ZeroDivisionError(f"Q_{n} = 0 for {w.label}")
    q = w.q_array(n)
    F = np.zeros(b.size, dtype=np.complex128)
    for k, D in _dirichlet_rows(b, n - 1):
        F += q[k] * D
    return GridFunction(b, F / Qn)


@dataclass(frozen=True)
class AbelCheck:
    """Both sides of the Abel-summed weight identity.

    ``lhs = sum_{k=1}^{n-1} q_k = Q_n - q_0``;
    ``rhs = sum_{j=0}^{n-2} (q_j - q_{j+1}) j + q_{n-1} (n-1)``.
    ``kernel_gap`` is the sup-distance between ``F_n`` and its Fejer-kernel form.
    """

    n: int
    lhs: float
    rhs: float
    Q_n: float
    q_0: float
    kernel_gap: float | None = None

    @property
    def rel_gap(self) -> float:
        scale = max(abs(self.lhs), abs(self.rhs))
        return 0.0 if scale == 0 else abs(self.lhs - self.rhs) / scale


def abel_identity_check(w: WeightSequence, n: int, basis: Basis | None = None) -> AbelCheck:
    if n < 2:
        raise ValueError("n must be >= 2")
    q = w.q_array(n).tolist()
    lhs = math.fsum(q[1:])
    rhs = math.fsum([(q[j] - q[j + 1]) * j for j in range(n - 1)] + [q[n - 1] * (n - 1)])
    gap = None
    if basis is not None:
        gap = _kernel_gap(basis, w, n, q)
    return AbelCheck(n, lhs, rhs, math.fsum(q), q[0], gap)


def _kernel_gap(b: Basis, w: WeightSequence, n: int, q: list[float]) -> float:
    # j K_j = sum_{k=1}^{j} D_k  (Fejer kernel times j)
    direct = t_kernel(b, w, n).values
    Qn = w.Q(n)
    E = np.zeros(b.size, dtype=np.complex128)
    acc = np.zeros(b.size, dtype=np.complex128)
    for j, D in _dirichlet_rows(b, n - 1):
        E += D
        coef = q[n - 1] if j == n - 1 else q[j] - q[j + 1]
        acc += coef * E
    return float(np.abs(acc / Qn - direct).max())


@dataclass(frozen=True)
class ConditionReport:
    """Finite-range proxies for the growth conditions on ``q``.

    ``tmeans_sup``: ``sup n q_{n-1} / Q_n`` (finite means ``q_{n-1}/Q_n = O(1/n)``).
    ``cond1_inf`` / ``cond1_tail``: ``inf`` over ``1 <= n <= n_max`` and the value
    at ``n_max`` of ``n q_{n+1} / Q_{n+2}``.  ``Q_max`` tracks regularity.
    """

    n_max: int
    tmeans_sup: float
    cond1_inf: float
    cond1_tail: float
    Q_max: float


def condition_checks(w: WeightSequence, n_max: int) -> ConditionReport:
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    q = w.q_array(n_max + 2)
    Q = w.Q_array(n_max + 2)
    n = np.arange(1, n_max + 1)
    with np.errstate(divide="ignore", invalid="ignore"):
        tm = np.where(Q[n] > 0, n * q[n - 1] / Q[n], 0.0)
        c1 = np.where(Q[n + 2] > 0, n * q[n + 1] / Q[n + 2], 0.0)
    return ConditionReport(n_max, float(tm.max()), float(c1.min()), float(c1[-1]), float(Q[n_max]))
