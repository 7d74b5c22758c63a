"""The divergence martingale for T-means below ``p = 1/2``, checked at finite depth.

With ``r = 1/p`` an integer the function has Fourier coefficients
``M_{a_k}^(r-1) / a_k`` on each index block ``[M_{a_k}, M_{a_k+1})`` and zero
elsewhere, where ``a_0 < a_1 < ...`` grows fast enough that

    (3)  lam * sum_{j<k} M_{a_j}^r / a_j  <  M_{a_k}^r / a_k
    (4)  32 lam * M_{a_{k-1}}^r / a_{k-1}  <  M_{a_k}^(r-2) / a_k

Both are integer inequalities once cleared of denominators, so the search and
the checks run in exact arithmetic.  ``T_{M+2} f`` with ``M = M_{a_k}`` splits
into ``I`` (partial sums up to ``S_M``) and ``II = (q_{M+1}/Q_{M+2}) S_{M+1} f``.
``|I|`` has a closed-form bound and ``II`` is evaluated pointwise from Dirichlet
kernels, so the lower bound ``|II| - |I|`` never needs dense storage.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .group import Basis, Cylinder, build_basis
from .operators import AtomicDecomposition
from .rng import random_digits
from .spectral import GridFunction, SpectralFunction, dirichlet_eval, forward, inverse, rademacher
from .summability import NON_DECREASING, WeightSequence, partial_sums_prefix, t_mean


class ChainViolation(RuntimeError):
    """A certified lower bound failed numerically; points at an implementation bug."""

    def __init__(self, report: "ChainReport"):
        super().__init__(f"lower bound chain failed at k={report.k} ({report.weight}): "
                         f"min margin {report.min_margin:.6g}")
        self.report = report


@dataclass(frozen=True)
class CounterexampleSpec:
    """Exponent ``p = 1/r``, radix data and the block levels ``alphas``.

    ``radix`` is either one integer (every ``m_k`` equal) or an explicit tuple,
    which must then reach level ``alphas[-1] + 1``.
    """

    p: Fraction
    radix: int | tuple[int, ...]
    alphas: tuple[int, ...]

    def __post_init__(self):
        p = Fraction(self.p)
        if not 0 < p < Fraction(1, 2) or p.numerator != 1:
            raise ValueError(f"p must be 1/r with integer r > 2, got {p}")
        object.__setattr__(self, "p", p)
        radix = self.radix if isinstance(self.radix, int) else tuple(int(m) for m in self.radix)
        if min([radix] if isinstance(radix, int) else radix) < 2:
            raise ValueError("radices must be >= 2")
        object.__setattr__(self, "radix", radix)
        alphas = tuple(int(a) for a in self.alphas)
        if not alphas or alphas[0] < 1 or any(b <= a for a, b in zip(alphas, alphas[1:])):
            raise ValueError("alphas must be a strictly increasing sequence of positive integers")
        object.__setattr__(self, "alphas", alphas)
        if not isinstance(radix, int) and len(radix) < alphas[-1] + 1:
            raise ValueError(f"radix tuple covers {len(radix)} levels, need {alphas[-1] + 1}")

    @property
    def r(self) -> int:
        return self.p.denominator

    @property
    def lam(self) -> int:
        return self.radix if isinstance(self.radix, int) else max(self.radix)

    @property
    def min_radix(self) -> int:
        return self.radix if isinstance(self.radix, int) else min(self.radix)

    def M(self, level: int) -> int:
        return _M(self.radix, level)

    def basis(self, level: int) -> Basis:
        if isinstance(self.radix, int):
            return build_basis(self.radix, level)
        return build_basis(self.radix[:level], level)

    def coefficient(self, k: int) -> Fraction:
        """``M_{a_k}^(r-1) / a_k``, the coefficient on block ``k``."""
        a = self.alphas[k]
        return Fraction(self.M(a) ** (self.r - 1), a)

    def block(self, k: int) -> tuple[int, int]:
        """Index range ``[M_{a_k}, M_{a_k+1})`` carrying block ``k``."""
        a = self.alphas[k]
        return self.M(a), self.M(a + 1)


def _M(radix, level: int) -> int:
    if isinstance(radix, int):
        return radix**level
    if level > len(radix):
        raise ValueError(f"level {level} beyond the {len(radix)} given radices")
    return math.prod(radix[:level])


def _lam(radix) -> int:
    return radix if isinstance(radix, int) else max(radix)


def _cond3(radix, r: int, prev: Sequence[int], a: int) -> bool:
    lam = _lam(radix)
    lhs = lam * sum(Fraction(_M(radix, e) ** r, e) for e in prev)
    return lhs < Fraction(_M(radix, a) ** r, a)


def _cond4(radix, r: int, prev: int, a: int) -> bool:
    # 32 lam M_prev^r / prev < M_a^(r-2) / a, cross-multiplied
    return 32 * _lam(radix) * _M(radix, prev) ** r * a < _M(radix, a) ** (r - 2) * prev


def find_alphas(p: Fraction | str = Fraction(1, 3), m: int | Sequence[int] = 2,
                count: int = 3, alpha0: int = 1) -> CounterexampleSpec:
    """Greedy minimal levels: each ``a_k`` is the least ``a > a_{k-1}`` meeting (3) and (4)."""
    p = Fraction(p)
    if count < 2:
        raise ValueError("count must be >= 2")
    if alpha0 < 1:
        raise ValueError("alpha0 must be >= 1")
    if not 0 < p < Fraction(1, 2) or p.numerator != 1:
        raise ValueError(f"p must be 1/r with integer r > 2, got {p}")
    radix = m if isinstance(m, int) else tuple(m)
    r = p.denominator
    alphas = [alpha0]
    while len(alphas) < count:
        a = alphas[-1] + 1
        while not (_cond4(radix, r, alphas[-1], a) and _cond3(radix, r, alphas, a)):
            a += 1
        alphas.append(a)
    return CounterexampleSpec(p, radix, tuple(alphas))


@dataclass(frozen=True)
class ConditionRow:
    k: int
    cond3: bool
    cond4: bool | None  # None at k = 0, where (4) does not apply


def check_conditions(spec: CounterexampleSpec) -> list[ConditionRow]:
    """Exact re-check of (3) and (4) for every ``k``."""
    rows = []
    al = spec.alphas
    for k, a in enumerate(al):
        c3 = _cond3(spec.radix, spec.r, al[:k], a)
        c4 = _cond4(spec.radix, spec.r, al[k - 1], a) if k else None
        rows.append(ConditionRow(k, c3, c4))
    return rows


@dataclass(frozen=True)
class SummabilityReport:
    """Partial sum of ``a_k^(-p)`` with a certified bound on the rest.

    Any continuation obeying (4) has ``a_{k+1} >= rho a_k``, so the tail is at
    most ``a_K^(-p) rho^(-p) / (1 - rho^(-p))``.
    """

    partial_sum: float
    last_increment: float
    rho: float
    tail_bound: float

    @property
    def certified(self) -> bool:
        return self.rho > 1 and math.isfinite(self.tail_bound)

    def increment_below(self, eps: float = 1e-3) -> bool:
        return self.last_increment < eps


def condition2_report(spec: CounterexampleSpec) -> SummabilityReport:
    p = float(spec.p)
    terms = [a ** -p for a in spec.alphas]
    r = spec.r
    # M_a^(r-2) > M_prev^r with min_m^a <= M_a <= lam^a gives the ratio floor
    rho = r / (r - 2) * math.log(spec.min_radix) / math.log(spec.lam)
    if rho > 1:
        g = rho ** -p
        tail = terms[-1] * g / (1 - g)
    else:
        tail = math.inf
    return SummabilityReport(math.fsum(terms), terms[-1], rho, tail)


# -- dense tier -----------------------------------------------------------------


def _block_indicator(b: Basis, level: int) -> np.ndarray:
    """``D_{M_level}`` on every point: ``M_level`` on ``I_level``, 0 elsewhere."""
    return np.where(Cylinder(level).mask(b), float(b.Mk[level]), 0.0)


def _block_values(spec: CounterexampleSpec, b: Basis, k: int) -> np.ndarray:
    a = spec.alphas[k]
    return _block_indicator(b, a + 1) - _block_indicator(b, a)


def build_dense(spec: CounterexampleSpec, k_max: int) -> GridFunction:
    """``f = sum_{k <= k_max} coef_k (D_{M_{a_k+1}} - D_{M_{a_k}})`` at level ``a_{k_max} + 1``."""
    b = spec.basis(spec.alphas[k_max] + 1)
    b.require_dense()
    vals = np.zeros(b.size)
    for k in range(k_max + 1):
        vals += float(spec.coefficient(k)) * _block_values(spec, b, k)
    return GridFunction(b, vals)


def expected_coefficients(spec: CounterexampleSpec, k_max: int) -> np.ndarray:
    """The block coefficient law on ``[0, M_{a_{k_max}+1})``."""
    size = spec.M(spec.alphas[k_max] + 1)
    c = np.zeros(size)
    for k in range(k_max + 1):
        lo, hi = spec.block(k)
        c[lo:hi] = float(spec.coefficient(k))
    return c


def atoms(spec: CounterexampleSpec, k_max: int) -> AtomicDecomposition:
    """``f = sum (lam / a_k) a_k`` with ``a_k = (M^(r-1)/lam)(D_{M_{a_k+1}} - D_{M_{a_k}})``."""
    b = spec.basis(spec.alphas[k_max] + 1)
    b.require_dense()
    dec = AtomicDecomposition(float(spec.p))
    for k in range(k_max + 1):
        a = spec.alphas[k]
        scale = Fraction(spec.M(a) ** (spec.r - 1), spec.lam)
        dec.terms.append((spec.lam / a, GridFunction(b, float(scale) * _block_values(spec, b, k)),
                          Cylinder(a)))
    return dec


def hp_bound(spec: CounterexampleSpec, k_max: int | None = None) -> float:
    """``lam (sum_{k <= k_max} a_k^(-p))^(1/p)``, the atomic bound for the partial sum."""
    k_max = len(spec.alphas) - 1 if k_max is None else k_max
    p = float(spec.p)
    return spec.lam * math.fsum(a ** -p for a in spec.alphas[: k_max + 1]) ** spec.r


def hp_bound_limit(spec: CounterexampleSpec) -> float:
    """Bound for the full infinite sum, using the certified tail of :func:`condition2_report`."""
    rep = condition2_report(spec)
    return spec.lam * (rep.partial_sum + rep.tail_bound) ** spec.r


# -- analytic tier -----------------------------------------------------------------


def _require_k(spec: CounterexampleSpec, k: int) -> None:
    if not 1 <= k < len(spec.alphas):
        raise IndexError(f"k must be in [1, {len(spec.alphas) - 1}], got {k}")


def mean_split_ratio(spec: CounterexampleSpec, k: int, w: WeightSequence) -> float:
    """``q_{M+1} / Q_{M+2}`` with ``M = M_{a_k}``."""
    M = spec.M(spec.alphas[k])
    Q = w.Q(M + 2)
    if Q <= 0:
        raise ZeroDivisionError(f"Q_{M + 2} = 0 for {w.label}")
    return w.q(M + 1) / Q


def term_II_exact(spec: CounterexampleSpec, k: int, x: Sequence[int], w: WeightSequence) -> complex:
    """``II(x) = (q_{M+1}/Q_{M+2}) (coef_k psi_M(x) + S_M f(x))`` with ``M = M_{a_k}``.

    ``S_M f = sum_{j<k} coef_j (D_{M_{a_j+1}} - D_{M_{a_j}})`` since no
    coefficients sit between ``M_{a_{k-1}+1}`` and ``M``; ``psi_M`` is the
    Rademacher function ``r_{a_k}``.  Only the first ``a_k + 1`` digits of ``x``
    are read.
    """
    _require_k(spec, k)
    return _II_evaluator(spec, k, w)(x)


def _II_evaluator(spec: CounterexampleSpec, k: int, w: WeightSequence):
    a = spec.alphas[k]
    b = spec.basis(a + 1)
    ratio = mean_split_ratio(spec, k, w)
    lead = float(spec.coefficient(k))
    blocks = [(float(spec.coefficient(j)),) + spec.block(j) for j in range(k)]

    def II(x: Sequence[int]) -> complex:
        x = tuple(int(d) for d in x[: a + 1])
        s = 0j
        for coef, lo, hi in blocks:
            s += coef * (dirichlet_eval(b, hi, x) - dirichlet_eval(b, lo, x))
        return ratio * (lead * rademacher(b, a, x) + s)

    return II


def sj_bound(spec: CounterexampleSpec, k: int) -> float:
    """``4 lam M_{a_{k-1}}^r / a_{k-1}``, bounding ``|S_j f|`` for ``j <= M_{a_k}``."""
    _require_k(spec, k)
    prev = spec.alphas[k - 1]
    return float(Fraction(4 * spec.lam * spec.M(prev) ** spec.r, prev))


def term_I_bound(spec: CounterexampleSpec, k: int) -> float:
    """``|I| <= (Q_{M+1}/Q_{M+2}) max_j |S_j f| <= sj_bound``."""
    return sj_bound(spec, k)


def divergence_ratio(spec: CounterexampleSpec, k: int) -> float:
    """``M_{a_k}^(r-2) / (16 a_k)``: a weak-L_p lower bound for ``T_{M_{a_k}+2} f``."""
    a = spec.alphas[k]
    return float(Fraction(spec.M(a) ** (spec.r - 2), 16 * a))


def chain_threshold(spec: CounterexampleSpec, k: int, w: WeightSequence) -> float:
    """``M^(r-2)/(16 a_k)`` for non-increasing weights, ``M^(r-2)/(8 a_k)`` for non-decreasing."""
    a = spec.alphas[k]
    div = 8 if w.monotonicity == NON_DECREASING else 16
    return float(Fraction(spec.M(a) ** (spec.r - 2), div * a))


def certificate_constant(spec: CounterexampleSpec, k: int, w: WeightSequence) -> float:
    """``c_k = M q_{M+1} / Q_{M+2}``.

    Condition (4) makes ``|I| < M^(r-2) / (8 a_k)`` and ``|II| >= c_k M^(r-2) / (4 a_k)``,
    so the threshold is guaranteed once ``c_k >= 3/4`` (``/16``) or ``c_k >= 1`` (``/8``).
    """
    return spec.M(spec.alphas[k]) * mean_split_ratio(spec, k, w)


def sample_points(spec: CounterexampleSpec, k: int, count: int) -> np.ndarray:
    """The origin plus ``count - 1`` points from the counter generator seeded by ``k``."""
    b = spec.basis(spec.alphas[k] + 1)
    pts = random_digits(k, b.m, max(count - 1, 0))
    return np.vstack([np.zeros((1, b.N), dtype=np.int64), pts])[:count]


@dataclass(frozen=True)
class ChainReport:
    k: int
    weight: str
    path: str
    threshold: float
    i_bound: float
    certificate: float
    certified: bool
    n_points: int
    min_abs_II: float
    min_margin: float
    fraction_above: float

    @property
    def passed(self) -> bool:
        return self.min_margin >= 0


def lower_bound_chain(spec: CounterexampleSpec, k: int, w: WeightSequence,
                      samples: int = 10_000, points: np.ndarray | None = None) -> ChainReport:
    """Check ``|II(x)| - |I|_bound >= threshold`` at sampled (or given) points.

    ``min_margin`` is the smallest ``|II| - |I|_bound - threshold``.  Failures
    raise :class:`ChainViolation` only where the certificate applies; weights
    outside it (e.g. Riesz) come back flagged with ``certified = False``.
    """
    _require_k(spec, k)
    pts = sample_points(spec, k, samples) if points is None else np.atleast_2d(points)
    ibound = term_I_bound(spec, k)
    thr = chain_threshold(spec, k, w)
    c = certificate_constant(spec, k, w)
    nondec = w.monotonicity == NON_DECREASING
    certified = c >= (1.0 if nondec else 0.75)
    II = _II_evaluator(spec, k, w)
    lows = np.array([abs(II(x)) for x in pts])
    lb = lows - ibound
    rep = ChainReport(k, w.label, "2b" if nondec else "1b", thr, ibound, c, certified,
                      len(pts), float(lows.min()), float((lb - thr).min()),
                      float(np.mean(lb >= thr)))
    if certified and not rep.passed:
        raise ChainViolation(rep)
    return rep


# -- dense cross-checks --------------------------------------------------------------


@dataclass(frozen=True)
class DenseChainReport:
    k: int
    min_abs_T: float
    threshold: float
    max_abs_I: float
    i_bound: float
    max_abs_S: float
    II_rel_err: float

    @property
    def passed(self) -> bool:
        return self.min_abs_T >= self.threshold and self.max_abs_I <= self.i_bound


def dense_chain(spec: CounterexampleSpec, k: int, w: WeightSequence) -> DenseChainReport:
    """Full-space version of the chain at block ``k`` (needs ``M_{a_k+1}`` within the dense cap).

    Computes ``T_{M+2} f`` and ``II`` from the dense transform, takes ``I = T - II``,
    and compares ``II`` with :func:`term_II_exact` at every point.
    """
    _require_k(spec, k)
    f = build_dense(spec, k)
    b = f.basis
    M = spec.M(spec.alphas[k])
    T = t_mean(f, w, M + 2).value.values
    c = forward(b, f.values)
    head = c.copy()
    head[M + 1:] = 0.0
    II = mean_split_ratio(spec, k, w) * inverse(b, head)
    I = T - II
    # S_j f for j <= M only changes up to the end of block k-1; beyond that the
    # coefficients vanish, which the max over the gap confirms
    lo_end = spec.block(k - 1)[1]
    S = partial_sums_prefix(SpectralFunction(b, c), lo_end)
    gap = float(np.abs(c[lo_end:M]).max(initial=0.0))
    S_max = float(np.abs(S).max()) + gap * (M - lo_end)
    digits = b.digit_table
    II_at = _II_evaluator(spec, k, w)
    exact = np.array([II_at(digits[t]) for t in range(b.size)])
    rel = float(np.abs(exact - II).max() / np.abs(II).max())
    return DenseChainReport(k, float(np.abs(T).min()), chain_threshold(spec, k, w),
                            float(np.abs(I).max()), term_I_bound(spec, k), S_max, rel)
