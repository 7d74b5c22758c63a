from fractions import Fraction

import numpy as np
import pytest

from vlab import GridFunction, hp_atomic_bound, validate_atom, weights
from vlab.counterexample import (ChainViolation, CounterexampleSpec, atoms, build_dense,
                                 certificate_constant, chain_threshold, check_conditions,
                                 condition2_report, dense_chain, divergence_ratio,
                                 expected_coefficients, find_alphas, hp_bound, hp_bound_limit,
                                 lower_bound_chain, sample_points, sj_bound, term_I_bound,
                                 term_II_exact)
from vlab.group import DenseCapError
from vlab.operators import conditional_expectation
from vlab.spectral import forward


@pytest.fixture(scope="module")
def spec():
    return find_alphas(Fraction(1, 3), 2, 4, 1)


def _cond3(m, r, prev, a):
    return m * sum(Fraction(m ** (e * r), e) for e in prev) < Fraction(m ** (a * r), a)


def _cond4(m, r, prev, a):
    return 32 * m * Fraction(m ** (prev * r), prev) < Fraction(m ** (a * (r - 2)), a)


def test_greedy_sequence(spec):
    assert spec.alphas == (1, 13, 47, 149)
    assert spec.lam == 2 and spec.r == 3


def test_greedy_is_minimal(spec):
    al = spec.alphas
    for k in range(1, len(al)):
        for a in range(al[k - 1] + 1, al[k]):
            assert not (_cond3(2, 3, al[:k], a) and _cond4(2, 3, al[k - 1], a))
        assert _cond3(2, 3, al[:k], al[k]) and _cond4(2, 3, al[k - 1], al[k])


def test_first_step_by_hand():
    # 2^a / a > 64 * 2^3 = 512 first holds at a = 13
    assert 2**13 / 13 > 512 and not 2**12 / 12 > 512


def test_exact_condition_checker(spec):
    rows = check_conditions(spec)
    assert all(r.cond3 for r in rows)
    assert rows[0].cond4 is None and all(r.cond4 for r in rows[1:])
    bad = CounterexampleSpec(Fraction(1, 3), 2, (1, 12))
    assert check_conditions(bad)[1].cond4 is False


def test_mixed_radix_search():
    s = find_alphas(Fraction(1, 4), (3, 2) * 20, 3)
    assert all(r.cond3 and r.cond4 in (None, True) for r in check_conditions(s))
    assert s.lam == 3 and s.M(3) == 18


@pytest.mark.parametrize("kwargs", [dict(p=Fraction(1, 2)), dict(p=Fraction(2, 5)), dict(count=1),
                                    dict(alpha0=0)])
def test_search_preconditions(kwargs):
    with pytest.raises(ValueError):
        find_alphas(**kwargs)


def test_spec_validation():
    with pytest.raises(ValueError):
        CounterexampleSpec(Fraction(1, 3), 2, (3, 3))
    with pytest.raises(ValueError):
        CounterexampleSpec(Fraction(1, 3), (2, 2), (1, 5))


def test_summability_report(spec):
    rep = condition2_report(spec)
    assert rep.rho == pytest.approx(3.0)
    assert rep.certified and rep.tail_bound < 0.5
    assert rep.partial_sum == pytest.approx(sum(a ** (-1 / 3) for a in spec.alphas))
    assert not rep.increment_below(1e-3)  # the increment proxy is out of reach at this depth


def test_coefficients_first_block(spec):
    f = build_dense(spec, 0)
    c = forward(f.basis, f.values)
    assert np.allclose(c, [0, 0, 4, 4], atol=1e-12)


def test_coefficient_law(spec):
    f = build_dense(spec, 1)
    c = forward(f.basis, f.values)
    expect = expected_coefficients(spec, 1)
    assert np.abs(c - expect).max() <= 1e-12
    nz = expect != 0
    assert np.abs(c[nz] / expect[nz] - 1).max() <= 1e-9
    lo, hi = spec.block(1)
    assert np.all(expect[lo:hi] == float(Fraction(2**26, 13)))


def test_martingale_staircase(spec):
    f = build_dense(spec, 1)
    b = f.basis
    c = forward(b, f.values)
    from vlab.spectral import inverse
    for n in range(b.N + 1):
        head = c.copy()
        head[b.Mk[n]:] = 0
        assert np.abs(inverse(b, head) - conditional_expectation(f.values, b, n)).max() < 1e-9


def test_atoms(spec):
    dec = atoms(spec, 1)
    for lam_k, a, I in dec.terms:
        assert validate_atom(a, I, 1 / 3, tol=0)
    assert np.allclose(dec.assemble().values, build_dense(spec, 1).values, rtol=1e-15)
    assert hp_atomic_bound(dec) == pytest.approx(hp_bound(spec, 1), rel=1e-14)
    assert [t[0] for t in dec.terms] == [2 / 1, 2 / 13]


def test_dense_cap(spec):
    with pytest.raises(DenseCapError):
        build_dense(spec, 2)


def test_bounds(spec):
    assert term_I_bound(spec, 1) == sj_bound(spec, 1) == 64.0
    assert [sj_bound(spec, k) for k in (1, 2, 3)] == sorted(sj_bound(spec, k) for k in (1, 2, 3))
    with pytest.raises(IndexError):
        sj_bound(spec, 0)


def test_divergence_ratio(spec):
    assert divergence_ratio(spec, 1) == pytest.approx(2**13 / (16 * 13))
    assert divergence_ratio(spec, 2) == pytest.approx(2**47 / (16 * 47))
    assert divergence_ratio(spec, 2) == pytest.approx(1.87e11, rel=1e-3)
    r = [divergence_ratio(spec, k) for k in range(4)]
    assert all(x < y for x, y in zip(r, r[1:]))
    hp = [hp_bound(spec, k) for k in range(4)]
    assert all(x < y for x, y in zip(hp, hp[1:]))
    assert hp[-1] < hp_bound_limit(spec) < 2 * (1.0 + 13 ** (-1 / 3) + 47 ** (-1 / 3) + 1.5) ** 3


@pytest.mark.parametrize("w", [weights("fejer"), weights("iterlog", 1, 1), weights("power", 0.5)],
                         ids=lambda w: w.label)
def test_two_tier_consistency(spec, w):
    rep = dense_chain(spec, 1, w)
    assert rep.II_rel_err <= 1e-8
    assert rep.max_abs_I <= rep.i_bound
    assert rep.max_abs_S <= sj_bound(spec, 1)
    assert rep.min_abs_T >= rep.threshold
    assert rep.passed


def test_II_largest_at_origin(spec):
    w = weights("fejer")
    origin = abs(term_II_exact(spec, 1, [0] * 14, w))
    pts = sample_points(spec, 1, 500)
    assert all(abs(term_II_exact(spec, 1, x, w)) <= origin + 1e-9 for x in pts)


def test_sample_points(spec):
    a = sample_points(spec, 2, 100)
    assert a.shape == (100, 48) and not a[0].any()
    assert np.array_equal(a, sample_points(spec, 2, 100))
    assert a.max() == 1 and a.min() == 0
    assert not np.array_equal(a[1:], sample_points(spec, 1, 100)[1:, :14])


def test_chain_thresholds(spec):
    assert chain_threshold(spec, 1, weights("fejer")) == pytest.approx(2**13 / (16 * 13))
    assert chain_threshold(spec, 1, weights("iterlog", 1, 1)) == pytest.approx(2**13 / (8 * 13))
    assert certificate_constant(spec, 2, weights("fejer")) == pytest.approx(1, rel=1e-12)


@pytest.mark.parametrize("w", [weights("fejer"), weights("iterlog", 1, 1)], ids=lambda w: w.label)
def test_lower_bound_chain_certified(spec, w):
    for k in (1, 2):
        rep = lower_bound_chain(spec, k, w, samples=2000)
        assert rep.certified and rep.passed and rep.fraction_above == 1.0
        assert rep.path == ("2b" if w.kind == "iterlog" else "1b")


def test_riesz_flagged_not_raised(spec):
    rep = lower_bound_chain(spec, 1, weights("riesz"), samples=200)
    assert not rep.certified and not rep.passed
    assert rep.certificate < 0.75


def test_chain_violation_reported():
    bad = CounterexampleSpec(Fraction(1, 3), 2, (1, 5))  # breaks (4); certificate c = 32/34
    with pytest.raises(ChainViolation) as exc:
        lower_bound_chain(bad, 1, weights("fejer"), samples=10)
    assert exc.value.report.min_margin < 0


def test_build_dense_values_exact(spec):
    f = build_dense(spec, 1)
    assert isinstance(f, GridFunction)
    assert f.values[0] == pytest.approx(4 * (4 - 2) + float(Fraction(2**26, 13)) * (2**14 - 2**13))
