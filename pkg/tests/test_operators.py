import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from vlab import (AtomicDecomposition, Basis, GridFunction, build_basis, fejer_mean, hp_atomic_bound,
                  hp_norm, lp_norm, maximal_fejer, maximal_function, maximal_t, t_mean, validate_atom,
                  weak_lp, weights)
from vlab.group import Cylinder
from vlab.operators import (TAIL, Martingale, abel_coefficient, conditional_expectation,
                            domination_bound, domination_bounds, domination_excess,
                            martingale_from_function, maximal_batch)


def test_norms_on_step_function():
    b = build_basis(2, 2)
    f = GridFunction(b, np.array([2.0, 0, 0, 0]))
    assert lp_norm(f, 1) == 0.5
    assert lp_norm(f, 0.5) == pytest.approx(0.125)
    assert weak_lp(f, 1) == 0.5
    assert weak_lp(f, 0.5) == pytest.approx(2 * 0.25**2)
    with pytest.raises(ValueError):
        lp_norm(f, 0)


@given(arrays(np.float64, 16, elements=st.floats(-5, 5)), st.sampled_from([0.25, 0.5, 1.0, 2.0]))
def test_weak_lp_brute_force(vals, p):
    a = np.abs(vals)
    # sup_y y mu(|f| > y)^(1/p) is approached as y rises to each value
    brute = max([y * np.mean(a >= y) ** (1 / p) for y in a if y > 0], default=0.0)
    assert weak_lp(vals, p) == pytest.approx(brute, rel=1e-12, abs=1e-300)
    assert weak_lp(vals, p) <= lp_norm(vals, p) * (1 + 1e-12)


def _brute_sup(f, mean):
    M = f.basis.size
    rows = [np.abs(mean(n)) for n in range(1, M + 1)]
    return np.max(rows + [np.abs(f.values)], axis=0)


@pytest.mark.parametrize("w", [weights("riesz"), weights("power", 0.5), weights("iterlog", 1, 1),
                               weights("cesaro", 0.5)], ids=lambda w: w.label)
def test_maximal_t_brute_force(w, mixed, rng):
    f = GridFunction(mixed, rng.standard_normal(mixed.size))
    res = maximal_t(f, w)

    def mean(n):
        return t_mean(f, w, n).value.values if w.Q(n) > 0 else np.zeros(mixed.size)

    assert np.abs(res.value.values - _brute_sup(f, mean)).max() < 1e-12
    # the tail past M_N never beats the closed-form supremum
    for n in (mixed.size + 1, 2 * mixed.size, 10**6):
        assert np.all(np.abs(t_mean(f, w, n).value.values) <= res.value.values + 1e-12)
    for t in range(0, mixed.size, 13):
        n = res.argmax[t]
        got = abs(f.values[t]) if n == TAIL else abs(mean(n)[t])
        assert got == pytest.approx(res.value.values[t], rel=1e-12)


def test_maximal_fejer_brute_force(dyadic8, rng):
    f = GridFunction(dyadic8, rng.standard_normal(dyadic8.size))
    got = maximal_fejer(f).value.values
    assert np.abs(got - _brute_sup(f, lambda n: fejer_mean(f, n).values)).max() < 1e-12


def test_maximal_complex_basis(rng):
    b = Basis((3, 2, 5))
    f = GridFunction(b, rng.standard_normal(b.size) + 1j * rng.standard_normal(b.size))
    w = weights("power", 0.5)
    got = maximal_t(f, w).value.values
    assert np.abs(got - _brute_sup(f, lambda n: t_mean(f, w, n).value.values)).max() < 1e-12


def test_maximal_batch_matches_single(mixed, rng):
    vals = rng.standard_normal((3, mixed.size))
    ws = [None, weights("riesz"), weights("iterlog", 1, 1)]
    out = maximal_batch(mixed, vals, ws)
    for i in range(3):
        f = GridFunction(mixed, vals[i])
        assert np.allclose(out[i, 0], maximal_fejer(f).value.values, atol=1e-13)
        assert np.allclose(out[i, 1], maximal_t(f, ws[1]).value.values, atol=1e-13)
        assert np.allclose(out[i, 2], maximal_t(f, ws[2]).value.values, atol=1e-13)


@pytest.mark.parametrize("w", [weights("riesz"), weights("power", 0.5), weights("inverse_cesaro", 0.5),
                               weights("cesaro", 0.3), weights("norlund_log")], ids=lambda w: w.label)
def test_non_increasing_domination(w, dyadic8, rng):
    vals = rng.standard_normal((5, dyadic8.size))
    out = maximal_batch(dyadic8, vals, [None, w])
    assert np.all(out[:, 1] <= out[:, 0] + 1e-12)


def test_abel_coefficient_values():
    fej = weights("fejer")
    for n in (2, 5, 100):
        assert abel_coefficient(fej, n) == pytest.approx((n - 1) / n)
    w = weights("iterlog", 1, 1)
    n = 50
    q = w.q_array(n)
    assert abel_coefficient(w, n) == pytest.approx((2 * q[n - 1] * (n - 1) - w.Q(n)) / w.Q(n))
    assert domination_bound(weights("riesz"), 10) == 1.0
    cs = domination_bounds(w, 200)
    assert np.isnan(cs[:3]).all()  # Q_2 = log 1 = 0
    assert cs[100] == pytest.approx(abel_coefficient(w, 100))


def test_abel_coefficient_is_sharp_on_constants():
    b = build_basis(2, 4)
    one = GridFunction(b, np.ones(b.size))
    sigma_star = maximal_fejer(one).value.values
    w = weights("fejer")
    for n in (3, 7, 16):
        lhs = np.abs(t_mean(one, w, n).value.values)
        assert np.allclose(lhs, abel_coefficient(w, n) * sigma_star)
        assert np.all(lhs > (n - 2) / n * sigma_star)


@pytest.mark.parametrize("w", [weights("iterlog", 1, 1), weights("iterlog", 2, 2)],
                         ids=lambda w: w.label)
def test_non_decreasing_pointwise_domination(w, mixed, rng):
    vals = rng.standard_normal((4, mixed.size))
    sig = maximal_batch(mixed, vals, [None])[:, 0]
    assert domination_excess(mixed, vals, w, sig).max() <= 1e-12
    # brute force on one function
    f = GridFunction(mixed, vals[0])
    Q = w.Q_array(mixed.size)
    for n in range(2, mixed.size + 1):
        if Q[n] > 0:
            assert np.all(np.abs(t_mean(f, w, n).value.values)
                          <= domination_bound(w, n) * sig[0] + 1e-12)


def test_conditional_expectations(mixed, rng):
    vals = rng.standard_normal(mixed.size)
    for n in range(mixed.N + 1):
        e = conditional_expectation(vals, mixed, n)
        assert e.mean() == pytest.approx(vals.mean())
        if n:
            assert np.allclose(conditional_expectation(e, mixed, n - 1),
                               conditional_expectation(vals, mixed, n - 1))
    assert np.allclose(conditional_expectation(vals, mixed, mixed.N), vals)


def test_martingale_from_function(mixed, rng):
    f = GridFunction(mixed, rng.standard_normal(mixed.size))
    mart = martingale_from_function(f)
    assert mart.compatibility_error() < 1e-14
    star = maximal_function(mart).values
    assert np.all(star >= np.abs(f.values) - 1e-15)
    broken = Martingale(mart.levels[:-1] + (GridFunction(mixed, f.values + 1),))
    assert broken.compatibility_error() > 0.5


def _atom(b, level, scale):
    d = np.where(Cylinder(level + 1).mask(b), float(b.Mk[level + 1]), 0.0)
    d -= np.where(Cylinder(level).mask(b), float(b.Mk[level]), 0.0)
    return GridFunction(b, scale * d)


def test_validate_atom(dyadic8):
    p = 1 / 3
    good = _atom(dyadic8, 3, 8.0**2 / 2)
    assert validate_atom(good, Cylinder(3), p)
    assert validate_atom(good, Cylinder(3), p, tol=0)
    too_big = _atom(dyadic8, 3, 1.01 * 8.0**2)
    assert validate_atom(too_big, Cylinder(3), p).reasons == ("sup",)
    shifted = GridFunction(dyadic8, good.values + Cylinder(3).mask(dyadic8))
    assert "mean" in validate_atom(shifted, Cylinder(3), p).reasons
    leak = good.values.copy()
    leak[1] = 1.0
    assert "support" in validate_atom(GridFunction(dyadic8, leak), Cylinder(3), p).reasons


def test_atom_hardy_norm_at_most_one(dyadic8):
    for level in range(dyadic8.N - 1):
        for p in (1 / 2, 1 / 3):
            scale = dyadic8.Mk[level] ** (1 / p - 1) / 2
            a = _atom(dyadic8, level, scale)
            assert validate_atom(a, Cylinder(level), p)
            assert hp_norm(a, p) <= 1 + 1e-12


def test_two_atom_bound(dyadic8):
    a = _atom(dyadic8, 2, 4.0 / 2)
    dec = AtomicDecomposition(0.5, [(1.0, a, Cylinder(2)), (1.0, a, Cylinder(2))])
    assert hp_atomic_bound(dec) == pytest.approx(4.0)
    assert np.allclose(dec.assemble().values, 2 * a.values)
    bad = AtomicDecomposition(0.5, [(1.0, GridFunction(dyadic8, np.ones(dyadic8.size)), Cylinder(2))])
    with pytest.raises(ValueError):
        hp_atomic_bound(bad)
