from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from vlab import (Basis, Cylinder, DenseCapError, build_basis, cylinders, digits_to_index,
                  group_add, group_sub, index_to_digits)
from vlab.group import sub_indices

radices = st.lists(st.integers(2, 5), min_size=1, max_size=5)


def test_generalized_powers():
    b = build_basis((2, 3, 2, 4, 2, 3), 6)
    assert b.Mk == (1, 2, 6, 12, 48, 96, 288)
    assert b.size == 288
    assert b.lam == 4
    assert not b.is_walsh
    assert build_basis(2, 12).size == 4096
    assert build_basis(2, 3).is_walsh


def test_truncation_and_prefix():
    b = build_basis((2, 3, 2, 4), 3)
    assert b.m == (2, 3, 2)
    assert b.truncate(2).m == (2, 3)


@pytest.mark.parametrize("args", [((2, 2), 0), ((1, 2), 2), ((2,), 3), (1, 4)])
def test_bad_bases(args):
    with pytest.raises(ValueError):
        build_basis(*args)


def test_symbolic_depth_is_cheap():
    b = build_basis(3, 400)
    assert b.size == 3**400
    with pytest.raises(DenseCapError):
        b.require_dense()


def test_dense_cap_env(monkeypatch):
    b = build_basis(2, 10)
    monkeypatch.setenv("VLAB_DENSE_CAP", "512")
    with pytest.raises(DenseCapError):
        b.require_dense()
    monkeypatch.setenv("VLAB_DENSE_CAP", "1024")
    b.require_dense()


@given(radices, st.data())
def test_index_digit_roundtrip(m, data):
    b = Basis(tuple(m))
    t = data.draw(st.integers(0, b.size - 1))
    x = index_to_digits(b, t)
    assert all(0 <= d < mk for d, mk in zip(x, m))
    assert digits_to_index(b, x) == t


def test_digit_table_matches_scalar(mixed):
    table = mixed.digit_table
    for t in range(mixed.size):
        assert tuple(table[t]) == index_to_digits(mixed, t)


def test_invalid_points(mixed):
    with pytest.raises(ValueError):
        digits_to_index(mixed, (0, 0, 0))
    with pytest.raises(ValueError):
        digits_to_index(mixed, (2, 0, 0, 0, 0, 0))
    with pytest.raises(IndexError):
        index_to_digits(mixed, 288)


@given(radices, st.data())
def test_group_axioms(m, data):
    b = Basis(tuple(m))
    pt = st.integers(0, b.size - 1).map(lambda t: index_to_digits(b, t))
    x, y, z = data.draw(pt), data.draw(pt), data.draw(pt)
    zero = (0,) * b.N
    assert group_add(b, x, y) == group_add(b, y, x)
    assert group_add(b, group_add(b, x, y), z) == group_add(b, x, group_add(b, y, z))
    assert group_add(b, x, zero) == x
    assert group_add(b, group_sub(b, x, y), y) == x
    assert group_sub(b, x, x) == zero


def test_sub_indices_matches_digits(mixed):
    s = np.arange(mixed.size)
    t = (s * 37 + 11) % mixed.size
    got = sub_indices(mixed, s, t)
    for a, bb, g in zip(s, t, got):
        d = group_sub(mixed, index_to_digits(mixed, a), index_to_digits(mixed, bb))
        assert digits_to_index(mixed, d) == g


def test_cylinder_measure_and_membership(mixed):
    for n in range(mixed.N + 1):
        I = Cylinder(n)
        assert I.measure(mixed) == Fraction(1, mixed.Mk[n])
        mask = I.mask(mixed)
        assert mask.sum() == mixed.size // mixed.Mk[n]
        for t in np.flatnonzero(mask)[:20]:
            assert I.contains(index_to_digits(mixed, t))


def test_cylinders_partition(mixed):
    for n in range(mixed.N + 1):
        cs = cylinders(mixed, n)
        assert len(cs) == mixed.Mk[n]
        cover = np.sum([c.mask(mixed) for c in cs], axis=0)
        assert np.all(cover == 1)


def test_cylinder_anchor_padding_and_errors(mixed):
    assert Cylinder(3, (1,)).anchor == (1, 0, 0)
    with pytest.raises(ValueError):
        Cylinder(-1)
    with pytest.raises(ValueError):
        Cylinder(7).measure(mixed)
