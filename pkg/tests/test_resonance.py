import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from kova.config import ResonanceOptions
from kova.resonance import (PROVED_EMPTY, Spectrum, admissible_degree_window, compositions,
                            enumerate_fixed_point, enumerate_semi_qh, fixed_point_window,
                            is_tautological)
from kova.tensorfield import TensorType

F = Fraction
exps = st.fractions(min_value=-3, max_value=3, max_denominator=3)
types = st.sampled_from([(0, 0), (1, 0), (0, 1), (1, 1), (2, 0)])


def brute(values, ttype, totals, offset):
    """Reference enumeration over boxes of k-vectors, no shortcuts."""
    n = len(values)
    found = set()
    ups = itertools.combinations_with_replacement(range(n), ttype.p)
    lows = list(itertools.combinations_with_replacement(range(n), ttype.q))
    top = max(totals)
    for u in ups:
        for w in lows:
            rhs = sum(values[i] for i in u) - sum(values[j] for j in w)
            for k in itertools.product(range(top + 1), repeat=n):
                if sum(k) in totals and offset + sum(a * b for a, b in zip(k, values)) == rhs:
                    found.add((k, u, w))
    return found


@given(st.lists(exps, min_size=1, max_size=3), types, st.integers(0, 4))
def test_fixed_point_matches_brute_force(values, pq, k):
    tt = TensorType(*pq)
    got = {(s.k, s.upper, s.lower) for s in enumerate_fixed_point(Spectrum.from_values(values), tt, k)}
    assert got == brute(values, tt, {k}, 0)


@settings(max_examples=30)
@given(st.lists(exps, min_size=1, max_size=3), types, st.integers(-3, 3), st.integers(2, 3))
def test_semi_qh_matches_brute_force(values, pq, l, m):
    tt = TensorType(*pq)
    opts = ResonanceOptions(k_max=4)
    sols = enumerate_semi_qh(Spectrum.from_values(values), m, tt, l, opts)
    got = {(s.k, s.upper, s.lower) for s in sols}
    assert got == brute(values, tt, set(range(5)), F(-l, m - 1))


@given(st.lists(exps, min_size=1, max_size=3), types, st.integers(0, 3))
def test_float_spectrum_agrees_with_exact(values, pq, k):
    tt = TensorType(*pq)
    ex = {(s.k, s.upper, s.lower) for s in enumerate_fixed_point(Spectrum.from_values(values), tt, k)}
    fl = enumerate_fixed_point(Spectrum.from_values([complex(v) for v in values]), tt, k)
    assert {(s.k, s.upper, s.lower) for s in fl} == ex


@given(st.lists(st.floats(-3, 3), min_size=2, max_size=2), st.integers(1, 3))
def test_tolerance_monotone(values, k):
    spec = Spectrum.from_values([complex(v) for v in values])
    tt = TensorType(1, 0)
    counts = [len(enumerate_fixed_point(spec, tt, k, ResonanceOptions(tol=t)))
              for t in (1e-12, 1e-9, 1e-6, 1e-3)]
    assert counts == sorted(counts)


def test_tautological_detection():
    assert is_tautological((0, 0), (), ())
    assert is_tautological((0, 0), (1,), (1,))
    assert is_tautological((1, 0), (0,), ())
    assert not is_tautological((1, 0), (1,), ())
    assert not is_tautological((0, 0), (1,), (1,), l=2)
    sols = enumerate_fixed_point(Spectrum.from_values([F(1), F(2)]), TensorType(1, 1), 0)
    assert {(s.upper, s.lower) for s in sols} == {((0,), (0,)), ((1,), (1,))}
    assert all(s.tautological for s in sols)


def test_compositions():
    assert list(compositions(2, 2)) == [(2, 0), (1, 1), (0, 2)]
    assert sum(1 for _ in compositions(4, 3)) == 15


@settings(max_examples=30)
@given(st.lists(st.fractions(min_value=-3, max_value=0, max_denominator=3), min_size=1, max_size=3),
       types, st.integers(2, 3))
def test_analytic_window_is_sound(values, pq, m):
    # every certificate found with a generous k_max lies inside the analytic window
    spec = Spectrum.from_values(values)
    tt = TensorType(*pq)
    w = admissible_degree_window(spec, m, tt, [1] * len(values), ResonanceOptions(k_max=6))
    assert w.analytic
    for l in range(w.lo, w.hi + 4):
        sols = enumerate_semi_qh(spec, m, tt, l, ResonanceOptions(k_max=6))
        assert (l in w.degrees) == bool(sols)


def test_lotka_windows():
    spec = Spectrum.from_values([F(-2), F(-1), F(-1)])
    def win(p, q):
        return admissible_degree_window(spec, 2, TensorType(p, q), [1, 1, 1])
    assert win(0, 0).degrees == [0]
    assert win(1, 0).degrees == [-1, 0, 1, 2]
    assert win(1, 1).degrees == [0, 1]
    for pq in [(0, 1), (0, 2), (1, 2)]:
        assert win(*pq).status == PROVED_EMPTY


def test_fixed_point_window_poincare():
    spec = Spectrum.from_values([1.0 + 0j, 2 ** 0.5 + 0j])
    w = fixed_point_window(spec, TensorType(1, 0), 6)
    assert w.analytic and w.degrees == [1]
    w = fixed_point_window(spec, TensorType(0, 1), 6)
    assert w.status == PROVED_EMPTY


def test_negative_order_rejected():
    with pytest.raises(ValueError):
        enumerate_fixed_point(Spectrum.from_values([F(1)]), TensorType(0, 0), -1)
