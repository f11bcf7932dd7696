from fractions import Fraction

import numpy as np
from hypothesis import given, strategies as st

from kova.linalg import (charpoly, nullspace_exact, nullspace_float, rank_exact, rank_float,
                         rational_roots, spectrum)

from conftest import small_fracs


def rref_rank(rows, ncols):
    """Plain Fraction Gauss-Jordan, used only as a reference."""
    M = [list(map(Fraction, r)) for r in rows]
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(M)) if M[i][c] != 0), None)
        if piv is None:
            continue
        M[r], M[piv] = M[piv], M[r]
        for i in range(len(M)):
            if i != r and M[i][c] != 0:
                f = M[i][c] / M[r][c]
                M[i] = [a - f * b for a, b in zip(M[i], M[r])]
        r += 1
    return r


def matrices(max_rows=5, max_cols=5):
    return st.integers(1, max_cols).flatmap(lambda c: st.lists(
        st.lists(small_fracs, min_size=c, max_size=c), min_size=1, max_size=max_rows))


@given(matrices())
def test_bareiss_rank_matches_reference(rows):
    n = len(rows[0])
    assert rank_exact(rows, n) == rref_rank(rows, n)


@given(matrices())
def test_nullspace_vectors_annihilate(rows):
    n = len(rows[0])
    null = nullspace_exact(rows, n)
    assert len(null) == n - rank_exact(rows, n)
    for v in null:
        for r in rows:
            assert sum(a * b for a, b in zip(r, v)) == 0


@given(matrices())
def test_float_nullspace_agrees_with_exact(rows):
    n = len(rows[0])
    A = np.array([[float(x) for x in r] for r in rows])
    N = nullspace_float(A)
    assert N.shape[0] == len(nullspace_exact(rows, n))
    assert rank_float(A) == rank_exact(rows, n)
    if N.size:
        assert np.abs(A @ np.asarray(N).T).max() < 1e-8


@given(st.integers(1, 4).flatmap(lambda n: st.lists(
    st.lists(st.integers(-4, 4), min_size=n, max_size=n), min_size=n, max_size=n)))
def test_charpoly_matches_numpy(K):
    cp = [float(c) for c in charpoly(K)]
    ref = np.poly(np.array(K, dtype=float))
    assert np.allclose(cp, ref, atol=1e-6 * max(1.0, np.abs(ref).max()))


def test_rational_roots_and_spectrum():
    # (x - 1/2)(x + 2)(x^2 + 1)
    roots, rest = rational_roots([Fraction(1), Fraction(3, 2), Fraction(0), Fraction(3, 2), Fraction(-1)])
    assert roots == [Fraction(-2), Fraction(1, 2)]
    assert len(rest) == 3 and rest[1] == 0 and rest[0] == rest[2]
    F = Fraction
    spec = spectrum([[F(0), F(-1)], [F(1), F(0)]])
    assert all(not exact for _, exact in spec)
    spec = spectrum([[F(2), F(1)], [F(0), F(3)]])
    assert spec == [(F(2), True), (F(3), True)]
