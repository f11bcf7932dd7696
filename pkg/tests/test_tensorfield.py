from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from kova.errors import DimensionMismatch, RankCapExceeded
from kova.polyalg import Polynomial, VectorField
from kova.tensorfield import (TensorField, TensorType, identity_tensor, is_invariant, is_trivial,
                              lie_derivative, tensor_product, trivial_family_basis)

from conftest import fields, polys, small_fracs, tensors


def add(A, B):
    keys = set(A.components) | set(B.components)
    zero = Polynomial.zero(A.n)
    return TensorField(A.n, A.ttype, {k: A.components.get(k, zero) + B.components.get(k, zero)
                                      for k in keys})


@given(fields(), tensors(), tensors(), small_fracs)
def test_lie_derivative_linear_in_tensor(F, A, B, c):
    lhs = lie_derivative(add(A, B.scale(c)), F)
    rhs = add(lie_derivative(A, F), lie_derivative(B, F).scale(c))
    assert lhs.components == rhs.components


@given(fields(), fields(), tensors())
def test_lie_derivative_linear_in_field(F, G, T):
    assert lie_derivative(T, F + G).components == add(lie_derivative(T, F),
                                                     lie_derivative(T, G)).components


@given(fields(), tensors(p=1, q=0), tensors(p=0, q=1))
def test_leibniz_on_tensor_product(F, A, B):
    lhs = lie_derivative(tensor_product(A, B), F)
    rhs = add(tensor_product(lie_derivative(A, F), B), tensor_product(A, lie_derivative(B, F)))
    assert lhs.components == rhs.components


@given(fields(), polys(2, 3, 3))
def test_scalar_lie_derivative_is_directional(F, f):
    L = lie_derivative(TensorField.scalar(f), F)
    expected = F[0] * f.partial(0) + F[1] * f.partial(1)
    assert L.components.get((), Polynomial.zero(2)) == expected


@given(fields())
def test_field_is_its_own_symmetry(F):
    assert is_invariant(TensorField.vector(F), F)[0]


@given(fields(), fields())
def test_vector_lie_derivative_is_bracket(F, G):
    L = lie_derivative(TensorField.vector(G), F)
    for i in range(2):
        br = sum((F[j] * G[i].partial(j) - G[j] * F[i].partial(j) for j in range(2)),
                 Polynomial.zero(2))
        assert L.components.get((i,), Polynomial.zero(2)) == br


@given(fields(n=3, max_deg=2), st.integers(0, 2))
def test_trivial_family_is_invariant(F, p):
    for T in trivial_family_basis(p, 3):
        assert is_invariant(T, F)[0]
        assert is_trivial(T)[0]


def test_trivial_family_sizes_and_cap():
    assert len(trivial_family_basis(2, 3)) == 2
    assert len(trivial_family_basis(3, 2)) == 6
    with pytest.raises(RankCapExceeded):
        trivial_family_basis(5, 2)
    with pytest.raises(RankCapExceeded):
        TensorType(3, 2).check_cap()


def test_identity_and_nontrivial():
    I = identity_tensor(3)
    assert sorted(I.components) == [(0, 0), (1, 1), (2, 2)]
    x = Polynomial.variable(2, 0)
    T = TensorField(2, TensorType(1, 1), {(0, 0): x})
    assert not is_trivial(T)[0]
    ok, fam = is_trivial(identity_tensor(2).scale(Fraction(3)))
    assert ok and list(fam.coefficients.values()) == [3]


def test_dimension_checks():
    with pytest.raises(DimensionMismatch):
        TensorField(2, TensorType(1, 0), {(0, 1): Polynomial.constant(2, 1)})
    with pytest.raises(DimensionMismatch):
        TensorField(2, TensorType(1, 0), {(2,): Polynomial.constant(2, 1)})


def test_float_mode_invariance(artificial):
    I = identity_tensor(2, exact=False)
    ok, res = is_invariant(I, artificial)
    assert ok and res.max_abs_coeff() == 0
