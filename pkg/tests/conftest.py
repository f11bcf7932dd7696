"""Shared fixtures and hypothesis strategies."""

from fractions import Fraction
from pathlib import Path

import pytest
from hypothesis import settings, strategies as st

from kova.dsl import load_system, to_vector_field
from kova.polyalg import Polynomial, VectorField
from kova.tensorfield import TensorField, TensorType

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

ROOT = Path(__file__).resolve().parent.parent
SYSTEMS = ROOT / "systems"

small_fracs = st.fractions(min_value=-5, max_value=5, max_denominator=4)


def monomials(n, max_deg):
    return st.lists(st.integers(0, max_deg), min_size=n, max_size=n).filter(
        lambda m: sum(m) <= max_deg).map(tuple)


@st.composite
def polys(draw, n=2, max_deg=3, max_terms=4):
    terms = draw(st.lists(st.tuples(monomials(n, max_deg), small_fracs), max_size=max_terms))
    return Polynomial(n, terms)


@st.composite
def fields(draw, n=2, max_deg=2, max_terms=3):
    return VectorField([draw(polys(n, max_deg, max_terms)) for _ in range(n)])


@st.composite
def tensors(draw, n=2, p=1, q=1, max_deg=2):
    tt = TensorType(p, q)
    keys = list(tt.index_tuples(n))
    chosen = draw(st.lists(st.sampled_from(keys), max_size=3, unique=True)) if keys else []
    return TensorField(n, tt, {k: draw(polys(n, max_deg, 2)) for k in chosen})


def load(name, float_mode=False):
    spec = load_system(SYSTEMS / name, float_mode)
    return spec, to_vector_field(spec)


@pytest.fixture(scope="session")
def lotka():
    return load("lotka.kova")[1]


@pytest.fixture(scope="session")
def oregonator():
    return load("oregonator.kova")


@pytest.fixture(scope="session")
def artificial():
    return load("artificial.kova", True)[1]


F = Fraction
