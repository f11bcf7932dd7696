"""Quasi-homogeneous gradings of polynomial vector fields.

A grading assigns integer weights ``s_1..s_n >= 0`` to the variables and a
degree ``m > 1`` to the field.  A term ``c x^k`` of component ``j`` has
weight ``w = sum s_i k_i`` and lies in the slice of field degree
``w - s_j + 1``; the field is quasi-homogeneous of degree ``m`` when every
term lies in slice ``m``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .errors import NotSemiQuasihomogeneous
from .polyalg import Polynomial, VectorField, monomial_weight
from .tensorfield import TensorField

PURE, POSITIVE, NEGATIVE = "pure", "positive", "negative"


@dataclass(frozen=True)
class Grading:
    weights: tuple
    degree: int
    sign: str | None = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "weights", tuple(int(s) for s in self.weights))
        if any(s < 0 for s in self.weights):
            raise ValueError("weights must be nonnegative integers")
        if not any(self.weights):
            raise ValueError("weights must not all be zero")
        if self.degree <= 1:
            raise ValueError("grading degree m must exceed 1")

    @property
    def n(self):
        return len(self.weights)

    @property
    def alpha(self) -> Fraction:
        return Fraction(1, self.degree - 1)

    @property
    def H(self) -> list:
        """Diagonal of ``H = alpha * S``."""
        return [self.alpha * s for s in self.weights]

    def canonical(self) -> "Grading":
        g = math.gcd(*self.weights, self.degree - 1)
        return Grading(tuple(s // g for s in self.weights), (self.degree - 1) // g + 1, self.sign)

    def to_json(self):
        return {"weights": list(self.weights), "degree": self.degree,
                "sign": self.sign or PURE}

    @classmethod
    def from_json(cls, d):
        return cls(tuple(d["weights"]), int(d["degree"]), d.get("sign"))


@dataclass
class SemiQHDecomposition:
    grading: Grading
    cut: VectorField
    rest: list          # [(degree, VectorField)] in increasing degree
    sign: str

    def reconstruct(self) -> VectorField:
        total = self.cut
        for _, vf in self.rest:
            total = total + vf
        return total


def weighted_degree(p: Polynomial, weights: Sequence[int]) -> set:
    """Set of weighted degrees ``sum s_i k_i`` over the monomials of ``p``."""
    return {monomial_weight(m, weights) for m in p.monomials()}


def field_slices(F: VectorField, weights: Sequence[int]) -> dict:
    """Map field degree ``d`` -> list of per-component polynomials."""
    n = F.n
    acc: dict = {}
    for j, comp in enumerate(F):
        for mono, c in comp.items():
            d = monomial_weight(mono, weights) - weights[j] + 1
            acc.setdefault(d, [dict() for _ in range(n)])[j][mono] = c
    return {d: VectorField([Polynomial(n, parts[j], F.exact) for j in range(n)])
            for d, parts in sorted(acc.items())}


def field_degrees(F: VectorField, weights: Sequence[int]) -> set:
    return {monomial_weight(m, weights) - weights[j] + 1
            for j, comp in enumerate(F) for m in comp.monomials()}


def check_quasihomogeneous(F: VectorField, g: Grading) -> bool:
    """Every term of ``F^j`` has weight ``s_j + m - 1`` (the zero field passes)."""
    if F.n != g.n:
        return False
    return field_degrees(F, g.weights) <= {g.degree}


def decompose(F: VectorField, g: Grading) -> SemiQHDecomposition:
    slices = field_slices(F, g.weights)
    if g.degree not in slices:
        raise NotSemiQuasihomogeneous(
            f"no terms of degree {g.degree} for weights {list(g.weights)}")
    others = [d for d in slices if d != g.degree]
    if not others:
        sign = PURE
    elif all(d > g.degree for d in others):
        sign = POSITIVE
    elif all(d < g.degree for d in others):
        sign = NEGATIVE
    else:
        raise NotSemiQuasihomogeneous(
            f"not semi-quasihomogeneous for this grading: slices {sorted(slices)} "
            f"straddle degree {g.degree}")
    return SemiQHDecomposition(Grading(g.weights, g.degree, sign), slices[g.degree],
                               [(d, slices[d]) for d in others], sign)


def find_weights(F: VectorField, s_max: int = 4, m_max: int = 5) -> list:
    """All canonical gradings within bounds making ``F`` (semi-)quasihomogeneous.

    Linear-leading structure (m = 1) is never reported; the fixed-point
    analysis handles it.  Results carry ``sign`` and are ordered pure first,
    then by ``(m, sum(s), s)``.
    """
    if s_max < 1 or m_max < 2:
        raise ValueError("need s_max >= 1 and m_max >= 2")
    found = []
    for s in itertools.product(range(s_max + 1), repeat=F.n):
        if not any(s):
            continue
        degs = field_degrees(F, s)
        for m in range(2, m_max + 1):
            if m not in degs or math.gcd(*s, m - 1) != 1:
                continue
            others = degs - {m}
            if not others:
                sign = PURE
            elif min(others) > m:
                sign = POSITIVE
            elif max(others) < m:
                sign = NEGATIVE
            else:
                continue
            found.append(Grading(s, m, sign))
    found.sort(key=lambda g: (g.sign != PURE, g.degree, sum(g.weights), g.weights))
    return found


def tensor_weighted_degree(T: TensorField, weights: Sequence[int]) -> set:
    """Degrees ``l = w + sum s_{lower} - sum s_{upper}`` realised by ``T``'s terms."""
    p = T.p
    out = set()
    for key, poly in T.items():
        shift = sum(weights[j] for j in key[p:]) - sum(weights[i] for i in key[:p])
        out |= {monomial_weight(m, weights) + shift for m in poly.monomials()}
    return out


def rho_scaling(poly: Polynomial, weights: Sequence[int]) -> Polynomial:
    """``poly(rho^S x)`` as a polynomial in ``n + 1`` variables (rho last)."""
    n = poly.nvars
    rho = Polynomial.variable(n + 1, n, poly.exact)
    bindings = {i: Polynomial.variable(n + 1, i, poly.exact) * rho ** weights[i]
                for i in range(n)}
    return poly.substitute(bindings, n + 1)


def rho_orders(poly_in_rho: Polynomial) -> set:
    """Exponents of the trailing variable present in ``poly_in_rho``."""
    return {m[-1] for m in poly_in_rho.monomials()}
