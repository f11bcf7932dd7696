"""Sparse multivariate polynomials with exact rational or float coefficients.

A polynomial is an immutable map ``monomial -> coefficient`` where a monomial
is a tuple of ``n`` nonnegative exponents.  Exact polynomials hold
:class:`fractions.Fraction` coefficients; float polynomials hold ``float``.
The two never mix.  Terms are kept in graded-lexicographic order (highest
first), so iteration and printing are deterministic.
"""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational, Real
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import DimensionMismatch, IndexOutOfRange, ModeMismatch

Monomial = tuple


def grlex_key(mono: Monomial):
    """Sort key putting higher total degree first, then lex with x1 > x2 > ..."""
    return (-sum(mono), tuple(-e for e in mono))


def monomial_weight(mono: Monomial, weights: Sequence[int]) -> int:
    return sum(s * k for s, k in zip(weights, mono))


def monomials_of_degree(n: int, d: int):
    """All exponent tuples of length ``n`` with total degree ``d`` (grlex order)."""
    if n == 0:
        if d == 0:
            yield ()
        return
    for first in range(d, -1, -1):
        for rest in monomials_of_degree(n - 1, d - first):
            yield (first,) + rest


def _coerce(value, exact: bool):
    if exact:
        if isinstance(value, Fraction):
            return value
        if isinstance(value, (int, Rational)) and not isinstance(value, bool):
            return Fraction(value)
        raise ModeMismatch(f"exact polynomial cannot take scalar {value!r}")
    if isinstance(value, (Real, np.floating, np.integer)):
        return float(value)
    raise ModeMismatch(f"float polynomial cannot take scalar {value!r}")


class Polynomial:
    __slots__ = ("nvars", "exact", "_terms", "_hash")

    def __init__(self, nvars: int, terms: Mapping | Iterable = (), exact: bool = True):
        self.nvars = int(nvars)
        self.exact = bool(exact)
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict = {}
        for mono, c in items:
            mono = tuple(int(e) for e in mono)
            if len(mono) != self.nvars:
                raise DimensionMismatch(
                    f"monomial {mono} has length {len(mono)}, expected {self.nvars}")
            if any(e < 0 for e in mono):
                raise ValueError(f"negative exponent in {mono}")
            acc[mono] = acc.get(mono, 0) + _coerce(c, self.exact)
        self._terms = {m: acc[m] for m in sorted(acc, key=grlex_key) if acc[m] != 0}
        self._hash = None

    # -- constructors -------------------------------------------------------
    @classmethod
    def zero(cls, nvars, exact=True):
        return cls(nvars, (), exact)

    @classmethod
    def constant(cls, nvars, value, exact=True):
        return cls(nvars, {(0,) * nvars: value}, exact)

    @classmethod
    def variable(cls, nvars, i, exact=True):
        if not 0 <= i < nvars:
            raise IndexOutOfRange(f"variable index {i} outside 0..{nvars - 1}")
        mono = tuple(1 if j == i else 0 for j in range(nvars))
        return cls(nvars, {mono: 1}, exact)

    @classmethod
    def monomial(cls, mono, coeff=1, exact=True):
        return cls(len(mono), {tuple(mono): coeff}, exact)

    @classmethod
    def _raw(cls, nvars, terms: dict, exact: bool):
        """Build from an already-coerced dict, skipping validation."""
        p = cls.__new__(cls)
        p.nvars = nvars
        p.exact = exact
        p._terms = {m: terms[m] for m in sorted(terms, key=grlex_key) if terms[m] != 0}
        p._hash = None
        return p

    # -- basic protocol -----------------------------------------------------
    @property
    def terms(self) -> dict:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def monomials(self):
        return list(self._terms)

    def coefficient(self, mono) -> Fraction | float:
        return self._terms.get(tuple(mono), Fraction(0) if self.exact else 0.0)

    def __len__(self):
        return len(self._terms)

    def __iter__(self):
        return iter(self._terms.items())

    def __bool__(self):
        return bool(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def is_constant(self) -> bool:
        return all(sum(m) == 0 for m in self._terms)

    def constant_term(self):
        return self.coefficient((0,) * self.nvars)

    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return max((sum(m) for m in self._terms), default=-1)

    def degrees(self) -> set:
        return {sum(m) for m in self._terms}

    def max_abs_coeff(self) -> float:
        return max((abs(float(c)) for c in self._terms.values()), default=0.0)

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return (self.nvars == other.nvars and self.exact == other.exact
                    and self._terms == other._terms)
        if isinstance(other, (int, float, Fraction)):
            try:
                return self == Polynomial.constant(self.nvars, other, self.exact)
            except ModeMismatch:
                return False
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.nvars, self.exact, tuple(self._terms.items())))
        return self._hash

    # -- arithmetic ---------------------------------------------------------
    def _check(self, other: "Polynomial"):
        if other.nvars != self.nvars:
            raise DimensionMismatch(f"dimension {self.nvars} vs {other.nvars}")
        if other.exact != self.exact:
            raise ModeMismatch("cannot combine exact and float polynomials")

    def _lift(self, other):
        if isinstance(other, Polynomial):
            self._check(other)
            return other
        return Polynomial.constant(self.nvars, other, self.exact)

    def __add__(self, other):
        other = self._lift(other)
        acc = dict(self._terms)
        for m, c in other._terms.items():
            acc[m] = acc.get(m, 0) + c
        return Polynomial._raw(self.nvars, acc, self.exact)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial._raw(self.nvars, {m: -c for m, c in self._terms.items()}, self.exact)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def scale(self, scalar):
        s = _coerce(scalar, self.exact)
        if s == 0:
            return Polynomial.zero(self.nvars, self.exact)
        return Polynomial._raw(self.nvars, {m: c * s for m, c in self._terms.items()}, self.exact)

    def __mul__(self, other):
        if not isinstance(other, Polynomial):
            return self.scale(other)
        self._check(other)
        acc: dict = {}
        for m1, c1 in self._terms.items():
            for m2, c2 in other._terms.items():
                m = tuple(a + b for a, b in zip(m1, m2))
                acc[m] = acc.get(m, 0) + c1 * c2
        return Polynomial._raw(self.nvars, acc, self.exact)

    def __rmul__(self, other):
        return self.scale(other)

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValueError("polynomial powers must be nonnegative integers")
        result = Polynomial.constant(self.nvars, 1, self.exact)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def partial(self, i: int) -> "Polynomial":
        if not 0 <= i < self.nvars:
            raise IndexOutOfRange(f"variable index {i} outside 0..{self.nvars - 1}")
        acc = {}
        for m, c in self._terms.items():
            e = m[i]
            if e:
                acc[m[:i] + (e - 1,) + m[i + 1:]] = c * e
        return Polynomial._raw(self.nvars, acc, self.exact)

    def evaluate(self, point: Sequence):
        """Term-by-term evaluation; exact in exact mode for rational points."""
        if len(point) != self.nvars:
            raise DimensionMismatch(f"point of length {len(point)}, expected {self.nvars}")
        if self.exact:
            pt = [Fraction(v) if isinstance(v, (int, Fraction)) else v for v in point]
            total = Fraction(0)
        else:
            pt = list(point)
            total = 0.0
        for m, c in self._terms.items():
            term = c
            for v, e in zip(pt, m):
                if e:
                    term = term * v ** e
            total = total + term
        return total

    def substitute(self, bindings: Mapping[int, "Polynomial"], nvars: int | None = None) -> "Polynomial":
        """Compose: replace ``x_i`` by ``bindings[i]``.

        All bindings live in one target ring of dimension ``nvars`` (inferred
        from the bindings when omitted).  Unbound variables map to the
        same-index variable of the target ring.
        """
        target = nvars
        for i, b in bindings.items():
            if not 0 <= i < self.nvars:
                raise IndexOutOfRange(f"binding for variable {i} outside 0..{self.nvars - 1}")
            if b.exact != self.exact:
                raise ModeMismatch("binding mode differs from polynomial mode")
            if target is None:
                target = b.nvars
            elif b.nvars != target:
                raise DimensionMismatch("bindings live in rings of different dimension")
        if target is None:
            target = self.nvars
        images = []
        for i in range(self.nvars):
            if i in bindings:
                images.append(bindings[i])
            elif i < target:
                images.append(Polynomial.variable(target, i, self.exact))
            else:
                raise DimensionMismatch(f"variable {i} unbound and absent from target ring")
        powers: dict = {}

        def power(i, e):
            key = (i, e)
            if key not in powers:
                powers[key] = images[i] ** e
            return powers[key]

        result = Polynomial.zero(target, self.exact)
        for m, c in self._terms.items():
            term = Polynomial.constant(target, c, self.exact)
            for i, e in enumerate(m):
                if e:
                    term = term * power(i, e)
            result = result + term
        return result

    def homogeneous_part(self, k: int) -> "Polynomial":
        return Polynomial._raw(self.nvars, {m: c for m, c in self._terms.items() if sum(m) == k},
                               self.exact)

    def weighted_part(self, weights: Sequence[int], w: int) -> "Polynomial":
        return Polynomial._raw(
            self.nvars,
            {m: c for m, c in self._terms.items() if monomial_weight(m, weights) == w},
            self.exact)

    def to_float(self) -> "Polynomial":
        if not self.exact:
            return self
        return Polynomial._raw(self.nvars, {m: float(c) for m, c in self._terms.items()}, False)

    def embed(self, nvars: int) -> "Polynomial":
        """View in a ring with extra trailing variables."""
        if nvars < self.nvars:
            raise DimensionMismatch("cannot embed into a smaller ring")
        pad = (0,) * (nvars - self.nvars)
        return Polynomial._raw(nvars, {m + pad: c for m, c in self._terms.items()}, self.exact)

    # -- display ------------------------------------------------------------
    def to_str(self, names: Sequence[str] | None = None) -> str:
        if names is None:
            names = [f"x{i + 1}" for i in range(self.nvars)]
        if not self._terms:
            return "0"
        parts = []
        for m, c in self._terms.items():
            factors = []
            for name, e in zip(names, m):
                if e == 1:
                    factors.append(name)
                elif e > 1:
                    factors.append(f"{name}^{e}")
            mag = abs(c)
            neg = c < 0
            if factors:
                body = "*".join(factors)
                if mag != 1:
                    body = f"{_fmt(mag)}*{body}"
            else:
                body = _fmt(mag)
            parts.append(("- " if neg else "+ ") + body)
        text = " ".join(parts)
        return text[2:] if text.startswith("+ ") else "-" + text[2:]

    def __str__(self):
        return self.to_str()

    def __repr__(self):
        mode = "exact" if self.exact else "float"
        return f"Polynomial({self.nvars}, {self.to_str()!r}, {mode})"


def _fmt(c) -> str:
    if isinstance(c, Fraction):
        return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"
    return repr(float(c))


def format_scalar(c) -> str:
    """Serialize a scalar: exact fractions as ``"p/q"``, floats via ``repr``."""
    if isinstance(c, Fraction):
        return _fmt(c) if c >= 0 else "-" + _fmt(-c)
    if isinstance(c, complex):
        return repr(c.real) if c.imag == 0 else repr(c)
    if isinstance(c, int) and not isinstance(c, bool):
        return str(c)
    return repr(float(c))


class VectorField:
    """``n`` polynomial components in a common ring of dimension ``n``."""

    __slots__ = ("components", "_jac")

    def __init__(self, components: Sequence[Polynomial]):
        comps = tuple(components)
        if not comps:
            raise DimensionMismatch("vector field needs at least one component")
        n = len(comps)
        for c in comps:
            if c.nvars != n:
                raise DimensionMismatch(f"component in {c.nvars} variables, field has {n}")
            if c.exact != comps[0].exact:
                raise ModeMismatch("vector field components mix exact and float modes")
        self.components = comps
        self._jac = None

    @property
    def n(self) -> int:
        return len(self.components)

    @property
    def exact(self) -> bool:
        return self.components[0].exact

    def __getitem__(self, i):
        return self.components[i]

    def __iter__(self):
        return iter(self.components)

    def __len__(self):
        return len(self.components)

    def __eq__(self, other):
        return isinstance(other, VectorField) and self.components == other.components

    def __hash__(self):
        return hash(self.components)

    def __add__(self, other: "VectorField"):
        return VectorField([a + b for a, b in zip(self, other)])

    def __sub__(self, other: "VectorField"):
        return VectorField([a - b for a, b in zip(self, other)])

    def scale(self, s):
        return VectorField([c.scale(s) for c in self])

    def jacobian(self):
        """``J[k][j] = dF^k/dx^j`` (cached)."""
        if self._jac is None:
            self._jac = tuple(tuple(c.partial(j) for j in range(self.n)) for c in self)
        return self._jac

    def evaluate(self, point):
        return [c.evaluate(point) for c in self]

    def substitute(self, bindings, nvars=None):
        return VectorField([c.substitute(bindings, nvars) for c in self])

    def to_float(self):
        return VectorField([c.to_float() for c in self])

    def is_zero(self):
        return all(c.is_zero() for c in self)

    def degree(self):
        return max(c.degree() for c in self)

    def to_str(self, names=None):
        names = names or [f"x{i + 1}" for i in range(self.n)]
        return "\n".join(f"{nm}' = {c.to_str(names)}" for nm, c in zip(names, self))

    def __repr__(self):
        return "VectorField(" + "; ".join(c.to_str() for c in self) + ")"


def linear_field(matrix, exact=True) -> VectorField:
    """The linear vector field ``x -> A x``."""
    n = len(matrix)
    comps = []
    for row in matrix:
        comps.append(Polynomial(n, {tuple(1 if j == i else 0 for j in range(n)): a
                                    for i, a in enumerate(row) if a != 0}, exact))
    return VectorField(comps)


class NumericPoly:
    """Vectorised float/complex evaluator for a list of polynomials."""

    def __init__(self, polys: Sequence[Polynomial]):
        self.nvars = polys[0].nvars if polys else 0
        monos = sorted({m for p in polys for m in p.monomials()}, key=grlex_key)
        self.exponents = np.array(monos, dtype=float).reshape(len(monos), self.nvars)
        index = {m: i for i, m in enumerate(monos)}
        self.coeffs = np.zeros((len(polys), len(monos)))
        for r, p in enumerate(polys):
            for m, c in p.items():
                self.coeffs[r, index[m]] = float(c)

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x)
        if self.exponents.shape[0] == 0:
            return np.zeros(self.coeffs.shape[0], dtype=x.dtype if np.iscomplexobj(x) else float)
        vals = np.prod(x[None, :] ** self.exponents, axis=1)
        return self.coeffs @ vals


class NumericField:
    """Float/complex evaluation of a vector field and its Jacobian."""

    def __init__(self, field: VectorField):
        self.n = field.n
        self._f = NumericPoly(list(field))
        self._jac = NumericPoly([d for row in field.jacobian() for d in row])

    def __call__(self, x):
        return self._f(x)

    def jacobian(self, x):
        return self._jac(x).reshape(self.n, self.n)
