"""Polynomial tensor fields of type (p, q) and their Lie derivative.

Indices are 0-based internally (``0..n-1``); the DSL and reports print them
1-based.  A component key is a tuple of ``p`` upper indices followed by ``q``
lower indices.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Mapping, Sequence

import numpy as np

from .errors import DimensionMismatch, ModeMismatch, RankCapExceeded
from .linalg import solve_exact
from .polyalg import Polynomial, VectorField

DEFAULT_RANK_CAP = 4
FLOAT_ZERO_TOL = 1e-9


@dataclass(frozen=True)
class TensorType:
    p: int
    q: int

    def __post_init__(self):
        if self.p < 0 or self.q < 0:
            raise ValueError(f"tensor ranks must be nonnegative, got ({self.p}, {self.q})")

    @property
    def rank(self):
        return self.p + self.q

    def check_cap(self, cap: int = DEFAULT_RANK_CAP):
        if self.rank > cap:
            raise RankCapExceeded(
                f"type ({self.p},{self.q}) exceeds rank cap p+q <= {cap}; "
                "lower the rank or pass a larger cap", p=self.p, q=self.q, cap=cap)

    def index_tuples(self, n: int):
        return itertools.product(range(n), repeat=self.rank)

    def __str__(self):
        return f"({self.p},{self.q})"


class TensorField:
    """Sparse table ``index tuple -> Polynomial``; absent entries are zero."""

    __slots__ = ("n", "ttype", "exact", "_comps")

    def __init__(self, n: int, ttype: TensorType, components: Mapping | None = None,
                 exact: bool = True):
        self.n = n
        self.ttype = ttype
        self.exact = exact
        comps = {}
        for key, poly in (components or {}).items():
            key = tuple(key)
            if len(key) != ttype.rank:
                raise DimensionMismatch(f"index {key} does not match type {ttype}")
            if any(not 0 <= k < n for k in key):
                raise DimensionMismatch(f"index {key} outside 0..{n - 1}")
            if poly.nvars != n:
                raise DimensionMismatch(f"component in {poly.nvars} variables, expected {n}")
            if poly.exact != exact:
                raise ModeMismatch("tensor component mode differs from tensor mode")
            if not poly.is_zero():
                comps[key] = poly
        self._comps = dict(sorted(comps.items()))

    @classmethod
    def scalar(cls, poly: Polynomial):
        return cls(poly.nvars, TensorType(0, 0), {(): poly}, poly.exact)

    @classmethod
    def vector(cls, vf: VectorField):
        return cls(vf.n, TensorType(1, 0), {(i,): c for i, c in enumerate(vf)}, vf.exact)

    @classmethod
    def zero(cls, n, ttype, exact=True):
        return cls(n, ttype, {}, exact)

    @property
    def p(self):
        return self.ttype.p

    @property
    def q(self):
        return self.ttype.q

    @property
    def components(self) -> dict:
        return dict(self._comps)

    def items(self):
        return self._comps.items()

    def __getitem__(self, key):
        return self._comps.get(tuple(key), Polynomial.zero(self.n, self.exact))

    def is_zero(self) -> bool:
        return not self._comps

    def max_abs_coeff(self) -> float:
        return max((c.max_abs_coeff() for c in self._comps.values()), default=0.0)

    def __eq__(self, other):
        return (isinstance(other, TensorField) and self.n == other.n
                and self.ttype == other.ttype and self.exact == other.exact
                and self._comps == other._comps)

    def __hash__(self):
        return hash((self.n, self.ttype, tuple(self._comps.items())))

    def _check(self, other):
        if other.n != self.n or other.ttype != self.ttype:
            raise DimensionMismatch("tensor dimension/type mismatch")
        if other.exact != self.exact:
            raise ModeMismatch("cannot combine exact and float tensors")

    def __add__(self, other: "TensorField"):
        self._check(other)
        out = dict(self._comps)
        for k, v in other._comps.items():
            out[k] = out[k] + v if k in out else v
        return TensorField(self.n, self.ttype, out, self.exact)

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, s):
        return TensorField(self.n, self.ttype, {k: v.scale(s) for k, v in self._comps.items()},
                           self.exact)

    def map_components(self, fn):
        return TensorField(self.n, self.ttype, {k: fn(v) for k, v in self._comps.items()},
                           self.exact)

    def to_float(self):
        if not self.exact:
            return self
        return TensorField(self.n, self.ttype, {k: v.to_float() for k, v in self._comps.items()},
                           False)

    def evaluate(self, point) -> dict:
        return {k: v.evaluate(point) for k, v in self._comps.items()}

    def to_str(self, names: Sequence[str] | None = None) -> str:
        names = names or [f"x{i + 1}" for i in range(self.n)]
        if not self._comps:
            return "0"
        parts = []
        for key, poly in self._comps.items():
            basis = [f"d/d{names[i]}" for i in key[:self.p]]
            basis += [f"d{names[j]}" for j in key[self.p:]]
            coef = poly.to_str(names)
            if basis:
                coef = f"({coef})" if len(poly) > 1 or coef.startswith("-") else coef
                parts.append(f"{coef} " + " @ ".join(basis))
            else:
                parts.append(coef)
        return " + ".join(parts)

    def __repr__(self):
        return f"TensorField{self.ttype}[{self.to_str()}]"


def _replace(key, pos, value):
    return key[:pos] + (value,) + key[pos + 1:]


def lie_derivative(T: TensorField, F: VectorField) -> TensorField:
    """Lie derivative of ``T`` along ``F``.

    (L_F T)^{I}_{J} = F^s d_s T^{I}_{J}
                      + sum_r T^{I}_{j_1..k..j_q} dF^k/dx^{j_r}
                      - sum_r T^{i_1..l..i_p}_{J} dF^{i_r}/dx^l
    """
    if F.n != T.n:
        raise DimensionMismatch(f"field dimension {F.n} vs tensor dimension {T.n}")
    if F.exact != T.exact:
        raise ModeMismatch("field and tensor modes differ")
    n, p, q = T.n, T.p, T.q
    jac = F.jacobian()
    out: dict = {}

    def add(key, poly):
        if poly.is_zero():
            return
        out[key] = out[key] + poly if key in out else poly

    for key, comp in T.items():
        transport = Polynomial.zero(n, T.exact)
        for s in range(n):
            if not F[s].is_zero():
                d = comp.partial(s)
                if not d.is_zero():
                    transport = transport + F[s] * d
        add(key, transport)
        # covariant slots: component with lower index k feeds outputs j via dF^k/dx^j
        for r in range(q):
            pos = p + r
            k = key[pos]
            for j in range(n):
                dF = jac[k][j]
                if not dF.is_zero():
                    add(_replace(key, pos, j), comp * dF)
        # contravariant slots: component with upper index l feeds outputs i via -dF^i/dx^l
        for r in range(p):
            l = key[r]
            for i in range(n):
                dF = jac[i][l]
                if not dF.is_zero():
                    add(_replace(key, r, i), -(comp * dF))
    return TensorField(n, T.ttype, out, T.exact)


def is_invariant(T: TensorField, F: VectorField, tol: float = FLOAT_ZERO_TOL):
    """``(verdict, residual)`` with residual ``L_F T``.

    Exact mode: structural zero.  Float mode: max coefficient below ``tol``.
    """
    res = lie_derivative(T, F)
    if T.exact:
        return res.is_zero(), res
    return res.max_abs_coeff() < tol, res


def tensor_product(A: TensorField, B: TensorField) -> TensorField:
    """``A (x) B`` with upper indices (A's, B's) then lower (A's, B's)."""
    if A.n != B.n:
        raise DimensionMismatch("tensor product of different dimensions")
    if A.exact != B.exact:
        raise ModeMismatch("tensor product of different modes")
    tt = TensorType(A.p + B.p, A.q + B.q)
    out = {}
    for ka, va in A.items():
        for kb, vb in B.items():
            key = ka[:A.p] + kb[:B.p] + ka[A.p:] + kb[B.p:]
            out[key] = va * vb
    return TensorField(A.n, tt, out, A.exact)


def grade_split(T: TensorField, k: int):
    """Split into (total-degree-k part, remainder)."""
    low, rest = {}, {}
    for key, poly in T.items():
        part = poly.homogeneous_part(k)
        low[key] = part
        rest[key] = poly - part
    return (TensorField(T.n, T.ttype, low, T.exact), TensorField(T.n, T.ttype, rest, T.exact))


def lowest_grade(T: TensorField):
    """Smallest total degree present in any component (None for zero)."""
    degs = [min(c.degrees()) for _, c in T.items()]
    return min(degs) if degs else None


# -- trivial invariants -------------------------------------------------------

@dataclass
class TrivialFamily:
    """Combination ``sum_sigma c_sigma T_sigma`` of the permutation pairings."""

    p: int
    coefficients: dict = field(default_factory=dict)

    def iter_components(self, n: int) -> Iterator:
        """Yield ``(index tuple, coefficient)`` lazily; repeated keys must be summed."""
        for sigma, c in self.coefficients.items():
            if c == 0:
                continue
            for idx in itertools.product(range(n), repeat=self.p):
                yield idx + tuple(idx[s] for s in sigma), c

    def expand(self, n: int, exact: bool = True) -> TensorField:
        acc: dict = {}
        for key, c in self.iter_components(n):
            acc[key] = acc.get(key, 0) + c
        comps = {k: Polynomial.constant(n, v, exact) for k, v in acc.items() if v != 0}
        return TensorField(n, TensorType(self.p, self.p), comps, exact)


def permutations(p: int):
    """Permutations of ``range(p)`` in lexicographic order (identity first)."""
    return list(itertools.permutations(range(p)))


def trivial_family_basis(p: int, n: int, rank_cap: int = DEFAULT_RANK_CAP, exact: bool = True):
    """One (p,p) tensor per permutation sigma of ``range(p)``:

    sum over i_1..i_p of d/dx^{i_1} (x) ... (x) d/dx^{i_p} (x) dx^{i_sigma(1)} (x) ... (x) dx^{i_sigma(p)}.
    """
    if p < 0 or n < 1:
        raise ValueError("need p >= 0 and n >= 1")
    if p > rank_cap:
        raise RankCapExceeded(f"trivial family rank {p} exceeds cap {rank_cap}")
    return [TrivialFamily(p, {sigma: 1}).expand(n, exact) for sigma in permutations(p)]


def is_trivial(T: TensorField):
    """``(verdict, TrivialFamily or None)``.

    True iff ``p == q``, every component is constant and ``T`` lies in the
    span of :func:`trivial_family_basis`.  For ``p >= 4`` the family itself is
    only conjectured complete, so callers should flag such verdicts.
    """
    if T.p != T.q or any(not c.is_constant() for _, c in T.items()):
        return False, None
    p, n = T.p, T.n
    if T.is_zero():
        return True, TrivialFamily(p, {s: Fraction(0) for s in permutations(p)})
    perms = permutations(p)
    keys = set(T.components)
    columns = []
    for sigma in perms:
        col = {}
        for key, c in TrivialFamily(p, {sigma: 1}).iter_components(n):
            col[key] = col.get(key, 0) + c
        keys |= set(col)
        columns.append(col)
    keys = sorted(keys)
    if T.exact:
        rows = [[Fraction(col.get(k, 0)) for col in columns] for k in keys]
        rhs = [T[k].constant_term() for k in keys]
        sol = solve_exact(rows, rhs, len(perms))
        if sol is None:
            return False, None
        return True, TrivialFamily(p, dict(zip(perms, sol)))
    A = np.array([[float(col.get(k, 0)) for col in columns] for k in keys])
    b = np.array([float(T[k].constant_term()) for k in keys])
    sol, *_ = np.linalg.lstsq(A, b, rcond=None)
    if np.abs(A @ sol - b).max() > FLOAT_ZERO_TOL * max(1.0, np.abs(b).max()):
        return False, None
    return True, TrivialFamily(p, dict(zip(perms, (float(v) for v in sol))))


def identity_tensor(n: int, exact: bool = True) -> TensorField:
    return trivial_family_basis(1, n, exact=exact)[0]
