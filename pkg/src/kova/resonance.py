"""Bounded enumeration of resonance conditions on a spectrum.

Fixed point (eigenvalues of the linear part):

    sum_j k_j lam_j = lam_{i_1} + .. + lam_{i_p} - lam_{j_1} - .. - lam_{j_q},  sum k = k

Along a balance (Kovalevskaya exponents, grading degree m, tensor degree l):

    -l/(m-1) + sum_j k_j lam_j = same right side

Index tuples are multisets on each side.  A candidate is tested exactly
when every eigenvalue entering with a nonzero net coefficient is exact, and
with a relative float tolerance otherwise.
"""

from __future__ import annotations

import itertools
import math
from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache
from fractions import Fraction
from typing import Sequence

from .config import ResonanceOptions
from .errors import VerificationFailure
from .polyalg import format_scalar
from .tensorfield import TensorType

PROVED_EMPTY = "window empty (proved)"
BOUNDED_EMPTY = "searched and empty (bounded)"
NONEMPTY = "nonempty"


@dataclass(frozen=True)
class Spectrum:
    values: tuple
    exact: tuple

    def __post_init__(self):
        if len(self.values) != len(self.exact):
            raise ValueError("values and exactness flags differ in length")

    @classmethod
    def from_pairs(cls, pairs):
        vals, flags = [], []
        for v, e in pairs:
            vals.append(Fraction(v) if e else complex(v))
            flags.append(bool(e))
        return cls(tuple(vals), tuple(flags))

    @classmethod
    def from_values(cls, values):
        """Fractions/ints are exact; floats and complex numbers are not."""
        pairs = [(v, isinstance(v, (int, Fraction))) for v in values]
        return cls.from_pairs(pairs)

    @property
    def n(self):
        return len(self.values)

    @property
    def all_exact(self):
        return all(self.exact)

    def real_parts(self):
        return [float(v) if e else v.real for v, e in zip(self.values, self.exact)]

    def index_of(self, value) -> int | None:
        for i, (v, e) in enumerate(zip(self.values, self.exact)):
            if e and v == value:
                return i
        return None

    def to_json(self):
        return [{"value": format_scalar(v), "exact": e} for v, e in zip(self.values, self.exact)]


@dataclass(frozen=True)
class ResonanceSolution:
    k: tuple
    upper: tuple
    lower: tuple
    l: int | None
    residual: object
    tautological: bool
    exact: bool = True

    def to_json(self):
        return {"k": list(self.k), "upper": [i + 1 for i in self.upper],
                "lower": [j + 1 for j in self.lower], "l": self.l,
                "residual": format_scalar(self.residual), "tautological": self.tautological}


@dataclass
class DegreeWindow:
    """Tensor degrees (or orders) not excluded by the resonance conditions."""

    degrees: list
    lo: int | None
    hi: int | None
    status: str
    analytic: bool
    bound: int | None = None        # k_max used when the window is search-bounded
    note: str = ""
    per_degree: dict = field(default_factory=dict)   # degree -> #certificates

    @property
    def empty(self):
        return not self.degrees

    def to_json(self):
        return {"degrees": list(self.degrees), "lo": self.lo, "hi": self.hi,
                "status": self.status, "analytic": self.analytic, "bound": self.bound,
                "note": self.note}


def compositions(total: int, n: int):
    """Nonnegative integer vectors of length ``n`` summing to ``total`` (lex order)."""
    if n == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in compositions(total - first, n - 1):
            yield (first,) + rest


def _pairs(n: int, ttype: TensorType):
    ups = list(itertools.combinations_with_replacement(range(n), ttype.p))
    lows = list(itertools.combinations_with_replacement(range(n), ttype.q))
    return [(u, w) for u in ups for w in lows]


def _net(n, k, upper, lower):
    net = list(k)
    for i in upper:
        net[i] -= 1
    for j in lower:
        net[j] += 1
    return net


def is_tautological(k, upper, lower, l=None) -> bool:
    """Lower multiset inside the upper one and ``k = counts(upper - lower)``.

    With the balance form this also needs ``l = 0``.  Covers the ``k = 0``,
    ``p = q`` matching-index case.
    """
    if l not in (None, 0):
        return False
    diff = Counter(upper)
    diff.subtract(Counter(lower))
    if any(v < 0 for v in diff.values()):
        return False
    return all(k[i] == diff.get(i, 0) for i in range(len(k)))


def _check(spec: Spectrum, k, upper, lower, offset, tol):
    """``(ok, residual, exact)`` for ``offset + sum k lam - rhs``."""
    net = _net(spec.n, k, upper, lower)
    exact_part = Fraction(offset)
    float_part = 0j
    scale = abs(float(offset)) + 1.0
    inexact_used = False
    for c, v, e in zip(net, spec.values, spec.exact):
        if c == 0:
            continue
        if e:
            exact_part += c * v
        else:
            float_part += c * v
            inexact_used = True
    if not inexact_used:
        return exact_part == 0, exact_part, True
    for kj, v in zip(k, spec.values):
        scale += abs(kj * complex(v))
    for i in itertools.chain(upper, lower):
        scale += abs(complex(spec.values[i]))
    r = complex(float(exact_part)) + float_part
    ok = abs(r.real) <= tol * scale and abs(r.imag) <= tol * scale
    return ok, abs(r), False


def _lcm_den(values) -> int:
    d = 1
    for v in values:
        d = d * v.denominator // math.gcd(d, v.denominator)
    return d


@lru_cache(maxsize=64)
def _scaled(values: tuple) -> tuple:
    D = _lcm_den(values)
    return tuple(int(v * D) for v in values)


@lru_cache(maxsize=64)
def _kvector_sums(scaled: tuple, totals: tuple):
    """Map ``sum k_j scaled_j -> [k]`` over all ``k`` with ``sum k`` in ``totals``."""
    table: dict = {}
    for total in totals:
        for k in compositions(total, len(scaled)):
            table.setdefault(sum(a * b for a, b in zip(k, scaled)), []).append(k)
    return table


def _enumerate_exact(spec, ttype, k_values, offset, l):
    # integer arithmetic: scale every value by the common denominator D
    D = _lcm_den(list(spec.values) + [Fraction(offset)])
    scaled = tuple(int(v * D) for v in spec.values)
    table = _kvector_sums(scaled, tuple(k_values))
    off = int(Fraction(offset) * D)
    out = []
    for upper, lower in _pairs(spec.n, ttype):
        target = sum(scaled[i] for i in upper) - sum(scaled[j] for j in lower) - off
        for k in table.get(target, ()):
            out.append(ResonanceSolution(k, upper, lower, l, Fraction(0),
                                         is_tautological(k, upper, lower, l), True))
    return out


def _enumerate(spec, ttype, k_values, offset, tol, l=None):
    if spec.all_exact:
        out = _enumerate_exact(spec, ttype, k_values, offset, l)
    else:
        out = []
        pairs = _pairs(spec.n, ttype)
        for total in k_values:
            for k in compositions(total, spec.n):
                for upper, lower in pairs:
                    ok, res, ex = _check(spec, k, upper, lower, offset, tol)
                    if ok:
                        out.append(ResonanceSolution(k, upper, lower, l, res,
                                                     is_tautological(k, upper, lower, l), ex))
    out.sort(key=lambda s: (sum(s.k), tuple(-x for x in s.k), s.upper, s.lower))
    return out


def enumerate_fixed_point(spec: Spectrum, ttype: TensorType, k: int,
                          opts: ResonanceOptions | None = None):
    """All solutions of order exactly ``k`` (tautological ones flagged)."""
    if k < 0:
        raise ValueError("order k must be nonnegative")
    opts = opts or ResonanceOptions()
    return _enumerate(spec, ttype, (k,), Fraction(0), opts.tol)


def rewritten_holds(spec: Spectrum, m: int, sol: ResonanceSolution, minus_one: int) -> bool:
    """Check the ``l >= 0`` rewritten form for a balance-form solution.

    With ``lam[minus_one] = -1`` put ``k1' = l + (m-1) k1`` and
    ``kj' = (m-1) kj``; then ``sum k' lam = (m-1) rhs`` and ``k1' >= l``.
    """
    kp = [(m - 1) * kj for kj in sol.k]
    kp[minus_one] += sol.l
    if kp[minus_one] < sol.l:
        return False
    lhs_net = list(kp)
    for i in sol.upper:
        lhs_net[i] -= m - 1
    for j in sol.lower:
        lhs_net[j] += m - 1
    if spec.all_exact:
        scaled = _scaled(spec.values)
        return sum(c * v for c, v in zip(lhs_net, scaled) if c) == 0
    if all(e for c, e in zip(lhs_net, spec.exact) if c):
        return sum((c * v for c, v, e in zip(lhs_net, spec.values, spec.exact) if c),
                   Fraction(0)) == 0
    r = sum(c * complex(v) for c, v in zip(lhs_net, spec.values))
    scale = 1.0 + sum(abs(c * complex(v)) for c, v in zip(lhs_net, spec.values))
    return abs(r) <= 1e-8 * scale


def enumerate_semi_qh(spec: Spectrum, m: int, ttype: TensorType, l: int,
                      opts: ResonanceOptions | None = None):
    """Balance-form solutions with ``sum k <= opts.k_max``.

    For ``l >= 0`` and an exact exponent ``-1`` every solution is also
    re-checked in the rewritten form; a disagreement is an internal error.
    """
    if m < 2:
        raise ValueError("grading degree m must be >= 2")
    opts = opts or ResonanceOptions()
    sols = _enumerate(spec, ttype, tuple(range(opts.k_max + 1)), Fraction(-l, m - 1),
                      opts.tol, l)
    if l >= 0:
        idx = spec.index_of(Fraction(-1))
        if idx is not None:
            for s in sols:
                if not rewritten_holds(spec, m, s, idx):
                    raise VerificationFailure("rewritten resonance form disagrees",
                                              k=s.k, l=l)
    return sols


def _floor(x) -> int:
    if isinstance(x, Fraction):
        return math.floor(x)
    return math.floor(x + 1e-9)


def _extreme_rhs(spec: Spectrum, ttype: TensorType, sign: int):
    """max over index tuples of ``sign * Re(sum lam_lower - sum lam_upper)``."""
    re = [v if e else v.real for v, e in zip(spec.values, spec.exact)]
    lo_term = max(sign * r for r in re) if ttype.q else 0
    up_term = max(-sign * r for r in re) if ttype.p else 0
    return ttype.q * lo_term + ttype.p * up_term


def admissible_degree_window(spec: Spectrum, m: int, ttype: TensorType, weights: Sequence[int],
                             opts: ResonanceOptions | None = None) -> DegreeWindow:
    """Integer degrees ``l`` for which the balance-form resonance can hold.

    Lower end: a graded slot needs ``l + sum s_upper - sum s_lower >= 0``,
    so ``l >= q min(s) - p max(s)``.  Upper end, when every exponent has
    ``Re <= 0``: ``l = (m-1)(sum k lam + sum lam_lower - sum lam_upper)``
    is at most ``(m-1) max Re(sum lam_lower - sum lam_upper)``.  If some
    exponent has positive real part the upper end comes from ``k_max``.
    Inside the interval only degrees with a certificate are kept.
    """
    opts = opts or ResonanceOptions()
    lo = ttype.q * min(weights) - ttype.p * max(weights)
    re = spec.real_parts()
    analytic = all(r <= 1e-12 for r in re)
    if analytic:
        hi = _floor((m - 1) * _extreme_rhs(spec, ttype, +1))
    else:
        top = max(re)
        hi = _floor((m - 1) * (opts.k_max * top + _extreme_rhs(spec, ttype, +1)))
    if hi < lo:
        return DegreeWindow([], lo, hi, PROVED_EMPTY if analytic else BOUNDED_EMPTY,
                            analytic, None if analytic else opts.k_max)
    degrees, per = [], {}
    for l in range(lo, hi + 1):
        sols = enumerate_semi_qh(spec, m, ttype, l, opts)
        per[l] = len(sols)
        if sols:
            degrees.append(l)
    status = NONEMPTY if degrees else BOUNDED_EMPTY
    return DegreeWindow(degrees, lo, hi, status, analytic, opts.k_max, per_degree=per)


def fixed_point_window(spec: Spectrum, ttype: TensorType, k_max: int = 6,
                       opts: ResonanceOptions | None = None) -> DegreeWindow:
    """Orders ``k`` at which the fixed-point resonance can hold.

    When all eigenvalues have real parts of one strict sign the left side
    grows linearly in ``k``, giving an analytic cap on ``k``; otherwise the
    search stops at ``k_max``.
    """
    opts = opts or ResonanceOptions()
    re = spec.real_parts()
    analytic = False
    hi = k_max
    if re and (all(r > 1e-12 for r in re) or all(r < -1e-12 for r in re)):
        sign = 1 if re[0] > 0 else -1
        # k * min|Re lam| <= max sign*Re(rhs) = max sign*(sum up - sum low)
        rhs_max = _extreme_rhs(spec, ttype, -sign)
        floor_lam = min(abs(r) for r in re)
        cap = rhs_max / floor_lam if isinstance(rhs_max, Fraction) and isinstance(floor_lam, Fraction) \
            else float(rhs_max) / float(floor_lam)
        if cap < 0:
            return DegreeWindow([], 0, -1, PROVED_EMPTY, True)
        analytic = _floor(cap) <= k_max
        hi = min(_floor(cap), k_max)
    degrees, per = [], {}
    for k in range(0, hi + 1):
        sols = enumerate_fixed_point(spec, ttype, k, opts)
        per[k] = len(sols)
        if sols:
            degrees.append(k)
    if degrees:
        status = NONEMPTY
    else:
        status = PROVED_EMPTY if analytic else BOUNDED_EMPTY
    return DegreeWindow(degrees, 0, hi, status, analytic, None if analytic else k_max,
                        per_degree=per)
