"""Balances, Kovalevskaya matrices and exponents of a quasi-homogeneous cut.

For a cut ``g_m`` with grading ``(s, m)``, a balance is a nonzero ``c`` with
``H c + g_m(c) = 0`` where ``H = diag(s) / (m - 1)``; ``t^{-H} c`` is then a
particular solution.  The Kovalevskaya matrix is ``K = H + Dg_m(c)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .config import BalanceOptions
from .errors import UnverifiedBalance, VerificationFailure
from .grading import Grading
from .linalg import charpoly, spectrum
from .polyalg import NumericField, Polynomial, VectorField

FLOAT_RESIDUAL_TOL = 1e-10
SINGULAR_MAX_DENOMINATOR = 1000


@dataclass(frozen=True)
class Balance:
    c: tuple
    residual: float
    origin: str            # "user" | "newton" | "rationalized"

    @property
    def exact(self) -> bool:
        return all(isinstance(v, Fraction) for v in self.c)

    def sc(self, weights) -> list:
        return [s * v for s, v in zip(weights, self.c)]

    def is_degenerate(self, weights) -> bool:
        """``S c = 0``: the particular solution is a constant equilibrium."""
        return all(v == 0 for v in self.sc(weights)) if self.exact else \
            max(abs(complex(v)) for v in self.sc(weights)) < 1e-12

    def as_complex(self) -> np.ndarray:
        return np.array([complex(v) for v in self.c])


@dataclass
class KovalevskayaData:
    K: list
    exponents: list                 # [(value, exact)]
    minus_one_witness: list | None  # S c when nonzero
    witness_ok: bool | None
    charpoly: list = field(default_factory=list)

    @property
    def exact(self) -> bool:
        return all(isinstance(v, Fraction) for row in self.K for v in row)

    def spectrum(self):
        from .resonance import Spectrum

        return Spectrum.from_pairs(self.exponents)


def balance_residual_vector(g_m: VectorField, grading: Grading, c: Sequence):
    H = grading.H
    if all(isinstance(v, Fraction) for v in c) and g_m.exact:
        return [h * v + comp.evaluate(c) for h, v, comp in zip(H, c, g_m)]
    num = NumericField(g_m.to_float())
    x = np.array([complex(v) for v in c])
    return list(np.array([float(h) for h in H]) * x + num(x))


def verify_balance(g_m: VectorField, grading: Grading, c: Sequence, origin="user"):
    """Return a :class:`Balance` if ``c`` solves the balance equation, else None."""
    if all(isinstance(v, (int, Fraction)) for v in c) and g_m.exact:
        c = tuple(Fraction(v) for v in c)
        if all(v == 0 for v in c):
            return None
        res = balance_residual_vector(g_m, grading, c)
        return Balance(c, 0.0, origin) if all(r == 0 for r in res) else None
    c = tuple(complex(v) for v in c)
    if max(abs(v) for v in c) < 1e-8:
        return None
    r = max(abs(v) for v in balance_residual_vector(g_m, grading, c))
    return Balance(c, float(r), origin) if r < FLOAT_RESIDUAL_TOL else None


def _coefficient_radius(g_m: VectorField) -> float:
    mags = [abs(float(c)) for comp in g_m for _, c in comp.items()]
    if not mags:
        return 1.0
    return float(min(1e3, max(1.0, 1.0 / min(mags))))


def _newton(num: NumericField, H: np.ndarray, x: np.ndarray, max_iter=100):
    """``(x, singular)`` on convergence, else None."""
    for _ in range(max_iter):
        G = H * x + num(x)
        J = np.diag(H).astype(complex) + num.jacobian(x)
        try:
            dx = np.linalg.solve(J, -G)
        except np.linalg.LinAlgError:
            break
        x = x + dx
        if not np.all(np.isfinite(x)) or np.abs(x).max() > 1e8:
            return None
        if np.abs(dx).max() < 1e-14 * max(1.0, np.abs(x).max()):
            break
    G = H * x + num(x)
    if not np.all(np.isfinite(G)) or np.abs(G).max() > FLOAT_RESIDUAL_TOL:
        return None
    J = np.diag(H).astype(complex) + num.jacobian(x)
    return x, bool(np.linalg.cond(J) > 1e10)


def _rationalize(x: np.ndarray, max_den: int):
    if np.abs(x.imag).max() > 1e-9:
        return None
    return tuple(Fraction(float(v)).limit_denominator(max_den) for v in x.real)


def _sort_key(b: Balance):
    if b.exact:
        return (0, sum(1 for v in b.c if v != 0), tuple(b.c), ())
    z = b.as_complex()
    return (1, 0, (), tuple((round(v.real, 10), round(v.imag, 10)) for v in z))


def find_balances(g_m: VectorField, grading: Grading, opts: BalanceOptions | None = None):
    """Verified nonzero balances of the cut.

    User candidates are checked exactly; then ``opts.n_starts`` Newton runs
    from random complex starts, each rationalized by continued fractions and
    re-verified exactly when possible.  Non-convergent starts are dropped
    silently; starts converging to a singular point are kept only if they
    snap to a rational balance with denominator <= 1000.
    """
    opts = opts or BalanceOptions()
    found: list[Balance] = []

    def add(b):
        if b is None:
            return
        for other in found:
            if b.exact and other.exact:
                if b.c == other.c:
                    return
            elif np.abs(b.as_complex() - other.as_complex()).max() < opts.dedup_tol:
                return
        found.append(b)

    for cand in opts.candidates:
        add(verify_balance(g_m, grading, cand, "user"))

    num = NumericField(g_m.to_float())
    H = np.array([float(h) for h in grading.H])
    rng = np.random.default_rng(opts.seed)
    radius = _coefficient_radius(g_m)
    n = g_m.n
    for _ in range(opts.n_starts):
        mod = np.sqrt(rng.uniform(0, 1, n)) * radius
        arg = rng.uniform(0, 2 * np.pi, n)
        out = _newton(num, H, mod * np.exp(1j * arg))
        if out is None or np.abs(out[0]).max() < 1e-8:
            continue
        x, singular = out
        b = None
        if g_m.exact:
            # singular endpoints are kept only as small-denominator exact points;
            # generic points of a solution continuum do not snap that way
            den = SINGULAR_MAX_DENOMINATOR if singular else opts.max_denominator
            rat = _rationalize(x, den)
            if rat is not None:
                b = verify_balance(g_m, grading, rat, "rationalized")
        if b is None:
            if singular:
                continue
            xr = np.where(np.abs(x.imag) < 1e-12, x.real + 0j, x)
            b = Balance(tuple(complex(v) for v in xr),
                        float(np.abs(H * xr + num(xr)).max()), "newton")
        add(b)
    return sorted(found, key=_sort_key)


def kovalevskaya_matrix(g_m: VectorField, grading: Grading, balance: Balance) -> KovalevskayaData:
    H = grading.H
    n = g_m.n
    jac = g_m.jacobian()
    if balance.exact and g_m.exact:
        c = list(balance.c)
        K = [[(H[i] if i == j else Fraction(0)) + jac[i][j].evaluate(c) for j in range(n)]
             for i in range(n)]
        cp = charpoly(K)
        exps = spectrum(K)
        sc = balance.sc(grading.weights)
        if any(v != 0 for v in sc):
            Ksc = [sum((K[i][j] * sc[j] for j in range(n)), Fraction(0)) for i in range(n)]
            ok = Ksc == [-v for v in sc]
            if not ok:
                raise VerificationFailure(
                    "K (S c) != -(S c) for an exact balance", balance=balance.c)
            return KovalevskayaData(K, exps, sc, ok, cp)
        return KovalevskayaData(K, exps, None, None, cp)
    num = NumericField(g_m.to_float())
    x = balance.as_complex()
    Kf = np.diag([complex(float(h)) for h in H]) + num.jacobian(x)
    K = [[complex(v) for v in row] for row in Kf]
    exps = spectrum(K)
    sc = np.array([complex(v) for v in balance.sc(grading.weights)])
    if np.abs(sc).max() > 1e-12:
        ok = bool(np.abs(Kf @ sc + sc).max() < 1e-8 * max(1.0, np.abs(sc).max()))
        return KovalevskayaData(K, exps, [complex(v) for v in sc], ok, list(np.poly(Kf)))
    return KovalevskayaData(K, exps, None, None, list(np.poly(Kf)))


def variational_cut(g_m: VectorField, grading: Grading, balance: Balance):
    """``(K, f)`` with ``f(u) = g_m(c + u) + H (c + u) - K u``.

    ``f`` must start at order two; a constant or linear remainder means the
    balance was not a solution.
    """
    if not (balance.exact and g_m.exact):
        raise UnverifiedBalance("variational cut needs an exact balance and field")
    n = g_m.n
    c = balance.c
    data = kovalevskaya_matrix(g_m, grading, balance)
    K = data.K
    H = grading.H
    shift = {i: Polynomial.variable(n, i) + c[i] for i in range(n)}
    comps = []
    for i, comp in enumerate(g_m):
        u = Polynomial.variable(n, i)
        Ku = Polynomial.zero(n)
        for j in range(n):
            Ku = Ku + Polynomial.variable(n, j).scale(K[i][j])
        comps.append(comp.substitute(shift, n) + (u + c[i]).scale(H[i]) - Ku)
    f = VectorField(comps)
    for comp in f:
        if comp.homogeneous_part(0) or comp.homogeneous_part(1):
            raise UnverifiedBalance("variational remainder has constant or linear part",
                                    balance=c)
    return K, f

