"""Exact and float linear algebra used by the invariant search and the
Kovalevskaya module.

Exact routines work on lists of :class:`~fractions.Fraction` rows and never
round.  Elimination is fraction-free (Bareiss): every row is scaled to
integers once, and all later updates are exact integer divisions by the
previous pivot, which keeps entry growth polynomial.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import VerificationFailure

PIVOT_TOL = 1e-9


def _integer_rows(rows: Sequence[Sequence]) -> list[list[int]]:
    out = []
    for row in rows:
        row = [Fraction(v) for v in row]
        den = 1
        for v in row:
            den = den * v.denominator // math.gcd(den, v.denominator)
        out.append([int(v * den) for v in row])
    return out


def bareiss_echelon(rows: Sequence[Sequence], ncols: int):
    """Fraction-free row echelon form.

    Returns ``(M, pivots)`` with ``M`` an integer matrix (list of lists)
    whose first ``len(pivots)`` rows are in echelon form with pivot columns
    ``pivots``.
    """
    M = _integer_rows(rows)
    nrows = len(M)
    pivots: list[int] = []
    prev = 1
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        pr = next((i for i in range(r, nrows) if M[i][c] != 0), None)
        if pr is None:
            continue
        if pr != r:
            M[r], M[pr] = M[pr], M[r]
        piv = M[r][c]
        pivot_row = M[r]
        for i in range(r + 1, nrows):
            row = M[i]
            a = row[c]
            if a == 0:
                if prev != 1 or piv != 1:
                    for j in range(c + 1, ncols):
                        num = piv * row[j]
                        q, rem = divmod(num, prev)
                        if rem:
                            raise VerificationFailure("non-exact Bareiss division")
                        row[j] = q
                continue
            for j in range(c + 1, ncols):
                num = piv * row[j] - a * pivot_row[j]
                q, rem = divmod(num, prev)
                if rem:
                    raise VerificationFailure("non-exact Bareiss division")
                row[j] = q
            row[c] = 0
        prev = piv
        pivots.append(c)
        r += 1
    return M, pivots


def rank_exact(rows: Sequence[Sequence], ncols: int) -> int:
    if not rows:
        return 0
    return len(bareiss_echelon(rows, ncols)[1])


def nullspace_exact(rows: Sequence[Sequence], ncols: int) -> list[list[Fraction]]:
    """Basis of ``{v : A v = 0}``, one vector per free column.

    Each vector has a 1 in its free column and 0 in the other free columns,
    so the basis is canonical for a given column order.
    """
    if not rows:
        return [[Fraction(int(i == j)) for i in range(ncols)] for j in range(ncols)]
    M, pivots = bareiss_echelon(rows, ncols)
    pivot_set = set(pivots)
    free = [c for c in range(ncols) if c not in pivot_set]
    basis = []
    for f in free:
        x = [Fraction(0)] * ncols
        x[f] = Fraction(1)
        for r in range(len(pivots) - 1, -1, -1):
            pc = pivots[r]
            row = M[r]
            s = sum((row[j] * x[j] for j in range(pc + 1, ncols) if row[j] and x[j]), Fraction(0))
            x[pc] = -s / row[pc]
        basis.append(x)
    return basis


def primitive(vec: Sequence[Fraction]) -> list[Fraction]:
    """Scale to coprime integers with a positive leading nonzero entry."""
    den = 1
    for v in vec:
        den = den * v.denominator // math.gcd(den, v.denominator)
    ints = [int(v * den) for v in vec]
    g = 0
    for v in ints:
        g = math.gcd(g, v)
    if g == 0:
        return [Fraction(0)] * len(vec)
    lead = next(v for v in ints if v)
    if lead < 0:
        g = -g
    return [Fraction(v // g) for v in ints]


def solve_exact(rows: Sequence[Sequence], rhs: Sequence, ncols: int):
    """One solution of ``A x = b`` or ``None`` if inconsistent."""
    aug = [list(r) + [-Fraction(b)] for r, b in zip(rows, rhs)]
    for v in nullspace_exact(aug, ncols + 1):
        if v[-1] != 0:
            return [vi / v[-1] for vi in v[:-1]]
    return None


def nullspace_float(A: np.ndarray, tol: float = PIVOT_TOL) -> np.ndarray:
    """Nullspace by Gaussian elimination with complete pivoting.

    Pivots smaller than ``tol * max(1, max|A|)`` count as zero.  Returns an
    array of shape ``(k, ncols)``; each vector has unit max-norm.
    """
    A = np.array(A, dtype=float, copy=True)
    nrows, ncols = A.shape
    if nrows == 0:
        return np.eye(ncols)
    thresh = tol * max(1.0, float(np.abs(A).max()) if A.size else 1.0)
    col_perm = np.arange(ncols)
    r = 0
    for _ in range(min(nrows, ncols)):
        sub = np.abs(A[r:, r:])
        idx = np.unravel_index(np.argmax(sub), sub.shape)
        if sub[idx] <= thresh:
            break
        pi, pj = idx[0] + r, idx[1] + r
        A[[r, pi]] = A[[pi, r]]
        A[:, [r, pj]] = A[:, [pj, r]]
        col_perm[[r, pj]] = col_perm[[pj, r]]
        A[r] = A[r] / A[r, r]
        below = A[r + 1:, r].copy()
        A[r + 1:] -= np.outer(below, A[r])
        r += 1
    rank = r
    basis = []
    for f in range(rank, ncols):
        x = np.zeros(ncols)
        x[f] = 1.0
        for i in range(rank - 1, -1, -1):
            x[i] = -A[i, i + 1:] @ x[i + 1:]
        v = np.zeros(ncols)
        v[col_perm] = x
        basis.append(v / np.abs(v).max())
    return np.array(basis).reshape(len(basis), ncols)


def rank_float(A: np.ndarray, tol: float = PIVOT_TOL) -> int:
    A = np.atleast_2d(np.asarray(A, dtype=float))
    return A.shape[1] - nullspace_float(A, tol).shape[0]


# -- characteristic polynomial and spectrum ---------------------------------

def _matmul_vec(A, v):
    return [sum((a * b for a, b in zip(row, v)), Fraction(0) if isinstance(v[0], Fraction) else 0)
            for row in A]


def charpoly(K: Sequence[Sequence]) -> list:
    """Coefficients of ``det(t I - K)``, highest degree first (monic).

    Berkowitz's algorithm: division-free, so exact inputs stay exact.
    """
    K = [list(r) for r in K]
    n = len(K)
    one = Fraction(1) if n and isinstance(K[0][0], Fraction) else 1
    if n == 0:
        return [one]
    if n == 1:
        return [one, -K[0][0]]
    a = K[0][0]
    R = K[0][1:]
    C = [K[i][0] for i in range(1, n)]
    A = [row[1:] for row in K[1:]]
    diags = [C]
    for _ in range(n - 2):
        diags.append(_matmul_vec(A, diags[-1]))
    scalars = [one, -a] + [-sum(r * d for r, d in zip(R, vec)) for vec in diags]
    sub = charpoly(A)
    out = []
    for i in range(n + 1):
        s = 0 * one
        for j in range(n):
            if i >= j and i - j < len(scalars):
                s += scalars[i - j] * sub[j]
        out.append(s)
    return out


def poly_eval(coeffs, x):
    acc = 0 * coeffs[0]
    for c in coeffs:
        acc = acc * x + c
    return acc


def _deflate(coeffs, root):
    out = [coeffs[0]]
    for c in coeffs[1:-1]:
        out.append(c + out[-1] * root)
    return out


def _divisors(k: int, limit: int = 10**12):
    k = abs(k)
    if k == 0 or k > limit:
        return None
    small, large = [], []
    d = 1
    while d * d <= k:
        if k % d == 0:
            small.append(d)
            if d * d != k:
                large.append(k // d)
        d += 1
    return small + large[::-1]


def rational_roots(coeffs: Sequence[Fraction]):
    """Rational roots (with multiplicity) of an exact univariate polynomial.

    Returns ``(roots, residual_coeffs)`` where ``residual_coeffs`` has no
    rational roots left.  Candidates come from the rational root theorem when
    the integer-cleared constants are small enough to factor by trial
    division; otherwise from rationalized float roots.  Every candidate is
    accepted only after exact evaluation.
    """
    coeffs = [Fraction(c) for c in coeffs]
    while len(coeffs) > 1 and coeffs[0] == 0:
        coeffs = coeffs[1:]
    roots: list[Fraction] = []
    while len(coeffs) > 1 and coeffs[-1] == 0:
        roots.append(Fraction(0))
        coeffs = coeffs[:-1]
    changed = True
    while changed and len(coeffs) > 1:
        changed = False
        ints = _integer_rows([coeffs])[0]
        lead, const = ints[0], ints[-1]
        cands = None
        dp, dq = _divisors(const, 10**10), _divisors(lead, 10**10)
        if dp is not None and dq is not None and len(dp) * len(dq) <= 20000:
            cands = sorted({Fraction(s * p, q) for p in dp for q in dq for s in (1, -1)})
        else:
            approx = np.roots([float(c) for c in coeffs])
            cands = sorted({Fraction(float(z.real)).limit_denominator(10**6)
                            for z in approx if abs(z.imag) < 1e-6 * max(1.0, abs(z))})
        for cand in cands:
            if poly_eval(coeffs, cand) == 0:
                while len(coeffs) > 1 and poly_eval(coeffs, cand) == 0:
                    roots.append(cand)
                    coeffs = _deflate(coeffs, cand)
                changed = True
                break
    return sorted(roots), coeffs


def spectrum(K: Sequence[Sequence]):
    """Eigenvalues of ``K`` as ``[(value, exact)]``.

    Exact matrices yield :class:`Fraction` eigenvalues for every rational
    root of the characteristic polynomial; the remaining factor is solved by
    companion-matrix eigenvalues (complex floats, ``exact=False``).
    """
    exact = all(isinstance(v, Fraction) for row in K for v in row)
    if not exact:
        vals = np.linalg.eigvals(np.array(K, dtype=complex))
        return sorted(((complex(v), False) for v in vals), key=lambda p: (p[0].real, p[0].imag))
    cp = charpoly(K)
    roots, rest = rational_roots(cp)
    out = [(r, True) for r in roots]
    if len(rest) > 1:
        for z in np.roots([float(c) for c in rest]):
            out.append((complex(z), False))
    return sorted(out, key=lambda p: (complex(p[0]).real, complex(p[0]).imag, not p[1]))
