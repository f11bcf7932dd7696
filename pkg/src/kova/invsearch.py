"""Linear-algebra search for polynomial tensor invariants.

An ansatz is a finite list of slots ``(index tuple, monomial)``; a tensor in
the ansatz is ``sum_a c_a x^{mono_a} e_{key_a}``.  ``L_F`` is linear in the
coefficients, so invariants are the nullspace of the matrix whose columns are
``L_F`` of the individual slots, with one row per output ``(key, monomial)``.
"""

from __future__ import annotations

import itertools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .config import ResonanceOptions, SearchOptions, worker_count
from .errors import AnsatzTooLarge, KovaError, RankCapExceeded, VerificationFailure
from .grading import Grading
from .linalg import nullspace_exact, nullspace_float, primitive, rank_exact, rank_float, spectrum
from .polyalg import Polynomial, VectorField, linear_field, monomials_of_degree
from .resonance import (BOUNDED_EMPTY, NONEMPTY, PROVED_EMPTY, DegreeWindow, Spectrum,
                        admissible_degree_window, enumerate_fixed_point, enumerate_semi_qh,
                        fixed_point_window)
from .tensorfield import (FLOAT_ZERO_TOL, TensorField, TensorType, TrivialFamily,
                          is_invariant, lie_derivative, permutations)

NO_INVARIANTS = "searched (no invariants)"
GRADED, TOTAL, WINDOW = "graded", "total-degree", "total-degree-window"


@dataclass
class AnsatzSpace:
    ttype: TensorType
    n: int
    mode: str
    slots: list
    weights: tuple | None = None
    degree: int | None = None           # l (graded) or k (total-degree)
    k_range: tuple | None = None        # (k_min, k_max) for the window mode
    max_degree: int | None = None

    def __len__(self):
        return len(self.slots)

    def tensor(self, coeffs, exact=True) -> TensorField:
        comps: dict = {}
        for (key, mono), c in zip(self.slots, coeffs):
            if c == 0:
                continue
            comps.setdefault(key, {})[mono] = c
        return TensorField(self.n, self.ttype,
                           {k: Polynomial(self.n, v, exact) for k, v in comps.items()}, exact)

    def describe(self):
        return {"mode": self.mode, "type": [self.ttype.p, self.ttype.q], "slots": len(self.slots),
                "degree": self.degree, "k_range": list(self.k_range) if self.k_range else None,
                "max_total_degree": self.max_degree}


def weighted_monomials(weights: Sequence[int], w: int, max_degree: int | None = None):
    """Exponent tuples with ``sum s_i k_i = w`` (and total degree <= cap)."""
    n = len(weights)
    if w < 0:
        return
    if any(s == 0 for s in weights) and max_degree is None:
        raise ValueError("a zero weight admits infinitely many monomials; pass max_degree")

    def rec(i, left, budget):
        if i == n:
            if left == 0:
                yield ()
            return
        s = weights[i]
        top = left // s if s else budget
        if budget is not None:
            top = min(top, budget)
        for e in range(top, -1, -1):
            nb = None if budget is None else budget - e
            for rest in rec(i + 1, left - s * e, nb):
                yield (e,) + rest

    yield from rec(0, w, max_degree)


def build_ansatz(ttype: TensorType, mode: str, n: int, weights=None, degree=None,
                 k_range=None, max_degree=None, rank_cap: int = 4) -> AnsatzSpace:
    """Slot list for the graded, total-degree or total-degree-window ansatz.

    Graded slots satisfy ``sum s_i k_i = l - sum s_lower + sum s_upper``.
    Slots are ordered by index tuple, then monomial (highest degree first).
    """
    ttype.check_cap(rank_cap)
    slots = []
    keys = list(itertools.product(range(n), repeat=ttype.rank))
    if mode == GRADED:
        if weights is None or degree is None:
            raise ValueError("graded ansatz needs weights and degree l")
        weights = tuple(weights)
        if len(weights) != n:
            raise ValueError("weights length differs from dimension")
        for key in keys:
            w = degree - sum(weights[j] for j in key[ttype.p:]) + sum(weights[i] for i in key[:ttype.p])
            for mono in weighted_monomials(weights, w, max_degree):
                slots.append((key, mono))
        return AnsatzSpace(ttype, n, mode, slots, weights, degree, None, max_degree)
    if mode == TOTAL:
        if degree is None or degree < 0:
            raise ValueError("total-degree ansatz needs k >= 0")
        k_range = (degree, degree)
    elif mode == WINDOW:
        if k_range is None or k_range[0] < 0 or k_range[1] < k_range[0]:
            raise ValueError("window ansatz needs 0 <= k_min <= k_max")
    else:
        raise ValueError(f"unknown ansatz mode {mode!r}")
    for key in keys:
        for d in range(k_range[0], k_range[1] + 1):
            for mono in monomials_of_degree(n, d):
                slots.append((key, mono))
    return AnsatzSpace(ttype, n, mode, slots, None, degree if mode == TOTAL else None,
                       tuple(k_range), None)


@dataclass
class InvariantBasis:
    basis: list
    dimension: int
    raw_dimension: int
    trivial_quotient: bool
    quotient_status: str                # applied | inapplicable | off
    exactness: str
    trivial_rank: int = 0
    space: dict = field(default_factory=dict)

    def to_json(self, names=None):
        return {"dimension": self.dimension, "raw_dimension": self.raw_dimension,
                "trivial_quotient": self.trivial_quotient,
                "quotient_status": self.quotient_status, "exactness": self.exactness,
                "trivial_rank": self.trivial_rank, "ansatz": self.space,
                "basis": [t.to_str(names) for t in self.basis]}


def constraint_matrix(F: VectorField, space: AnsatzSpace):
    """``(rows, row_keys)``: sparse columns of L_F over the slots, made dense."""
    exact = F.exact
    cols = []
    for key, mono in space.slots:
        T = TensorField(space.n, space.ttype, {key: Polynomial.monomial(mono, 1, exact)}, exact)
        col = {}
        for okey, poly in lie_derivative(T, F).items():
            for omono, c in poly.items():
                col[(okey, omono)] = c
        cols.append(col)
    row_keys = sorted({rk for col in cols for rk in col})
    index = {rk: i for i, rk in enumerate(row_keys)}
    return cols, row_keys, index


def _dense(cols, nrows, index, exact):
    zero = Fraction(0) if exact else 0.0
    rows = [[zero] * len(cols) for _ in range(nrows)]
    for j, col in enumerate(cols):
        for rk, c in col.items():
            rows[index[rk]][j] = c
    return rows


def _trivial_vectors(space: AnsatzSpace, exact: bool):
    """Slot-coordinate vectors of the trivial family, or None if not all present."""
    p, q = space.ttype.p, space.ttype.q
    if p != q:
        return None
    pos = {s: i for i, s in enumerate(space.slots)}
    zero_mono = (0,) * space.n
    vecs = []
    for sigma in permutations(p):
        v = [Fraction(0) if exact else 0.0] * len(space.slots)
        for key, c in TrivialFamily(p, {sigma: 1}).iter_components(space.n):
            i = pos.get((key, zero_mono))
            if i is None:
                return None
            v[i] += c
        vecs.append(v)
    return vecs


def universal_constant_invariants(p: int, n: int, rank_cap: int = 8):
    """``(dimension, family_rank)`` for constant (p,p) tensors killed by every field.

    For a constant tensor ``L_F T`` only involves ``DF``, so being killed by
    all fields is the same as being killed by the ``n^2`` elementary linear
    fields ``x_j d/dx_i``.  The diagonal ones act on a slot by the factor
    (lower count - upper count) of ``i``, so only slots whose upper and lower
    indices agree as multisets survive; the off-diagonal ones are then
    imposed by exact elimination.  ``family_rank`` is the rank of the
    permutation family; equality with ``dimension`` is the completeness check.
    """
    full = build_ansatz(TensorType(p, p), TOTAL, n, degree=0, rank_cap=rank_cap)
    slots = [(key, mono) for key, mono in full.slots if sorted(key[:p]) == sorted(key[p:])]
    space = AnsatzSpace(full.ttype, n, TOTAL, slots, None, 0, (0, 0), None)
    rows = []
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            E = VectorField([Polynomial.variable(n, j) if k == i else Polynomial.zero(n)
                             for k in range(n)])
            cols, row_keys, index = constraint_matrix(E, space)
            rows.extend(_dense(cols, len(row_keys), index, True))
    dim = len(slots) - (rank_exact(rows, len(slots)) if rows else 0)
    fam = rank_exact(_trivial_vectors(space, True), len(slots))
    return dim, fam


def solve_invariants(F: VectorField, space: AnsatzSpace, quotient_trivial: bool = True,
                     tol: float = FLOAT_ZERO_TOL, memory_cap: int = 5_000_000) -> InvariantBasis:
    """Nullspace of ``coeffs -> L_F T`` on the ansatz, re-verified afterwards."""
    if F.n != space.n:
        raise KovaError("field and ansatz dimensions differ")
    exact = F.exact
    ncols = len(space.slots)
    if ncols == 0:
        return InvariantBasis([], 0, 0, False, "inapplicable" if quotient_trivial else "off",
                              "exact" if exact else f"float({tol:g})", 0, space.describe())
    cols, row_keys, index = constraint_matrix(F, space)
    if ncols * len(row_keys) > memory_cap:
        raise AnsatzTooLarge(
            f"constraint matrix {len(row_keys)} x {ncols} exceeds {memory_cap} entries; "
            "lower the tensor rank or the degree", slots=ncols, constraints=len(row_keys))
    rows = _dense(cols, len(row_keys), index, exact)
    if exact:
        null = [primitive(v) for v in nullspace_exact(rows, ncols)]
    else:
        A = np.array(rows, dtype=float).reshape(len(row_keys), ncols)
        null = [[0.0 if abs(x) < 1e-13 else float(x) for x in v] for v in nullspace_float(A, tol)]
    raw = len(null)

    status = "off"
    trank = 0
    kept = null
    if quotient_trivial:
        triv = _trivial_vectors(space, exact)
        if triv is None:
            status = "inapplicable"
        else:
            status = "applied"
            rank = rank_exact if exact else (lambda r, c: rank_float(np.array(r, dtype=float), tol))
            trank = rank(triv, ncols)
            kept, cur = [], list(triv)
            base = trank
            for v in null:
                r = rank(cur + [v], ncols)
                if r > base:
                    kept.append(v)
                    cur.append(v)
                    base = r
            if trank + len(kept) != raw:
                raise VerificationFailure("trivial family is not inside the nullspace",
                                          raw=raw, trivial=trank, kept=len(kept))
    basis = [space.tensor(v, exact) for v in kept]
    for T in basis:
        ok, res = is_invariant(T, F, tol * max(1.0, T.max_abs_coeff() * max(1.0, _fmax(F))))
        if not ok:
            raise VerificationFailure("solved tensor fails L_F T = 0", residual=res.max_abs_coeff())
    return InvariantBasis(basis, len(basis), raw, status == "applied", status,
                          "exact" if exact else f"float({tol:g})", trank, space.describe())


def _fmax(F: VectorField):
    return max((c.max_abs_coeff() for c in F), default=1.0)


# -- scans --------------------------------------------------------------------

CERT_LIMIT = 50      # certificates echoed per degree in JSON


@dataclass
class ScanEntry:
    degree: int
    certificates: list
    dimension: int
    raw_dimension: int
    basis: InvariantBasis | None
    certificate_counts: list = field(default_factory=list)   # per balance
    consistent: bool = True

    def to_json(self, names=None):
        return {"degree": self.degree, "dimension": self.dimension,
                "raw_dimension": self.raw_dimension,
                "certificates": [c.to_json() for c in self.certificates[:CERT_LIMIT]],
                "certificates_total": len(self.certificates),
                "certificate_counts": list(self.certificate_counts),
                "consistent": self.consistent,
                "invariants": self.basis.to_json(names) if self.basis else None}


@dataclass
class ScanReport:
    ttype: TensorType
    mode: str                    # graded | fixed-point
    window: DegreeWindow
    entries: list
    status: str
    per_balance: list = field(default_factory=list)
    violations: list = field(default_factory=list)
    notes: list = field(default_factory=list)
    spectrum: Spectrum | None = None

    @property
    def total_dimension(self):
        return sum(e.dimension for e in self.entries)

    def dimensions(self) -> dict:
        return {e.degree: e.dimension for e in self.entries}

    def to_json(self, names=None):
        return {"type": [self.ttype.p, self.ttype.q], "mode": self.mode, "status": self.status,
                "window": self.window.to_json(), "per_balance_windows": self.per_balance,
                "entries": [e.to_json(names) for e in self.entries],
                "total_dimension": self.total_dimension,
                "violations": self.violations, "notes": self.notes}


def _solve_task(args):
    F, space, quotient, tol, cap = args
    return solve_invariants(F, space, quotient, tol, cap)


def _run_solves(tasks):
    workers = min(worker_count(), len(tasks))
    if workers <= 1:
        return [_solve_task(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_solve_task, tasks))


def _intersect_windows(windows: list) -> DegreeWindow:
    if any(w.status == PROVED_EMPTY for w in windows):
        w0 = next(w for w in windows if w.status == PROVED_EMPTY)
        return DegreeWindow([], w0.lo, w0.hi, PROVED_EMPTY, True)
    degs = set(windows[0].degrees)
    for w in windows[1:]:
        degs &= set(w.degrees)
    lo = max(w.lo for w in windows)
    hi = min(w.hi for w in windows)
    analytic = all(w.analytic for w in windows)
    if not degs and hi < lo and analytic:
        return DegreeWindow([], lo, hi, PROVED_EMPTY, True)
    status = NONEMPTY if degs else BOUNDED_EMPTY
    return DegreeWindow(sorted(degs), lo, hi, status, analytic, windows[0].bound)


def scan_graded(cut: VectorField, grading: Grading, spectra: Sequence[Spectrum],
                ttype: TensorType, opts: SearchOptions | None = None,
                res_opts: ResonanceOptions | None = None) -> ScanReport:
    """Per-degree invariant search on a quasi-homogeneous cut.

    ``spectra`` are the Kovalevskaya exponents of the nondegenerate balances;
    the resonance condition must hold for each of them, so the scanned
    degrees are the intersection of their windows (unless ``opts.degrees``
    overrides).  Every nonzero invariant space is checked against the
    certificate lists of all balances.
    """
    opts = opts or SearchOptions()
    res_opts = res_opts or ResonanceOptions()
    m, weights = grading.degree, grading.weights
    notes = []
    windows = [admissible_degree_window(sp, m, ttype, weights, res_opts) for sp in spectra]
    if windows:
        window = _intersect_windows(windows)
    else:
        window = DegreeWindow([], None, None, BOUNDED_EMPTY, False,
                              note="no nondegenerate balance; degrees must be given")
        notes.append("no balance with S c != 0; resonance window unavailable")
    degrees = list(opts.degrees) if opts.degrees is not None else window.degrees
    per_balance = [w.to_json() for w in windows]
    if not degrees:
        status = window.status
        return ScanReport(ttype, "graded", window, [], status, per_balance, [], notes,
                          spectra[0] if spectra else None)
    if ttype.rank > opts.rank_cap:
        raise RankCapExceeded(f"type {ttype} exceeds rank cap {opts.rank_cap} and its window "
                              "is not provably empty", p=ttype.p, q=ttype.q, cap=opts.rank_cap)
    max_deg = opts.max_degree
    if max_deg is None and any(s == 0 for s in weights):
        max_deg = opts.zero_weight_degree
        notes.append(f"zero weight present: slots truncated at total degree {max_deg}")
    tasks = []
    for l in degrees:
        space = build_ansatz(ttype, GRADED, cut.n, weights, l, max_degree=max_deg,
                             rank_cap=opts.rank_cap)
        tasks.append((cut, space, opts.quotient_trivial, opts.tol, opts.memory_cap))
    results = _run_solves(tasks)
    entries, violations = [], []
    for l, basis in zip(degrees, results):
        certs = [enumerate_semi_qh(sp, m, ttype, l, res_opts) for sp in spectra]
        counts = [len(c) for c in certs]
        consistent = basis.raw_dimension == 0 or all(counts)
        if not consistent:
            violations.append({"degree": l, "dimension": basis.raw_dimension,
                               "certificate_counts": counts})
        entries.append(ScanEntry(l, certs[0] if certs else [], basis.dimension,
                                 basis.raw_dimension, basis, counts, consistent))
    status = NONEMPTY if any(e.dimension for e in entries) else NO_INVARIANTS
    return ScanReport(ttype, "graded", window, entries, status, per_balance, violations, notes,
                      spectra[0] if spectra else None)


def linear_part(F: VectorField):
    """``A = DF(0)``; raises if the origin is not an equilibrium."""
    zero = [Fraction(0) if F.exact else 0.0] * F.n
    if any(v != 0 for v in F.evaluate(zero)):
        raise KovaError("origin is not an equilibrium of the field")
    jac = F.jacobian()
    return [[jac[i][j].evaluate(zero) for j in range(F.n)] for i in range(F.n)]


def fixed_point_spectrum(F: VectorField) -> Spectrum:
    A = linear_part(F)
    return Spectrum.from_pairs(spectrum(A))


def scan_fixed_point(F: VectorField, ttype: TensorType, opts: SearchOptions | None = None,
                     res_opts: ResonanceOptions | None = None) -> ScanReport:
    """Order-by-order search at the equilibrium ``x = 0``.

    The lowest-order part of an invariant is an invariant of the linear
    field ``A x``, so each order ``k`` is solved against ``A x`` with a
    homogeneous degree-``k`` ansatz.
    """
    opts = opts or SearchOptions()
    res_opts = res_opts or ResonanceOptions()
    A = linear_part(F)
    spec = Spectrum.from_pairs(spectrum(A))
    lin = linear_field(A, F.exact)
    window = fixed_point_window(spec, ttype, opts.fixed_point_k_max, res_opts)
    notes = []
    if window.status == PROVED_EMPTY and opts.degrees is None:
        return ScanReport(ttype, "fixed-point", window, [], PROVED_EMPTY, [], [],
                          ["window empty; no solve attempted"], spec)
    if opts.degrees is not None:
        orders = list(opts.degrees)
    else:
        orders = list(range(0, (window.hi if window.hi is not None else opts.fixed_point_k_max) + 1))
    if ttype.rank > opts.rank_cap:
        raise RankCapExceeded(f"type {ttype} exceeds rank cap {opts.rank_cap}",
                              p=ttype.p, q=ttype.q, cap=opts.rank_cap)
    tasks = [(lin, build_ansatz(ttype, TOTAL, F.n, degree=k, rank_cap=opts.rank_cap),
              opts.quotient_trivial, opts.tol, opts.memory_cap) for k in orders]
    results = _run_solves(tasks)
    entries, violations = [], []
    for k, basis in zip(orders, results):
        certs = enumerate_fixed_point(spec, ttype, k, res_opts)
        consistent = basis.raw_dimension == 0 or bool(certs)
        if not consistent:
            violations.append({"degree": k, "dimension": basis.raw_dimension,
                               "certificate_counts": [0]})
        entries.append(ScanEntry(k, certs, basis.dimension, basis.raw_dimension, basis,
                                 [len(certs)], consistent))
    status = NONEMPTY if any(e.dimension for e in entries) else NO_INVARIANTS
    return ScanReport(ttype, "fixed-point", window, entries, status, [], violations, notes, spec)


def full_scan(F: VectorField, g, ttype: TensorType, opts: SearchOptions | None = None,
              res_opts: ResonanceOptions | None = None, spectra=None) -> ScanReport:
    """Dispatch on ``g``: a :class:`Grading` or ``"fixed-point"``.

    Without ``spectra`` the balances of the cut are found here and the
    exponents of the nondegenerate ones are used.
    """
    if isinstance(g, Grading):
        from .grading import decompose
        from .kovalevskaya import find_balances, kovalevskaya_matrix

        dec = decompose(F, g)
        if spectra is None:
            spectra = [kovalevskaya_matrix(dec.cut, dec.grading, b).spectrum()
                       for b in find_balances(dec.cut, dec.grading)
                       if not b.is_degenerate(g.weights)]
        return scan_graded(dec.cut, dec.grading, spectra, ttype, opts, res_opts)
    if g == "fixed-point":
        return scan_fixed_point(F, ttype, opts, res_opts)
    raise ValueError("g must be a Grading or 'fixed-point'")
