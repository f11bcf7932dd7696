"""Acceptance criteria 1-10, one test each; every test prints a PASS/FAIL line."""

import random
import time
from contextlib import contextmanager
from fractions import Fraction

import numpy as np
import pytest

from kova.config import BalanceOptions, OracleOptions, PipelineConfig, ResonanceOptions, SearchOptions
from kova.dsl import load_system, to_vector_field
from kova.grading import Grading, decompose, rho_scaling
from kova.invsearch import (GRADED, TOTAL, build_ansatz, full_scan, solve_invariants,
                            universal_constant_invariants, weighted_monomials)
from kova.kovalevskaya import find_balances, kovalevskaya_matrix, verify_balance
from kova.oracle import oracle_disagreement, rk4_order_ratio
from kova.pipeline import analyze_grading, scan
from kova.polyalg import Polynomial, VectorField
from kova.resonance import (PROVED_EMPTY, Spectrum, admissible_degree_window,
                            enumerate_fixed_point, fixed_point_window)
from kova.tensorfield import (TensorField, TensorType, identity_tensor, is_invariant, is_trivial,
                              lie_derivative, trivial_family_basis)

from conftest import SYSTEMS
from test_invsearch import sampled_null_dim

F = Fraction


@pytest.fixture
def criterion(capsys):
    @contextmanager
    def run(num, title, budget=None):
        t0 = time.perf_counter()
        info = {}
        try:
            yield info
            dt = time.perf_counter() - t0
            if budget is not None:
                assert dt < budget, f"runtime {dt:.2f}s over budget {budget}s"
        except BaseException as e:
            with capsys.disabled():
                print(f"\nFAIL criterion {num}: {title} ({time.perf_counter() - t0:.2f}s) {e!s:.200}")
            raise
        extra = "".join(f"; {k}={v}" for k, v in info.items())
        with capsys.disabled():
            print(f"\nPASS criterion {num}: {title} ({dt:.2f}s{extra})")
    return run


def system(name, float_mode=False):
    spec = load_system(SYSTEMS / name, float_mode)
    return spec, to_vector_field(spec)


def rand_frac(rng, lo=-4, hi=4, den=3):
    return F(rng.randint(lo * den, hi * den), rng.randint(1, den))


def random_qh(rng, n, s, m, density=0.6):
    comps = []
    for j in range(n):
        terms = [(mono, rand_frac(rng)) for mono in weighted_monomials(s, s[j] + m - 1)
                 if rng.random() < density]
        comps.append(Polynomial(n, terms))
    return VectorField(comps)


def random_field(rng, n, deg, lo=-4, hi=4):
    comps = []
    for _ in range(n):
        terms = [(tuple(rng.randint(0, deg) for _ in range(n)), rand_frac(rng, lo, hi))
                 for _ in range(rng.randint(1, 4))]
        comps.append(Polynomial(n, [(m, c) for m, c in terms if sum(m) <= deg]))
    return VectorField(comps)


def test_criterion_1_lotka_golden(criterion):
    with criterion(1, "Lotka grading, balance, K and exponents exact", budget=1.0) as info:
        spec, Fld = system("lotka.kova")
        ga = analyze_grading(Fld, PipelineConfig())
        assert ga.grading.weights == (1, 1, 1) and ga.grading.degree == 2
        bal = {b.c: k for b, k in zip(ga.balances, ga.kdata)}
        k = bal[(F(0), F(-1), F(0))]
        assert k.K == [[F(-1), 0, 0], [1, F(-1), F(-3)], [0, 0, F(-2)]]
        assert all(isinstance(v, F) for row in k.K for v in row)
        assert sorted(v for v, _ in k.exponents) == [F(-2), F(-1), F(-1)]
        assert all(e for _, e in k.exponents)
        info["balances"] = len(ga.balances)


def test_criterion_2_lotka_scans(criterion):
    with criterion(2, "Lotka invariant scans and empty windows", budget=30.0) as info:
        _, Fld = system("lotka.kova")
        g = Grading((1, 1, 1), 2)
        raw = SearchOptions(quotient_trivial=False)
        spectra = [Spectrum.from_values([F(-1), F(-1), F(-2)])]
        s00 = full_scan(Fld, g, TensorType(0, 0), raw, spectra=spectra)
        assert s00.dimensions() == {0: 1}
        const = s00.entries[0].basis.basis[0]
        assert const[()].is_constant()
        s11 = full_scan(Fld, g, TensorType(1, 1), raw, spectra=spectra)
        assert s11.dimensions() == {0: 1, 1: 0}
        I = s11.entries[0].basis.basis[0]
        assert is_trivial(I)[0] and I.scale(1 / I[(0, 0)].constant_term()) == identity_tensor(3)
        s10 = full_scan(Fld, g, TensorType(1, 0), raw, spectra=spectra)
        assert s10.dimensions() == {-1: 0, 0: 0, 1: 1, 2: 0}
        V = s10.entries[2].basis.basis[0]
        ratio = F(2) / V[(0,)].coefficient((2, 0, 0))
        assert V.scale(ratio) == TensorField.vector(Fld)
        empty = []
        for p in range(3):
            for q in range(p + 1, 6):
                if 2 * q > 3 * p:
                    w = admissible_degree_window(spectra[0], 2, TensorType(p, q), (1, 1, 1))
                    assert w.status == PROVED_EMPTY, (p, q, w)
                    empty.append((p, q))
        assert not (s00.violations or s10.violations or s11.violations)
        info["empty_types"] = len(empty)


def test_criterion_3_oregonator_golden(criterion):
    with criterion(3, "oregonator at a=1, g=2, b=1, e=7/10", budget=30.0) as info:
        spec, Fld = system("oregonator.kova")
        a, g, b, e = (spec.params[k] for k in ("a", "g", "b", "e"))
        # parameter constraints for the extra (1,0) invariant
        assert 1 < g * a * a < 3 and a * b * e < 2
        assert ((a * g + 1 / a) / (b * e)).denominator != 1
        assert ((2 * a * g + 1 / a) / (b * e)).denominator != 1
        ga = analyze_grading(Fld, PipelineConfig(), spec.weights, spec.degree)
        assert ga.decomposition.sign == "negative"
        x, y, z = (Polynomial.variable(3, i) for i in range(3))
        cut = VectorField([(x * x).scale(-2) - x * y, -(x * y), (x * z).scale(F(-7, 10)) + x])
        assert ga.decomposition.cut == cut
        bal = {bb.c: k for bb, k in zip(ga.balances, ga.kdata)}
        k = bal[(F(1), F(-1), F(10, 7))]
        assert sorted(v for v, _ in k.exponents) == [F(-1), F(-1), F(-7, 10)]
        cfg = PipelineConfig()
        s10 = scan(Fld, ga, TensorType(1, 0), cfg)
        assert s10.total_dimension == 2
        target = TensorField(3, TensorType(1, 0), {(2,): z.scale(F(7, 10)) - Polynomial.constant(3, 1)})
        hits = [T for en in s10.entries if en.basis for T in en.basis.basis
                if T[(2,)].constant_term() != 0
                and T.scale(-1 / T[(2,)].constant_term()) == target]
        assert len(hits) == 1
        s11 = scan(Fld, ga, TensorType(1, 1), PipelineConfig(search=SearchOptions(quotient_trivial=False)))
        bases = [T for en in s11.entries if en.basis for T in en.basis.basis]
        assert len(bases) == 1 and is_trivial(bases[0])[0]
        assert scan(Fld, ga, TensorType(1, 1), cfg).total_dimension == 0
        info["window_10"] = s10.window.degrees


def test_criterion_4_linear_float(criterion):
    with criterion(4, "linear system (1, sqrt 2) float resonances and nullspaces", budget=5.0) as info:
        _, Fld = system("artificial.kova", float_mode=True)
        spec = Spectrum.from_values([1.0 + 0j, 1.41421356237309515 + 0j])
        for k in range(1, 7):
            assert enumerate_fixed_point(spec, TensorType(0, 0), k) == []
        opts = SearchOptions(tol=1e-9)
        dims = {}
        for pq, k in [((1, 0), 1), ((1, 1), 0), ((2, 0), 2)]:
            space = build_ansatz(TensorType(*pq), TOTAL, 2, degree=k)
            res = solve_invariants(Fld, space, quotient_trivial=False, tol=1e-9)
            dims[pq] = res.raw_dimension
        assert dims == {(1, 0): 2, (1, 1): 2, (2, 0): 4}
        for p in range(3):
            for q in range(p + 1, 5):
                w = fixed_point_window(spec, TensorType(p, q), 6)
                assert w.status == PROVED_EMPTY, (p, q)
                rep = full_scan(Fld, "fixed-point", TensorType(p, q), opts)
                assert rep.entries == []
        info["dims"] = dims


def test_criterion_5_minus_one_exponent(criterion):
    with criterion(5, "K(Sc) = -Sc for 25 random quasi-homogeneous systems") as info:
        rng = random.Random(5)
        done = checked = 0
        while done < 25:
            n = rng.randint(2, 4)
            s = tuple(rng.randint(1, 3) for _ in range(n))
            m = rng.randint(2, 3)
            if any(not list(weighted_monomials(s, sj + m - 1)) for sj in s):
                continue
            g = Grading(s, m)
            gm = random_qh(rng, n, s, m)
            c = [rand_frac(rng, 1, 3) * rng.choice((1, -1)) for _ in range(n)]
            # fix one coefficient per component so that c solves H c + g_m(c) = 0
            comps = []
            for j in range(n):
                mono = rng.choice(list(weighted_monomials(s, s[j] + m - 1)))
                val = Polynomial.monomial(mono).evaluate(c)
                resid = g.H[j] * c[j] + gm[j].evaluate(c)
                comps.append(gm[j] - Polynomial.monomial(mono, resid / val))
            gm = VectorField(comps)
            bal = verify_balance(gm, g, c)
            assert bal is not None and not bal.is_degenerate(s)
            found = [bal] + [b for b in find_balances(gm, g, BalanceOptions(n_starts=10, seed=done))
                             if b.exact and not b.is_degenerate(s)]
            for b in found:
                K = kovalevskaya_matrix(gm, g, b).K
                sc = b.sc(s)
                assert [sum(K[i][j] * sc[j] for j in range(n)) for i in range(n)] == [-v for v in sc]
                checked += 1
            done += 1
        info["balances_checked"] = checked


def test_criterion_6_scaling_identity(criterion):
    with criterion(6, "rho-scaling identity for L_g T on 25 random pairs") as info:
        rng = random.Random(6)
        count = 0
        while count < 25:
            n = rng.randint(2, 3)
            s = tuple(rng.randint(1, 3) for _ in range(n))
            m = rng.randint(2, 3)
            gm = random_qh(rng, n, s, m)
            tt = TensorType(*rng.choice([(0, 0), (1, 0), (0, 1), (1, 1), (2, 0)]))
            r = rng.randint(-2, 3)
            space = build_ansatz(tt, GRADED, n, s, r)
            if not space.slots:
                continue
            T = space.tensor([rand_frac(rng) if rng.random() < 0.5 else 0 for _ in space.slots])
            L = lie_derivative(T, gm)
            rho = Polynomial.variable(n + 1, n)
            for key, comp in L.items():
                shift = sum(s[i] for i in key[:tt.p]) - sum(s[j] for j in key[tt.p:])
                e = r + m - 1 + shift
                assert rho_scaling(comp, s) == comp.embed(n + 1) * rho ** e
            count += 1
        info["pairs"] = count


def test_criterion_7_trivial_family(criterion):
    with criterion(7, "trivial family annihilated by 50 random fields for p = 0..3") as info:
        rng = random.Random(7)
        for p in range(4):
            n = 2 if p == 3 else 3
            basis = trivial_family_basis(p, n)
            for _ in range(50):
                Fld = random_field(rng, n, 3)
                for T in basis:
                    assert is_invariant(T, Fld)[0]
        # p = 4: report only (completeness of the family is conjectural)
        dim, rank = universal_constant_invariants(4, 2)
        info["p4_n2_universal_dim"] = dim
        info["p4_n2_family_rank"] = rank
        info["p4_all_annihilated"] = all(is_invariant(T, random_field(rng, 2, 3))[0]
                                         for T in trivial_family_basis(4, 2))


def test_criterion_8_oracle_equivalence(criterion):
    with criterion(8, "finite-difference pullback vs symbolic L_F T, RK4 order") as info:
        rng = random.Random(8)
        opts = OracleOptions(samples=20, seed=8)
        worst = 0.0
        types = [(0, 0), (1, 0), (0, 1), (1, 1), (2, 0), (1, 2)]
        for i in range(50):
            n = rng.randint(2, 3)
            # coefficients in [-1, 1]
            Fld = random_field(rng, n, 2, -1, 1)
            tt = TensorType(*types[i % len(types)])
            keys = list(tt.index_tuples(n))
            T = TensorField(n, tt, {key: random_field(rng, n, 2, -1, 1)[0]
                                    for key in rng.sample(keys, min(3, len(keys)))})
            d = oracle_disagreement(Fld, T, 20, OracleOptions(samples=20, seed=i))
            worst = max(worst, d)
            assert d < 1e-6, (i, d)
        _, lot = system("lotka.kova")
        x = Polynomial.variable(3, 0)
        T = TensorField(3, TensorType(1, 0), {(1,): x})
        ratio = rk4_order_ratio(lot, T, [0.3, -0.2, 0.25])
        assert abs(ratio - 16) < 2, ratio
        info["worst"] = f"{worst:.2e}"
        info["rk4_ratio"] = f"{ratio:.2f}"


def test_criterion_9_necessity(criterion):
    with criterion(9, "nonzero invariants only where certificates exist") as info:
        cfg = PipelineConfig(search=SearchOptions(quotient_trivial=False))
        checked = 0
        cases = [("lotka.kova", False, [(0, 0), (1, 0), (0, 1), (1, 1), (0, 2)], range(-2, 4)),
                 ("oregonator.kova", False, [(0, 0), (1, 0), (0, 1), (1, 1)], range(-2, 4)),
                 ("artificial.kova", True, [(0, 0), (1, 0), (0, 1), (1, 1), (2, 0)], range(0, 4))]
        for name, fm, types, degrees in cases:
            spec, Fld = system(name, fm)
            ga = analyze_grading(Fld, cfg, spec.weights, spec.degree)
            for pq in types:
                for forced in (None, tuple(degrees)):
                    c = PipelineConfig(search=SearchOptions(quotient_trivial=False, degrees=forced))
                    rep = scan(Fld, ga, TensorType(*pq), c)
                    assert rep.violations == [], (name, pq, rep.violations)
                    for en in rep.entries:
                        if en.raw_dimension:
                            assert all(en.certificate_counts), (name, pq, en.degree)
                        checked += 1
        info["entries_checked"] = checked


def test_criterion_10_nullspace_oracle(criterion):
    with criterion(10, "exact nullspace vs sampling rank on 30 planar quadratics") as info:
        rng = random.Random(10)
        agree = 0
        for _ in range(30):
            Fld = random_field(rng, 2, 2)
            for pq in [(0, 0), (1, 0), (1, 1)]:
                for k in range(4):
                    space = build_ansatz(TensorType(*pq), TOTAL, 2, degree=k)
                    res = solve_invariants(Fld, space, quotient_trivial=False)
                    assert res.raw_dimension == sampled_null_dim(Fld, space), (Fld, pq, k)
            agree += 1
        assert agree == 30
        info["instances"] = agree
