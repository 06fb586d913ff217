"""The ten acceptance criteria, each at its stated tolerance.

Run directly (``python tests/test_acceptance.py``) or through pytest; either
way a PASS/FAIL line per criterion is printed at the end.
"""
import itertools
import math
import random
import time
from fractions import Fraction

import pytest

from heegner_gaps.arithmetic import ResidueSystem, classify, iter_ideals_upto, residue_check
from heegner_gaps.box_sieve import count_box, dyadic, enumerate_box, full, mitsui_ratio, sieve_primes
from heegner_gaps.field_core import HEEGNER_D, QuadInt, make_field, norm
from heegner_gaps.functional import ConsistencyError, I2_detail, I3_detail, PolyF, criterion
from heegner_gaps.gap_lab import Which, density_report, equidist_report, find_gap_pairs, verify_pair
from heegner_gaps.tuples import HTuple, is_admissible, modulus_primes
from heegner_gaps.weights import WeightConfig, WeightTable, lambda_growth

from oracles import BruteField

PAIR = HTuple.rational([0, 2])


def note(n: int, msg: str) -> None:
    print(f"[criterion {n}] {msg}")


def test_criterion_01_functional_reproduction():
    t0 = time.perf_counter()
    F = PolyF.standard()
    rep = criterion(F, 2, Fraction(2, 5), Fraction(1, 250), 1, 2)
    positives = [criterion(F, m_K=m).positive for m in (2, 4, 6)]
    elapsed = time.perf_counter() - t0
    i1, (_, q, i2), (_, i3, _) = rep.I1, rep.I2[0], rep.I3[0]
    note(1, f"I1={i1} ({float(i1):.6f}) I2=({q})log4={i2:.9f} I3={i3:.9f} Itilde={rep.Itilde:.9f} t={elapsed:.3f}s")
    assert i1 == Fraction(41, 180) and abs(float(i1) - 0.227778) <= 5e-7
    assert q == Fraction(97, 630) and abs(i2 - 0.213445) <= 5e-6
    assert abs(i2 - float(q) * math.log(4)) < 1e-15
    assert abs(i3 - 0.145387) <= 1e-5
    assert abs(rep.Itilde - 0.059288) <= 1e-4
    assert all(positives)
    assert elapsed < 1


def random_symmetric(rng: random.Random, k: int, deg: int) -> PolyF:
    """Random combination of monomial symmetric polynomials of degree <= deg."""
    terms = {}
    for total in range(deg + 1):
        for exps in itertools.product(range(total + 1), repeat=k):
            if sum(exps) != total or list(exps) != sorted(exps, reverse=True):
                continue
            c = Fraction(rng.randint(-6, 6), rng.randint(1, 4))
            for perm in set(itertools.permutations(exps)):
                terms[perm] = c
    return PolyF(k, terms)


def test_criterion_02_closed_form_vs_quadrature():
    rng = random.Random(2024)
    t0 = time.perf_counter()
    worst = 0.0
    for i in range(50):
        k = 2 if i % 2 == 0 else 3
        F = random_symmetric(rng, k, rng.randint(1, 4))
        assert F.is_symmetric()
        try:
            d2 = I2_detail(F, 1, 5)
            d3 = I3_detail(F, 1, 5, Fraction(1, 250))
        except ConsistencyError as e:
            pytest.fail(str(e))
        worst = max(worst, abs(d2.value - d2.quadrature), abs(d3.value - d3.quadrature))
    elapsed = time.perf_counter() - t0
    note(2, f"max |closed - quad| = {worst:.2e} over 50 polynomials, t={elapsed:.1f}s")
    assert worst <= 1e-9
    assert elapsed < 60


def test_criterion_03_lattice_count():
    t0 = time.perf_counter()
    worst_full = worst_shell = 0.0
    for d in HEEGNER_D:
        f = make_field(d)
        worst_full = max(worst_full, abs(count_box(f, full(1000)).ratio - 1))
        worst_shell = max(worst_shell, abs(count_box(f, dyadic(1000)).ratio - 1))
    elapsed = time.perf_counter() - t0
    note(3, f"max rel dev A0: {worst_full:.2e}, A: {worst_shell:.2e}, t={elapsed:.1f}s")
    assert worst_full <= 0.01 and worst_shell <= 0.015
    assert elapsed < 60


def test_criterion_04_residue_check():
    t0 = time.perf_counter()
    devs = {d: residue_check(make_field(d), 10**6) / make_field(d).c_K - 1 for d in HEEGNER_D}
    elapsed = time.perf_counter() - t0
    note(4, f"max rel dev {max(map(abs, devs.values())):.2e}, t={elapsed:.1f}s")
    assert all(abs(v) <= 0.01 for v in devs.values())
    assert elapsed < 60


@pytest.mark.parametrize("d", [-1, -3, -7])
def test_criterion_05_mitsui_prime_count(d):
    f = make_field(d)
    r300, r600 = mitsui_ratio(f, 300), mitsui_ratio(f, 600)
    note(5, f"d={d}: ratio(300)={r300:.4f} ratio(600)={r600:.4f}")
    assert 0.8 <= r300 <= 1.3
    assert abs(r600 - 1) < abs(r300 - 1)


@pytest.mark.parametrize("d", HEEGNER_D)
def test_criterion_06_oracle_equivalence(d):
    f = make_field(d)
    bf = BruteField(d, 10**4)
    elements = [x for xs in bf.by_norm.values() for x in xs]
    mismatches = [x for x in elements if classify(f, x).big_omega != bf.omega(x)]
    brute_primes = {x for x in elements if bf.omega(x) == 1}
    sieved = sieve_primes(f, full(100)).primes
    note(6, f"d={d}: {len(elements)} elements, {len(mismatches)} mismatches, {len(sieved)} primes")
    assert not mismatches
    assert len(sieved) == len(set(sieved)) and set(sieved) == brute_primes
    if d == -1:
        assert len(sieve_primes(f, full(5)).primes) == 32


def test_criterion_07_admissibility():
    zero_two = {d: bool(is_admissible(make_field(d), PAIR)) for d in HEEGNER_D}
    three = {d: bool(is_admissible(make_field(d), HTuple.rational([0, 2, 6]))) for d in (-1, -2)}
    bad = is_admissible(make_field(-1), HTuple.rational([0, 1]))
    note(7, f"{{0,2}}: {zero_two}; {{0,2,6}}: {three}; {{0,1}} witness norm {bad.witness and bad.witness.norm}")
    assert all(zero_two.values()) and all(three.values())
    assert not bad and bad.witness.norm == 2


def _coprime_to(f, fac, bad):
    return all(p not in bad for p, _ in fac.factors)


@pytest.mark.parametrize("d", HEEGNER_D)
def test_criterion_08_weights(d):
    f = make_field(d)
    F = PolyF.standard()
    worst = max(WeightTable(WeightConfig(f, 2, R, 5, F, PAIR)).inversion_discrepancy() for R in (10, 20, 30))
    # exhaustive support scan at R = 40
    R = 40
    table = WeightTable(WeightConfig(f, 2, R, 5, F, PAIR))
    bad = {P.generator for P in modulus_primes(f, 5)}
    ideals = list(iter_ideals_upto(f, 2 * R))
    wrong = 0
    for (n1, f1), (n2, f2) in itertools.product(ideals, repeat=2):
        if n1 * n2 > 2 * R:
            continue
        gens = [p for p, _ in f1.factors + f2.factors]
        expected = (
            n1 * n2 < R
            and all(e == 1 for _, e in f1.factors + f2.factors)
            and len(set(gens)) == len(gens)
            and _coprime_to(f, f1, bad)
            and _coprime_to(f, f2, bad)
        )
        wrong += (table.lambda_value([f1, f2]) != 0) != expected
    growth = [lambda_growth(WeightConfig(f, 2, R, 5, F, PAIR)) for R in (10, 20, 40)]
    note(8, f"d={d}: inversion {worst:.1e}, support mismatches {wrong}, C(R=10,20,40)={[round(c, 4) for c in growth]}")
    assert worst <= 1e-9
    assert wrong == 0
    assert max(growth) <= 1


def test_criterion_09_gap_pairs():
    f = make_field(-1)
    t0 = time.perf_counter()
    pairs = list(find_gap_pairs(f, PAIR, 200))
    ok = all(verify_pair(f, p) for p in pairs)
    elapsed = time.perf_counter() - t0
    has_known = any((p.alpha1, p.alpha2) == (QuadInt(3, 3), QuadInt(5, 3)) for p in pairs)
    rows = density_report(f, PAIR, 256)
    tested = [r for r in rows if r.N >= 4]
    cum = [r.cumulative_pairs for r in rows]
    note(9, f"{len(pairs)} pairs, all verified={ok}, t={elapsed:.1f}s, cumulative by band {cum}")
    assert len(pairs) >= 10 and has_known and ok
    assert all(norm(f, p.diff) <= 4 for p in pairs)
    assert elapsed < 60
    assert cum == sorted(cum)
    assert all(r.cumulative_pairs > 0 and r.gap_pairs > 0 for r in tested)


def test_criterion_10_equidistribution():
    f = make_field(-1)
    N, Q = Fraction(100), 50
    rep = equidist_report(f, N, Q, Which.PRIMES)
    bf = BruteField(-1, 4 * 10**4)
    primes = [x for x in enumerate_box(f, dyadic(N)) if bf.is_prime(x)]
    worst = 0.0
    for row in rep.rows:
        rs = ResidueSystem(f, row.generator)
        counts = {}
        for x in primes:
            r = rs.reduce(x)
            counts[r] = counts.get(r, 0) + 1
        assert sum(counts.values()) == len(primes)
        cop = list(rs.coprime_representatives())
        eps = max(abs(counts.get(a, 0) - len(primes) / len(cop)) for a in cop)
        worst = max(worst, abs(eps - row.max_eps))
    unit = rep.rows[0]
    beta_rep = equidist_report(f, N, 20, Which.BETA)
    note(10, f"{len(rep.rows)} moduli, recount max diff {worst:.1e}, unit eps {unit.max_eps}, aggregate {rep.total_max_eps:.2f}")
    assert rep.partition_ok and beta_rep.partition_ok
    assert unit.norm == 1 and unit.max_eps == 0 and beta_rep.rows[0].max_eps == 0
    assert worst <= 1e-9
    assert rep.total_max_eps <= len(primes) * len(rep.rows)


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q", "-s"]))
