import io
import json
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from heegner_gaps.arithmetic import ResidueSystem, factor_element
from heegner_gaps.box_sieve import (
    BetaParams,
    beta,
    beta_mask,
    box_arrays,
    census,
    count_box,
    count_norm_le,
    dyadic,
    enumerate_box,
    floor_power,
    full,
    iter_records,
    le_power,
    mitsui_ratio,
    norm_table,
    pi_beta,
    pi_beta_coprime,
    pi_beta_residue,
    pi_flat,
    pi_flat_residue,
    sieve_primes,
    write_records,
)
from heegner_gaps.field_core import HEEGNER_D, QuadInt, make_field, norm

from oracles import BruteField, elements_upto


@given(st.fractions(min_value=Fraction(1, 10), max_value=Fraction(10**4)), st.sampled_from([Fraction(1, 2), Fraction(1, 3), Fraction(2, 5), Fraction(1)]))
def test_floor_power_exact(N, e):
    t = floor_power(N, e)
    assert le_power(t, N, e) and not le_power(t + 1, N, e)


def test_floor_power_perfect_powers():
    assert floor_power(Fraction(100), Fraction(1, 2)) == 10
    assert floor_power(Fraction(27), Fraction(2, 3)) == 9
    assert floor_power(Fraction(99), Fraction(1, 2)) == 9


def test_beta_params_validation():
    with pytest.raises(ValueError):
        BetaParams(b=Fraction(1, 5), theta=Fraction(2, 5))  # b must exceed theta/2
    with pytest.raises(ValueError):
        BetaParams(b=Fraction(3, 5))
    with pytest.raises(ValueError):
        BetaParams(yprime=Fraction(1, 2))
    with pytest.raises(ValueError):
        BetaParams(yprime=Fraction(5)).thresholds(Fraction(10))  # Y' > N^b


@pytest.mark.parametrize("d", HEEGNER_D)
def test_box_enumeration_matches_double_loop(d):
    f = make_field(d)
    brute = sorted(elements_upto(d, 400), key=lambda x: (norm(f, x), x.a, x.b))
    assert list(enumerate_box(f, full(20))) == brute
    assert count_norm_le(f, 400) == len(brute) + 1
    shell = [x for x in brute if norm(f, x) > 100]
    assert list(enumerate_box(f, dyadic(10))) == shell
    assert count_box(f, dyadic(10)).count == len(shell)


def test_segmentation_does_not_change_enumeration():
    f = make_field(-7)
    assert list(enumerate_box(f, full(30), segment_size=37)) == list(enumerate_box(f, full(30)))


def test_empty_and_tiny_boxes():
    f = make_field(-1)
    assert list(enumerate_box(f, full(Fraction(1, 2)))) == []
    assert len(list(enumerate_box(f, full(1)))) == 4
    assert len(list(enumerate_box(f, full(2)))) == 12
    with pytest.raises(ValueError):
        full(0)


@pytest.mark.parametrize("d", [-1, -2, -19])
def test_norm_table_against_factorization(d):
    f = make_field(d)
    t = norm_table(f, 0, 3000)
    for x in elements_upto(d, 3000)[::7]:
        n = norm(f, x)
        r, om, small = t.at(n)
        fac = factor_element(f, x)
        assert om == fac.big_omega
        if om == 2:
            assert small == min(norm(f, p) for p, e in fac.factors)
    # segmented table equals the corresponding slice of the full one
    seg = norm_table(f, 1000, 2000)
    assert (seg.omega == t.omega[1000:2000]).all() and (seg.r == t.r[1000:2000]).all()


def test_census_against_brute_classification():
    d = -3
    f = make_field(d)
    bf = BruteField(d, 900)
    els = [x for xs in bf.by_norm.values() for x in xs]
    c = census(f, full(30))
    assert c.total == len(els)
    assert c.primes == sum(bf.omega(x) == 1 for x in els)
    assert c.g2 == sum(bf.omega(x) == 2 for x in els)
    assert sum(b["total"] for b in c.to_dict()["bands"]) == c.total


def test_census_is_thread_and_segment_independent():
    f = make_field(-2)
    p = BetaParams()
    a = census(f, dyadic(60), p)
    b = census(f, dyadic(60), p, segment_size=999, workers=4)
    assert a.to_dict() == b.to_dict()


def test_gaussian_prime_count():
    f = make_field(-1)
    res = sieve_primes(f, full(5))
    assert len(res.primes) == 32
    assert res.census.primes == 32


@pytest.mark.parametrize("d", [-1, -7, -43])
def test_sieve_primes_matches_brute_force(d):
    f = make_field(d)
    bf = BruteField(d, 2500)
    brute = {x for xs in bf.by_norm.values() for x in xs if bf.omega(x) == 1}
    assert set(sieve_primes(f, full(50)).primes) == brute


def test_beta_examples():
    f = make_field(-1)
    assert beta(f, QuadInt(3, 3), 10, BetaParams(b=Fraction(1, 3), theta=Fraction(2, 5))) == 1
    assert beta(f, QuadInt(2, 0), 10, BetaParams(yprime=Fraction(2))) == 0
    assert beta(f, QuadInt(5, 0), 100, BetaParams()) == 0  # both factors have norm 5
    with pytest.raises(ValueError):
        beta(f, QuadInt(0, 0), 10, BetaParams())


@pytest.mark.parametrize("d", [-1, -11])
def test_beta_mask_agrees_with_pointwise_beta(d):
    f = make_field(d)
    N = Fraction(12)
    p = BetaParams(b=Fraction(1, 3), yprime=Fraction(3, 2))
    lo, hi = dyadic(N).norm_bounds()
    A, B, Nm = box_arrays(f, lo, hi)
    mask = beta_mask(norm_table(f, lo, hi), N, p, Nm)
    for a, b, m in zip(A.tolist(), B.tolist(), mask.tolist()):
        assert beta(f, QuadInt(a, b), N, p) == int(m)


def test_beta_counts_partition():
    f = make_field(-1)
    p = BetaParams()
    N = 20
    total = pi_beta(f, N, p)
    q = QuadInt(2, 1)
    rs = ResidueSystem(f, q)
    assert sum(pi_beta_residue(f, N, p, q, g) for g in rs.representatives()) == total
    cop = sum(pi_beta_residue(f, N, p, q, g) for g in rs.coprime_representatives())
    assert pi_beta_coprime(f, N, p, q) == cop


def test_flat_counts_partition():
    f = make_field(-2)
    q = QuadInt(3, 0)
    rs = ResidueSystem(f, q)
    assert sum(pi_flat_residue(f, 15, q, a) for a in rs.representatives()) == pi_flat(f, 15)


@pytest.mark.parametrize("d", HEEGNER_D)
def test_box_size_near_main_term(d):
    f = make_field(d)
    assert abs(count_box(f, full(300)).ratio - 1) < 0.01
    assert abs(count_box(f, dyadic(300)).ratio - 1) < 0.015


def test_mitsui_ratio_window():
    assert 0.8 <= mitsui_ratio(make_field(-1), 150) <= 1.3


def test_records_stream():
    f = make_field(-1)
    recs = list(iter_records(f, full(3)))
    assert len(recs) == count_box(f, full(3)).count
    assert {"a", "b", "norm", "class"} <= recs[0].keys()
    buf = io.StringIO()
    assert write_records(recs, buf) == len(recs)
    first = json.loads(buf.getvalue().splitlines()[0])
    assert first["norm"] == 1 and first["class"] == "unit"
