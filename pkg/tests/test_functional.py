import math
from fractions import Fraction

import numpy as np
import pytest
import sympy
from scipy import integrate

from heegner_gaps.functional import (
    ConsistencyError,
    I1,
    I2,
    I2_detail,
    I3,
    I3_detail,
    PolyF,
    criterion,
    inner_profile,
    integrate_simplex,
    section_square_at_one,
    section_square_integral,
    simplex_monomial,
)

t1, t2, y = sympy.symbols("t1 t2 y", nonnegative=True)
STD_F = 1 - (t1 + t2) + (t1**2 + t2**2)


def sympy_Q(expr):
    """Q(y) for k = 2, m = 1 with the section truncated at the simplex face."""
    inner_low = sympy.integrate(expr, (t1, 0, y))
    inner_high = sympy.integrate(expr, (t1, 0, 1 - t2))
    Q = sympy.integrate(inner_low**2, (t2, 0, 1 - y)) + sympy.integrate(inner_high**2, (t2, 1 - y, 1))
    return sympy.Poly(sympy.expand(Q), y)


def coeffs(poly) -> list[Fraction]:
    out = [Fraction(0)] * (poly.degree() + 1)
    for (j,), c in poly.terms():
        out[j] = Fraction(int(c.p), int(c.q))
    return out


def test_simplex_monomial():
    assert simplex_monomial(2, (0, 0)) == Fraction(1, 2)
    assert simplex_monomial(2, (1, 1)) == Fraction(1, 24)
    assert simplex_monomial(3, (2, 0, 1)) == Fraction(2, math.factorial(6))


def test_I1_exact_value():
    F = PolyF.standard()
    oracle = sympy.integrate(sympy.integrate(STD_F**2, (t2, 0, 1 - t1)), (t1, 0, 1))
    assert I1(F) == Fraction(41, 180) == Fraction(int(oracle.p), int(oracle.q))


def test_I1_monte_carlo():
    F = PolyF.standard()
    rng = np.random.default_rng(20240601)
    X = rng.random((400_000, 2))
    vals = F.evaluate_array(X) ** 2
    est, err = vals.mean(), vals.std() / math.sqrt(len(vals))
    assert abs(est - float(I1(F))) < 5 * err


def test_Q_polynomial_matches_sympy():
    F = PolyF.standard()
    expect = coeffs(sympy_Q(STD_F))
    assert section_square_integral(F, 1) == expect
    assert expect[2:] == [Fraction(7, 10), Fraction(-3, 2), Fraction(37, 18), Fraction(-53, 30), Fraction(17, 18), Fraction(-88, 315)]
    assert section_square_at_one(F, 1) == Fraction(97, 630)


def test_Q_for_constant_function():
    F = PolyF.constant(2)
    assert section_square_integral(F, 1) == [0, 0, 1, Fraction(-2, 3)]
    q, value = I2(F, 1, 5)
    assert q == Fraction(1, 3) and math.isclose(value, math.log(4) / 3, rel_tol=1e-15)


def test_Q_k3_against_nested_quadrature():
    text = "1 - t1 - t2 - t3 + t1*t2 + t2*t3 + t1*t3 + t1^2"
    F = PolyF.parse(text, 3)
    Q = section_square_integral(F, 1)
    a, b, c, h = sympy.symbols("t1 t2 t3 h")
    inner = sympy.lambdify((h, b, c), sympy.integrate(sympy.sympify(text.replace("^", "**")), (a, 0, h)))
    for yv in (0.3, 0.7, 1.0):
        def section(x3, x2):
            hi = min(yv, 1 - x2 - x3)
            return inner(hi, x2, x3) ** 2 if hi > 0 else 0.0

        ref = integrate.dblquad(section, 0, 1, 0, lambda x2: 1 - x2, epsabs=1e-12)[0]
        assert math.isclose(sum(float(c) * yv**j for j, c in enumerate(Q)), ref, rel_tol=1e-7, abs_tol=1e-11)


def test_inner_profile_is_truncated_at_face():
    F = PolyF.standard()
    prof = inner_profile(F, 1, Fraction(1, 2))
    # with t2 = 0.75 the section runs only to 0.25
    expect = sympy.integrate(STD_F.subs(t2, sympy.Rational(3, 4)), (t1, 0, sympy.Rational(1, 4)))
    assert prof([Fraction(3, 4)]) == Fraction(int(expect.p), int(expect.q))
    assert prof([Fraction(2)]) == 0


def test_headline_constants():
    F = PolyF.standard()
    q, i2 = I2(F, 1, 5)
    assert q == Fraction(97, 630)
    assert abs(i2 - 0.213445) < 5e-6
    assert abs(I3(F, 1, 5, Fraction(1, 250)) - 0.145387) < 1e-5
    rep = criterion(F)
    assert abs(rep.Itilde - 0.059288) < 1e-4 and rep.positive


def test_I3_routes_agree():
    det = I3_detail(PolyF.standard(), 1, 5, Fraction(1, 250))
    assert abs(det.value - det.quadrature) < 1e-9
    assert abs(det.value - 0.145386527162418) < 1e-12


def test_positivity_for_larger_m_K():
    F = PolyF.standard()
    assert all(criterion(F, m_K=m).positive for m in (2, 4, 6))


def test_nonsymmetric_F_sums_over_m():
    G = PolyF.parse("1 - t1 - 2*t2 + t1^2", 2)
    rep = criterion(G)
    assert [m for m, _, _ in rep.I2] == [1, 2]
    B = Fraction(5)
    manual = float(Fraction(2) / B) * sum(I2(G, m, B)[1] + I3(G, m, B, Fraction(1, 250)) for m in (1, 2)) - float(I1(G))
    assert math.isclose(rep.Itilde, manual, rel_tol=1e-12)


def test_symmetric_shortcut_equals_explicit_sum():
    F = PolyF.standard()
    B = Fraction(5)
    explicit = sum(I2(F, m, B)[1] + I3(F, m, B, Fraction(1, 250)) for m in (1, 2))
    rep = criterion(F)
    assert math.isclose(rep.Itilde, float(Fraction(2) / B) * explicit - float(I1(F)), rel_tol=1e-12)


def test_support_outside_simplex():
    F = PolyF.standard()
    assert F([0.6, 0.6]) == 0
    assert F([-0.1, 0.2]) == 0
    assert F([0, 0]) == 1


def test_parse_and_arithmetic():
    F = PolyF.parse("1 - (x1 + x2) + (x1^2 + x2^2)", 2)
    assert F == PolyF.standard()
    assert F.is_symmetric() and not PolyF.variable(2, 1).is_symmetric()
    assert integrate_simplex(PolyF.constant(3)) == Fraction(1, 6)
    assert (F - F).is_zero()


def test_parameter_validation():
    F = PolyF.standard()
    with pytest.raises(ValueError):
        criterion(F, k=3)
    with pytest.raises(ValueError):
        criterion(F, theta=0)
    with pytest.raises(ValueError):
        I3(F, 1, 5, Fraction(1, 2))  # B*eta >= 1
    with pytest.raises(ValueError):
        I2(F, 1, 2)


def test_report_serialises():
    d = criterion(PolyF.standard()).to_dict()
    assert d["I1"]["exact"] == "41/180"
    assert d["I2"][0]["rational"] == "97/630"
    assert d["positive"] is True


def test_consistency_error_is_raised(monkeypatch):
    import heegner_gaps.functional as fn

    monkeypatch.setattr(fn, "_kernel_quadrature", lambda *a, **k: 1e6)
    with pytest.raises(ConsistencyError):
        I3_detail(PolyF.standard(), 1, 5, Fraction(1, 250))
