"""Exact and high-precision evaluation of the sieve functionals.

For a polynomial cutoff F on the simplex R_k = {x in [0,1]^k : sum x <= 1}:

    I1         = integral over R_k of F^2
    I2^(m)     = log(B - 1) * Q(1)
    I3^(m)     = integral_{B eta}^{1} B / (y (B - y)) Q(y) dy

where Q(y) integrates over the other k-1 coordinates the square of the
section integral of F in coordinate m from 0 to min(y, 1 - sum of others).
F vanishes outside R_k, so the section is cut at the simplex face.

Everything up to the final outer integral is exact rational arithmetic:
monomials are integrated with the Dirichlet formula
    integral over {x >= 0, sum x <= t} of x^a dx = t^(n + |a|) prod(a_i!) / (n + |a|)!
and the outer kernel splits as B/(y(B-y)) = 1/y + 1/(B-y), leaving a rational
plus rational multiples of two logarithms.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

import mpmath
import numpy as np
from scipy import integrate

Exps = tuple[int, ...]

LOG_DPS = 40
AGREEMENT_TOL = 1e-9


class ConsistencyError(RuntimeError):
    """The closed-form and quadrature routes disagree."""


class PolyF:
    """Polynomial in k variables with exact rational coefficients, treated as
    identically zero outside the simplex R_k."""

    __slots__ = ("k", "terms")

    def __init__(self, k: int, terms: Mapping[Exps, Fraction | int] | None = None):
        if k < 1:
            raise ValueError("k must be positive")
        self.k = k
        self.terms: dict[Exps, Fraction] = {}
        for e, c in (terms or {}).items():
            e = tuple(int(v) for v in e)
            if len(e) != k or min(e) < 0:
                raise ValueError(f"bad exponent vector {e} for k={k}")
            c = Fraction(c)
            if c:
                self.terms[e] = self.terms.get(e, Fraction(0)) + c
        self.terms = {e: c for e, c in self.terms.items() if c}

    @classmethod
    def constant(cls, k: int, c=1) -> "PolyF":
        return cls(k, {(0,) * k: c})

    @classmethod
    def variable(cls, k: int, i: int) -> "PolyF":
        """The coordinate x_i (1-based)."""
        e = [0] * k
        e[i - 1] = 1
        return cls(k, {tuple(e): 1})

    @classmethod
    def standard(cls) -> "PolyF":
        """1 - (t1 + t2) + (t1^2 + t2^2)."""
        return cls(2, {(0, 0): 1, (1, 0): -1, (0, 1): -1, (2, 0): 1, (0, 2): 1})

    @classmethod
    def parse(cls, text: str, k: int) -> "PolyF":
        """Parse an expression in t1..tk (or x1..xk), e.g. ``"1 - t1 - t2 + t1**2 + t2**2"``."""
        import sympy

        names = [f"t{i}" for i in range(1, k + 1)]
        syms = sympy.symbols(names)
        text = text.replace("^", "**")
        for i in range(1, k + 1):
            text = text.replace(f"x{i}", f"t{i}")
        expr = sympy.sympify(text, locals=dict(zip(names, syms)))
        poly = sympy.Poly(expr, *syms, domain="QQ")
        return cls(k, {e: Fraction(int(c.p), int(c.q)) for e, c in poly.terms()})

    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for e in sorted(self.terms):
            mono = "*".join(f"t{i + 1}^{p}" if p > 1 else f"t{i + 1}" for i, p in enumerate(e) if p)
            c = self.terms[e]
            parts.append(f"({c})" + (f"*{mono}" if mono else ""))
        return " + ".join(parts)

    def __eq__(self, other) -> bool:
        return isinstance(other, PolyF) and self.k == other.k and self.terms == other.terms

    def __add__(self, other: "PolyF") -> "PolyF":
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out.get(e, Fraction(0)) + c
        return PolyF(self.k, out)

    def __neg__(self) -> "PolyF":
        return PolyF(self.k, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other: "PolyF") -> "PolyF":
        return self + (-other)

    def __mul__(self, other) -> "PolyF":
        if not isinstance(other, PolyF):
            c = Fraction(other)
            return PolyF(self.k, {e: c * v for e, v in self.terms.items()})
        out: dict[Exps, Fraction] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, Fraction(0)) + c1 * c2
        return PolyF(self.k, out)

    __rmul__ = __mul__

    def degree(self) -> int:
        return max((sum(e) for e in self.terms), default=0)

    def is_zero(self) -> bool:
        return not self.terms

    def is_symmetric(self) -> bool:
        return all(
            self.terms.get(tuple(e[i] for i in perm)) == c
            for e, c in self.terms.items()
            for perm in itertools.permutations(range(self.k))
        )

    def raw(self, x: Sequence) -> Fraction | float:
        """Value of the polynomial, ignoring the simplex support."""
        total = 0
        for e, c in self.terms.items():
            term = c
            for xi, p in zip(x, e):
                term = term * xi**p
            total += term
        return total

    def __call__(self, x: Sequence) -> Fraction | float:
        if any(v < 0 for v in x) or sum(x) > 1:
            return 0
        return self.raw(x)

    def evaluate_array(self, X: np.ndarray) -> np.ndarray:
        """Vectorized evaluation at the rows of X (shape (n, k)), with support."""
        X = np.asarray(X, dtype=float)
        out = np.zeros(len(X))
        for e, c in self.terms.items():
            out += float(c) * np.prod(X ** np.array(e), axis=1)
        inside = (X >= 0).all(axis=1) & (X.sum(axis=1) <= 1)
        return np.where(inside, out, 0.0)


# --- univariate helpers (coefficient lists, lowest degree first) ------------


def _upoly_mul(p: list[Fraction], q: list[Fraction]) -> list[Fraction]:
    out = [Fraction(0)] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a:
            for j, b in enumerate(q):
                out[i + j] += a * b
    return out


def _upoly_add(p: list[Fraction], q: list[Fraction], scale=1) -> list[Fraction]:
    n = max(len(p), len(q))
    out = [Fraction(0)] * n
    for i, a in enumerate(p):
        out[i] += a
    for i, b in enumerate(q):
        out[i] += scale * b
    return out


def _one_minus_y_pow(n: int) -> list[Fraction]:
    return [Fraction(math.comb(n, j) * (-1) ** j) for j in range(n + 1)]


def _upoly_eval(p: Sequence[Fraction], y) -> Fraction | float:
    acc = 0
    for c in reversed(p):
        acc = acc * y + c
    return acc


def _upoly_shift_reflect(p: list[Fraction], B: Fraction) -> list[Fraction]:
    """Coefficients of u -> p(B - u)."""
    out: list[Fraction] = [Fraction(0)]
    base = [B, Fraction(-1)]
    power = [Fraction(1)]
    for c in p:
        out = _upoly_add(out, [c * v for v in power])
        power = _upoly_mul(power, base)
    return out


def _trim(p: list[Fraction]) -> list[Fraction]:
    while len(p) > 1 and p[-1] == 0:
        p = p[:-1]
    return p


# --- simplex integration -----------------------------------------------------


def simplex_monomial(k: int, exps: Sequence[int]) -> Fraction:
    """Integral of prod x_i^a_i over R_k: prod(a_i!) / (k + sum a_i)!."""
    if len(exps) != k or any(a < 0 for a in exps):
        raise ValueError("need k nonnegative exponents")
    num = 1
    for a in exps:
        num *= math.factorial(a)
    return Fraction(num, math.factorial(k + sum(exps)))


def integrate_simplex(F: PolyF) -> Fraction:
    return sum((c * simplex_monomial(F.k, e) for e, c in F.terms.items()), Fraction(0))


def I1(F: PolyF) -> Fraction:
    return integrate_simplex(F * F)


# --- sections in one coordinate --------------------------------------------


def _drop(e: Exps, m: int) -> Exps:
    return e[:m] + e[m + 1 :]


def _profile_parts(F: PolyF, m: int) -> tuple[dict[Exps, dict[int, Fraction]], PolyF]:
    """Both pieces of the section integral in coordinate m (0-based).

    low:  integral_0^y F dx_m, as {exps of the other k-1 coordinates: {power of y: coeff}}
    high: integral_0^{1-s} F dx_m with s the sum of the other coordinates, a
          polynomial in those k-1 coordinates (returned as a PolyF in k-1 variables,
          or in 1 variable with zero exponent when k = 1).
    """
    k = F.k
    n = k - 1
    low: dict[Exps, dict[int, Fraction]] = {}
    high: dict[Exps, Fraction] = {}
    for e, c in F.terms.items():
        am = e[m]
        rest = _drop(e, m)
        c1 = c / (am + 1)
        low.setdefault(rest, {})
        low[rest][am + 1] = low[rest].get(am + 1, Fraction(0)) + c1
        # (1 - s)^(am+1) expanded multinomially in the other coordinates
        for combo, coef in _expand_one_minus_sum(n, am + 1).items():
            ex = tuple(a + b for a, b in zip(rest, combo))
            high[ex] = high.get(ex, Fraction(0)) + c1 * coef
    high = {e: v for e, v in high.items() if v}
    return low, _as_poly(n, high)


def _as_poly(n: int, terms: dict[Exps, Fraction]) -> PolyF:
    if n == 0:
        return PolyF(1, {(0,): terms.get((), Fraction(0))})
    return PolyF(n, terms)


def _expand_one_minus_sum(n: int, power: int) -> dict[Exps, Fraction]:
    """(1 - x_1 - ... - x_n)^power as {exps: coeff}."""
    out: dict[Exps, Fraction] = {}
    for combo in _compositions(power, n + 1):
        coef = math.factorial(power)
        for v in combo:
            coef //= math.factorial(v)
        sign = (-1) ** (power - combo[0])
        out[tuple(combo[1:])] = out.get(tuple(combo[1:]), Fraction(0)) + sign * coef
    return out


def _compositions(total: int, parts: int):
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


@dataclass(frozen=True)
class InnerProfile:
    """Section integral of F in coordinate m as a function of the other
    coordinates: ``low`` where their sum is <= threshold = 1 - y, ``high``
    where it lies in (threshold, 1], zero beyond."""

    m: int
    y: Fraction
    low: PolyF
    high: PolyF
    threshold: Fraction

    def __call__(self, others: Sequence) -> Fraction | float:
        s = sum(others)
        if any(v < 0 for v in others) or s > 1:
            return 0
        pts = others if len(others) else (0,)
        return self.low.raw(pts) if s <= self.threshold else self.high.raw(pts)


def inner_profile(F: PolyF, m: int, y) -> InnerProfile:
    """m is 1-based; 0 <= y <= 1."""
    y = Fraction(y)
    if not 0 <= y <= 1:
        raise ValueError("y must lie in [0, 1]")
    if not 1 <= m <= F.k:
        raise ValueError("m out of range")
    low_parts, high = _profile_parts(F, m - 1)
    n = F.k - 1
    low_terms = {e: sum((c * y**p for p, c in pw.items()), Fraction(0)) for e, pw in low_parts.items()}
    return InnerProfile(m, y, _as_poly(n, low_terms), high, 1 - y)


def section_square_integral(F: PolyF, m: int) -> list[Fraction]:
    """Q(y) for 0 <= y <= 1 as exact univariate coefficients (m is 1-based)."""
    low, high = _profile_parts(F, m - 1)
    n = F.k - 1
    # low^2 as {exps: {y-power: coeff}}
    sq_low: dict[Exps, dict[int, Fraction]] = {}
    items = list(low.items())
    for e1, p1 in items:
        for e2, p2 in items:
            e = tuple(a + b for a, b in zip(e1, e2))
            tgt = sq_low.setdefault(e, {})
            for j1, c1 in p1.items():
                for j2, c2 in p2.items():
                    tgt[j1 + j2] = tgt.get(j1 + j2, Fraction(0)) + c1 * c2
    Q: list[Fraction] = [Fraction(0)]
    for e, pw in sq_low.items():
        w = simplex_monomial(n, e) if n else Fraction(1)
        poly_y = [Fraction(0)] * (max(pw) + 1)
        for j, c in pw.items():
            poly_y[j] += c
        Q = _upoly_add(Q, [w * v for v in _upoly_mul(poly_y, _one_minus_y_pow(n + sum(e)))])
    if n:
        sq_high = high * high
        for e, c in sq_high.terms.items():
            w = c * simplex_monomial(n, e)
            # region 1 - y < s <= 1: t^(n+|e|) evaluated between 1 - y and 1
            Q = _upoly_add(Q, _upoly_add([w], _one_minus_y_pow(n + sum(e)), scale=-w))
    return _trim(Q)


def section_square_at_one(F: PolyF, m: int) -> Fraction:
    """Q(1): the square of the full section integrated over R_{k-1}."""
    _, high = _profile_parts(F, m - 1)
    if F.k == 1:
        return high.terms.get((0,), Fraction(0)) ** 2
    return integrate_simplex(high * high)


# --- logarithmic closed forms ------------------------------------------------


@dataclass(frozen=True)
class LogForm:
    """rational + sum(coeff * log(arg))."""

    rational: Fraction
    logs: tuple[tuple[Fraction, Fraction], ...] = ()

    def value(self, dps: int = LOG_DPS) -> float:
        with mpmath.workdps(dps):
            acc = mpmath.mpf(self.rational.numerator) / self.rational.denominator
            for c, a in self.logs:
                acc += mpmath.mpf(c.numerator) / c.denominator * mpmath.log(
                    mpmath.mpf(a.numerator) / a.denominator
                )
            return float(acc)

    def __str__(self) -> str:
        parts = [str(self.rational)] if self.rational else []
        parts += [f"({c})*log({a})" for c, a in self.logs if c]
        return " + ".join(parts) or "0"


def _kernel_closed_form(Q: list[Fraction], B: Fraction, L: Fraction) -> LogForm:
    """integral_L^1 B / (y (B - y)) Q(y) dy with 1/y + 1/(B - y) partial fractions."""
    rational = Fraction(0)
    for j, q in enumerate(Q[1:], start=1):
        rational += q * (1 - L**j) / j
    P = _upoly_shift_reflect(Q, B)
    hi_u, lo_u = B - L, B - 1
    for j, p in enumerate(P[1:], start=1):
        rational += p * (hi_u**j - lo_u**j) / j
    logs = []
    if Q[0]:
        logs.append((Q[0], 1 / L))
    if P[0]:
        logs.append((P[0], hi_u / lo_u))
    return LogForm(rational, tuple(logs))


def _kernel_quadrature(Q: list[Fraction], B: Fraction, lo: Fraction, hi: Fraction) -> float:
    qf = [float(c) for c in Q]
    Bf = float(B)
    val, _ = integrate.quad(
        lambda y: Bf / (y * (Bf - y)) * _upoly_eval(qf, y),
        float(lo),
        float(hi),
        epsabs=1e-14,
        epsrel=1e-13,
        limit=200,
    )
    return val


def I2(F: PolyF, m: int, B) -> tuple[Fraction, float]:
    """(Q, Q * log(B - 1)) with Q the squared full section integrated over R_{k-1}."""
    res = I2_detail(F, m, B)
    return res.q, res.value


def I2_detail(F: PolyF, m: int, B) -> "I2Detail":
    B = Fraction(B)
    if B <= 2:
        raise ValueError("B must exceed 2")
    q = section_square_at_one(F, m)
    form = LogForm(Fraction(0), ((q, B - 1),)) if q else LogForm(Fraction(0))
    value = form.value()
    quad = float(q) * _kernel_quadrature([Fraction(1)], B, Fraction(1), B / 2)
    if abs(value - quad) > AGREEMENT_TOL:
        raise ConsistencyError(f"I2 closed form {value} vs quadrature {quad}")
    return I2Detail(q, form, value, quad)


@dataclass(frozen=True)
class I2Detail:
    q: Fraction
    form: LogForm
    value: float
    quadrature: float


@dataclass(frozen=True)
class I3Detail:
    Q: tuple[Fraction, ...]
    form: LogForm
    value: float
    quadrature: float


def I3_detail(F: PolyF, m: int, B, eta) -> I3Detail:
    B, eta = Fraction(B), Fraction(eta)
    L = B * eta
    if not 0 < L < 1:
        raise ValueError("need 0 < B*eta < 1")
    Q = section_square_integral(F, m)
    form = _kernel_closed_form(Q, B, L)
    value = form.value()
    quad = _kernel_quadrature(Q, B, L, Fraction(1))
    if abs(value - quad) > AGREEMENT_TOL:
        raise ConsistencyError(f"I3 closed form {value} vs quadrature {quad}")
    return I3Detail(tuple(Q), form, value, quad)


def I3(F: PolyF, m: int, B, eta) -> float:
    return I3_detail(F, m, B, eta).value


# --- the positivity criterion ------------------------------------------------


@dataclass
class FunctionalReport:
    I1: Fraction
    I2: list[tuple[int, Fraction, float]]  # (m, rational factor, value)
    I3: list[tuple[int, float, str]]  # (m, value, closed form)
    Itilde: float
    positive: bool
    params: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "I1": {"exact": str(self.I1), "value": _r12(float(self.I1))},
            "I2": [
                {"m": m, "rational": str(q), "closed_form": f"({q})*log({self.params['B'] - 1})", "value": _r12(v)}
                for m, q, v in self.I2
            ],
            "I3": [{"m": m, "closed_form": form, "value": _r12(v)} for m, v, form in self.I3],
            "Itilde": _r12(self.Itilde),
            "positive": self.positive,
            "params": {k: (str(v) if isinstance(v, Fraction) else v) for k, v in self.params.items()},
        }


def _r12(x: float) -> float:
    return float(f"{x:.12f}")


def criterion(
    F: PolyF,
    k: int | None = None,
    theta=Fraction(2, 5),
    eta=Fraction(1, 250),
    rho=Fraction(1),
    m_K=Fraction(2),
) -> FunctionalReport:
    """Itilde = (k m_K / B)(I2^(1) + I3^(1)) - rho I1 for symmetric F, B = 2/theta.

    For non-symmetric F the m-sum is carried out explicitly:
    Itilde = (m_K / B) sum_m (I2^(m) + I3^(m)) - rho I1.
    """
    k = F.k if k is None else k
    if k != F.k:
        raise ValueError("k does not match the polynomial")
    theta, eta, rho, m_K = (Fraction(v) for v in (theta, eta, rho, m_K))
    if not 0 < theta <= 1:
        raise ValueError("theta must lie in (0, 1]")
    B = 2 / theta
    symmetric = F.is_symmetric()
    ms = [1] if symmetric else list(range(1, k + 1))
    i1 = I1(F)
    i2 = []
    i3 = []
    for m in ms:
        d2 = I2_detail(F, m, B)
        d3 = I3_detail(F, m, B, eta)
        i2.append((m, d2.q, d2.value))
        i3.append((m, d3.value, str(d3.form)))
    s = sum(v for _, _, v in i2) + sum(v for _, v, _ in i3)
    mult = k if symmetric else 1
    itilde = float(mult * m_K / B) * s - float(rho) * float(i1)
    params = {"k": k, "theta": theta, "B": B, "eta": eta, "rho": rho, "m_K": m_K, "symmetric": symmetric}
    return FunctionalReport(i1, i2, i3, itilde, itilde > 0, params)
