"""Rational primes in O_K, factorization of elements, ideal counting and the
multiplicative-function toolbox (mu, phi, tau_k, omega, Euler products).
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Iterator

import numpy as np
from sympy import factorint, isprime
from sympy.functions.combinatorial.numbers import kronecker_symbol

from .field_core import (
    MAX_NORM,
    ONE,
    FieldParams,
    QuadInt,
    canonical,
    conjugate,
    divide_exact,
    divides,
    make_field,
    mul,
    norm,
    power,
)


class SplitType(enum.Enum):
    SPLIT = "split"
    INERT = "inert"
    RAMIFIED = "ramified"


class ElementTag(enum.Enum):
    ZERO = "zero"
    UNIT = "unit"
    PRIME = "prime"
    G2 = "G2"
    COMPOSITE = "composite"


@dataclass(frozen=True)
class Factorization:
    unit: QuadInt
    factors: tuple[tuple[QuadInt, int], ...]

    @property
    def big_omega(self) -> int:
        return sum(e for _, e in self.factors)

    def primes(self) -> list[QuadInt]:
        return [p for p, _ in self.factors]

    def expand(self, f: FieldParams) -> QuadInt:
        out = self.unit
        for p, e in self.factors:
            out = mul(f, out, power(f, p, e))
        return out


@dataclass(frozen=True)
class ElementClass:
    tag: ElementTag
    big_omega: int


def kronecker(D: int, n: int) -> int:
    return int(kronecker_symbol(D, n))


def sqrt_mod_prime(a: int, p: int) -> int:
    """Smallest x in [0, p) with x^2 = a (mod p); p prime, a a square mod p."""
    a %= p
    if a == 0 or p == 2:
        return a
    if pow(a, (p - 1) // 2, p) != 1:
        raise ValueError(f"{a} is not a square modulo {p}")
    if p % 4 == 3:
        x = pow(a, (p + 1) // 4, p)
    else:
        # Tonelli-Shanks
        q, s = p - 1, 0
        while q % 2 == 0:
            q //= 2
            s += 1
        z = 2
        while pow(z, (p - 1) // 2, p) != p - 1:
            z += 1
        m, c, t, x = s, pow(z, q, p), pow(a, q, p), pow(a, (q + 1) // 2, p)
        while t != 1:
            i, t2 = 0, t
            while t2 != 1:
                t2 = t2 * t2 % p
                i += 1
            b = pow(c, 1 << (m - i - 1), p)
            m, c = i, b * b % p
            t, x = t * c % p, x * b % p
    return min(x, p - x)


def split_type(f: FieldParams, p: int) -> SplitType:
    if not isprime(p):
        raise ValueError(f"{p} is not a rational prime")
    return _split_type(f.d, p)


@lru_cache(maxsize=None)
def _split_type(d: int, p: int) -> SplitType:
    k = kronecker(make_field(d).disc, p)
    if k == 0:
        return SplitType.RAMIFIED
    return SplitType.SPLIT if k == 1 else SplitType.INERT


def _omega_root_mod(f: FieldParams, p: int) -> int:
    """A root of x^2 - T x + n (the minimal polynomial of omega) modulo p."""
    T, n = f.trace_omega, f.norm_omega
    if p == 2:
        for r in (0, 1):
            if (r * r - T * r + n) % 2 == 0:
                return r
        raise ValueError("2 is inert")
    s = sqrt_mod_prime(f.disc, p)
    return (T + s) * pow(2, -1, p) % p


def _reduce(f: FieldParams, u: tuple[int, int], v: tuple[int, int]) -> tuple[int, int]:
    """Lagrange-Gauss reduction of the lattice spanned by u, v under the norm form."""
    T, n = f.trace_omega, f.norm_omega

    def b2(x, y):  # twice the bilinear form attached to the norm
        return 2 * x[0] * y[0] + T * (x[0] * y[1] + x[1] * y[0]) + 2 * n * x[1] * y[1]

    if b2(v, v) < b2(u, u):
        u, v = v, u
    while True:
        qu = b2(u, u)
        m = (2 * b2(u, v) + qu) // (2 * qu)
        if m == 0:
            return u
        v = (v[0] - m * u[0], v[1] - m * u[1])
        if b2(v, v) < qu:
            u, v = v, u
        else:
            return u


def prime_above(f: FieldParams, p: int) -> QuadInt:
    """A prime element of norm p, in canonical associate form."""
    st = split_type(f, p)
    if st is SplitType.INERT:
        raise ValueError(f"{p} is inert in {f}; no element has norm {p}")
    return _prime_above(f.d, p)


@lru_cache(maxsize=1 << 16)
def _prime_above(d: int, p: int) -> QuadInt:
    f = make_field(d)
    r = _omega_root_mod(f, p)
    # the ideal (p, omega - r) is the lattice {a + b w : a + b r = 0 mod p}
    a, b = _reduce(f, (p, 0), (-r, 1))
    pi = QuadInt(a, b)
    assert norm(f, pi) == p, (d, p, pi)
    return canonical(f, pi)


@lru_cache(maxsize=1 << 16)
def _factor_int(n: int) -> tuple[tuple[int, int], ...]:
    return tuple(sorted(factorint(n).items()))


def _sort_key(f: FieldParams, pe: tuple[QuadInt, int]):
    p = pe[0]
    return (norm(f, p), p.a, p.b)


def factor_element(f: FieldParams, x: QuadInt) -> Factorization:
    n = norm(f, x)
    if n == 0:
        raise ValueError("cannot factor zero")
    if n > MAX_NORM:
        raise OverflowError(f"norm {n} above the supported factorization bound")
    rest = x
    factors: list[tuple[QuadInt, int]] = []
    for p, e in _factor_int(n):
        st = _split_type(f.d, p)
        if st is SplitType.INERT:
            pi = QuadInt(p, 0)
            for _ in range(e // 2):
                rest = divide_exact(f, rest, pi)
            factors.append((pi, e // 2))
        elif st is SplitType.RAMIFIED:
            pi = _prime_above(f.d, p)
            for _ in range(e):
                rest = divide_exact(f, rest, pi)
            factors.append((pi, e))
        else:
            pi = _prime_above(f.d, p)
            pibar = canonical(f, conjugate(f, pi))
            i = 0
            while i < e and divides(f, pi, rest):
                rest = divide_exact(f, rest, pi)
                i += 1
            for _ in range(e - i):
                rest = divide_exact(f, rest, pibar)
            if i:
                factors.append((pi, i))
            if e - i:
                factors.append((pibar, e - i))
    factors.sort(key=lambda pe: _sort_key(f, pe))
    assert norm(f, rest) == 1
    return Factorization(unit=rest, factors=tuple(factors))


def big_omega_of_norm(f: FieldParams, n: int) -> int | None:
    """Number of prime factors (with multiplicity) of any element of norm n.

    Returns None when no element has norm n.  The count depends only on n
    because split and ramified primes contribute v_p(n) and inert primes
    v_p(n)/2.
    """
    total = 0
    for p, e in _factor_int(n):
        if _split_type(f.d, p) is SplitType.INERT:
            if e % 2:
                return None
            total += e // 2
        else:
            total += e
    return total


def classify(f: FieldParams, x: QuadInt) -> ElementClass:
    if x.a == 0 and x.b == 0:
        return ElementClass(ElementTag.ZERO, 0)
    bo = factor_element(f, x).big_omega
    return ElementClass(_tag_for(bo), bo)


def _tag_for(big_omega: int) -> ElementTag:
    # G2 counts squares of primes (w1 = w2 allowed)
    return {0: ElementTag.UNIT, 1: ElementTag.PRIME, 2: ElementTag.G2}.get(
        big_omega, ElementTag.COMPOSITE
    )


def is_prime_element(f: FieldParams, x: QuadInt) -> bool:
    n = norm(f, x)
    if n < 2:
        return False
    if isprime(n):
        return True
    r = math.isqrt(n)
    return r * r == n and isprime(r) and _split_type(f.d, r) is SplitType.INERT


def ideal_count(f: FieldParams, n: int) -> int:
    """Number of ideals of norm n, i.e. sum over m | n of kronecker(D, m)."""
    if n < 1:
        raise ValueError("n must be positive")
    out = 1
    for p, e in _factor_int(n):
        st = _split_type(f.d, p)
        if st is SplitType.SPLIT:
            out *= e + 1
        elif st is SplitType.INERT and e % 2:
            return 0
    return out


def kronecker_table(f: FieldParams) -> np.ndarray:
    """chi(m) for m = 0 .. |D|-1; kronecker(D, .) is periodic mod |D|."""
    D = abs(f.disc)
    return np.array([kronecker(f.disc, m) if m else 0 for m in range(D)], dtype=np.int64)


def ideal_count_partial_sum(f: FieldParams, X: int) -> int:
    """Number of ideals with norm <= X, as sum_{m<=X} chi(m) floor(X/m)."""
    m = np.arange(1, X + 1, dtype=np.int64)
    chi = kronecker_table(f)[m % abs(f.disc)]
    return int(np.sum(chi * (X // m)))


def residue_check(f: FieldParams, X: int) -> float:
    """(number of ideals of norm <= X) / X; tends to c_K."""
    if X < 1000:
        raise ValueError("X must be at least 10^3")
    return ideal_count_partial_sum(f, X) / X


# --- rational primes -------------------------------------------------------


def primes_upto(n: int) -> np.ndarray:
    """Rational primes <= n (simple sieve of Eratosthenes)."""
    if n < 2:
        return np.zeros(0, dtype=np.int64)
    mask = np.ones(n + 1, dtype=bool)
    mask[:2] = False
    for p in range(2, math.isqrt(n) + 1):
        if mask[p]:
            mask[p * p :: p] = False
    return np.flatnonzero(mask).astype(np.int64)


def primes_in_range(lo: int, hi: int, base: np.ndarray | None = None) -> np.ndarray:
    """Rational primes p with lo <= p < hi, by a segmented sieve."""
    lo = max(lo, 2)
    if hi <= lo:
        return np.zeros(0, dtype=np.int64)
    if base is None:
        base = primes_upto(math.isqrt(hi - 1))
    mask = np.ones(hi - lo, dtype=bool)
    for p in base:
        p = int(p)
        if p * p >= hi:
            break
        start = max(p * p, -(-lo // p) * p)
        mask[start - lo :: p] = False
    return np.flatnonzero(mask).astype(np.int64) + lo


# --- prime ideals ----------------------------------------------------------


@dataclass(frozen=True, order=True)
class PrimeIdeal:
    """A prime ideal, identified by its norm and canonical generator."""

    norm: int
    generator: QuadInt
    p: int
    split: SplitType


def prime_ideals_upto(f: FieldParams, bound: int, strict: bool = False) -> list[PrimeIdeal]:
    """Prime ideals of norm <= bound (or < bound when strict), sorted by (norm, a, b)."""
    limit = bound - 1 if strict else bound
    out: list[PrimeIdeal] = []
    for p in primes_upto(limit):
        p = int(p)
        st = _split_type(f.d, p)
        if st is SplitType.INERT:
            if p * p <= limit:
                out.append(PrimeIdeal(p * p, QuadInt(p, 0), p, st))
        else:
            pi = _prime_above(f.d, p)
            out.append(PrimeIdeal(p, pi, p, st))
            if st is SplitType.SPLIT:
                out.append(PrimeIdeal(p, canonical(f, conjugate(f, pi)), p, st))
    out.sort(key=lambda q: (q.norm, q.generator.a, q.generator.b))
    return out


# --- multiplicative functions on ideals given by a Factorization ----------


def _norms(f: FieldParams, fac: Factorization) -> list[tuple[int, int]]:
    return [(norm(f, p), e) for p, e in fac.factors]


def mu(f: FieldParams, fac: Factorization) -> int:
    if any(e > 1 for _, e in fac.factors):
        return 0
    return -1 if len(fac.factors) % 2 else 1


def phi(f: FieldParams, fac: Factorization) -> int:
    out = 1
    for q, e in _norms(f, fac):
        out *= q**e - q ** (e - 1)
    return out


def tau_k(f: FieldParams, fac: Factorization, k: int) -> int:
    out = 1
    for _, e in fac.factors:
        out *= math.comb(e + k - 1, k - 1)
    return out


def omega_distinct(f: FieldParams, fac: Factorization) -> int:
    return len(fac.factors)


def g_helper(f: FieldParams, fac: Factorization) -> int:
    """The multiplicative function with g(p) = |p| - 2 on squarefree ideals."""
    if mu(f, fac) == 0:
        raise ValueError("g is only used on squarefree ideals")
    out = 1
    for q, _ in _norms(f, fac):
        out *= q - 2
    return out


# --- Euler products and Mertens sums --------------------------------------


@dataclass(frozen=True)
class SeriesResult:
    value: float
    rel_change_last_decade: float
    cutoff: int


def singular_series(
    f: FieldParams,
    gamma: Callable[[PrimeIdeal], Fraction | int | float],
    kappa: Fraction | int | float,
    cutoff: int = 10**6,
) -> SeriesResult:
    """Truncated product over prime ideals |p| <= cutoff of
    (1 - gamma(p)/|p|)^(-1) (1 - 1/|p|)^kappa.

    The last-decade relative change (value at cutoff vs cutoff/10) is reported
    as a convergence estimate.
    """
    acc = 1.0
    mid = None
    checkpoint = cutoff // 10
    kappa = float(kappa)
    for P in prime_ideals_upto(f, cutoff):
        if mid is None and P.norm > checkpoint:
            mid = acc
        g = gamma(P)
        if g == P.norm:
            raise ZeroDivisionError(f"gamma(p) = |p| at {P}")
        local = 1.0 - 1.0 / P.norm
        if kappa != 1.0:
            local = local**kappa
        # with gamma(p) = 1 and kappa = 1 the factor is exactly 1.0
        acc *= local / (1.0 - float(g) / P.norm)
    if mid is None:
        mid = acc
    rel = abs(acc - mid) / abs(acc) if acc else 0.0
    return SeriesResult(value=acc, rel_change_last_decade=rel, cutoff=cutoff)


def mertens_sums(f: FieldParams, R: int) -> tuple[float, float]:
    """(sum over ideals |u| <= R of 1/|u|, sum over prime ideals |p| <= R of 1/|p|)."""
    if R < 10:
        raise ValueError("R must be at least 10")
    # sum_{n<=R} r(n)/n = sum_{m<=R} chi(m)/m * H(floor(R/m))
    m = np.arange(1, R + 1, dtype=np.int64)
    harmonic = np.concatenate(([0.0], np.cumsum(1.0 / m)))
    chi = kronecker_table(f)[m % abs(f.disc)]
    first = math.fsum(chi / m * harmonic[R // m])
    second = math.fsum(1.0 / P.norm for P in prime_ideals_upto(f, R))
    return first, second


def iter_ideals_upto(f: FieldParams, bound: int) -> Iterator[tuple[int, Factorization]]:
    """All nonzero ideals of norm <= bound as (norm, Factorization of a canonical generator)."""
    primes = prime_ideals_upto(f, bound)

    def rec(start: int, n: int, facs: list[tuple[QuadInt, int]]):
        yield n, facs
        for i in range(start, len(primes)):
            P = primes[i]
            if n * P.norm > bound:
                break
            m, e = n, 0
            while m * P.norm <= bound:
                m *= P.norm
                e += 1
                yield from rec(i + 1, m, facs + [(P.generator, e)])

    for n, facs in rec(0, 1, []):
        facs = sorted(facs, key=lambda pe: _sort_key(f, pe))
        yield n, Factorization(ONE, tuple(facs))


# --- residue classes modulo a principal ideal ------------------------------


class ResidueSystem:
    """Canonical coset representatives of O_K / qO_K.

    The lattice qO_K has a basis {(c, 0), (e, g)} in (a, b) coordinates with
    c * g = norm(q) and 0 <= e < c.  Every class has exactly one
    representative (a, b) with 0 <= a < c and 0 <= b < g; representatives are
    ordered lexicographically by (a, b).
    """

    def __init__(self, f: FieldParams, q: QuadInt):
        n = norm(f, q)
        if n == 0:
            raise ValueError("modulus must be nonzero")
        self.f, self.q, self.size = f, q, n
        v1 = (q.a, q.b)
        qw = mul(f, q, QuadInt(0, 1))
        v2 = (qw.a, qw.b)
        g, s, t = _xgcd(v1[1], v2[1])
        e0 = s * v1[0] + t * v2[0]
        c = abs((v2[1] // g) * v1[0] - (v1[1] // g) * v2[0])
        assert c * g == n, (q, c, g, n)
        self.c, self.g, self.e = c, g, e0 % c
        self._primes = [p for p, _ in factor_element(f, q).factors] if n > 1 else []

    def reduce(self, x: QuadInt) -> QuadInt:
        bq, br = divmod(x.b, self.g)
        return QuadInt((x.a - bq * self.e) % self.c, br)

    def reduce_arrays(self, A: np.ndarray, B: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        bq, br = np.divmod(B, self.g)
        return (A - bq * self.e) % self.c, br

    def index(self, x: QuadInt) -> int:
        r = self.reduce(x)
        return r.a * self.g + r.b

    def index_arrays(self, A: np.ndarray, B: np.ndarray) -> np.ndarray:
        ra, rb = self.reduce_arrays(A, B)
        return ra * self.g + rb

    def representatives(self) -> Iterator[QuadInt]:
        for a in range(self.c):
            for b in range(self.g):
                yield QuadInt(a, b)

    def is_coprime(self, x: QuadInt) -> bool:
        return not any(divides(self.f, p, x) for p in self._primes)

    def coprime_representatives(self) -> Iterator[QuadInt]:
        return (r for r in self.representatives() if self.is_coprime(r))

    def congruent(self, x: QuadInt, y: QuadInt) -> bool:
        return self.reduce(x) == self.reduce(y)


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    """(g, s, t) with s*a + t*b = g = gcd(a, b) >= 0."""
    s0, s1, t0, t1 = 1, 0, 0, 1
    while b:
        qt, r = divmod(a, b)
        a, b = b, r
        s0, s1 = s1, s0 - qt * s1
        t0, t1 = t1, t0 - qt * t1
    if a < 0:
        a, s0, t0 = -a, -s0, -t0
    return a, s0, t0


def divisible_mask(f: FieldParams, p: QuadInt, A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Vectorized test of p | (A + B omega)."""
    n = norm(f, p)
    pc = conjugate(f, p)
    T, m = f.trace_omega, f.norm_omega
    x = A * pc.a - m * B * pc.b
    y = A * pc.b + B * pc.a + T * B * pc.b
    return (x % n == 0) & (y % n == 0)
