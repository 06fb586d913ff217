"""Exact arithmetic in the ring of integers of the nine class-number-one
imaginary quadratic fields.

Elements are stored in coordinates over the integral basis {1, omega}, where
omega = sqrt(d) when d = 2, 3 (mod 4) and omega = (1 + sqrt(d))/2 when
d = 1 (mod 4).  In both cases omega is a root of x^2 - T x + n with
T = trace(omega) in {0, 1} and n = norm(omega), so

    (a + b w)(c + e w) = (a c - n b e) + (a e + b c + T b e) w
    norm(a + b w)      = a^2 + T a b + n b^2
    conj(a + b w)      = (a + T b) - b w
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import mpmath

HEEGNER_D = (-1, -2, -3, -7, -11, -19, -43, -67, -163)

# Largest norm the integer code paths accept.
MAX_NORM = 2**63


class OmegaKind(enum.Enum):
    SQRT_D = "sqrt(d)"
    HALF_ONE_PLUS_SQRT_D = "(1+sqrt(d))/2"


class NotDivisibleError(ArithmeticError):
    """Raised by :func:`divide_exact` when the quotient is not integral."""


@dataclass(frozen=True, order=True)
class QuadInt:
    """The algebraic integer ``a + b*omega``."""

    a: int
    b: int

    def __iter__(self):
        yield self.a
        yield self.b

    def __str__(self) -> str:
        return f"{self.a},{self.b}"


@dataclass(frozen=True)
class FieldParams:
    d: int
    disc: int
    omega_kind: OmegaKind
    w_K: int
    m_K: Fraction
    r1: int = 0
    r2: int = 1
    h_K: int = 1
    R_K: Fraction = Fraction(1)

    @property
    def trace_omega(self) -> int:
        return 1 if self.omega_kind is OmegaKind.HALF_ONE_PLUS_SQRT_D else 0

    @property
    def norm_omega(self) -> int:
        if self.omega_kind is OmegaKind.HALF_ONE_PLUS_SQRT_D:
            return (1 - self.d) // 4
        return -self.d

    @property
    def c_K(self) -> float:
        """Residue of the Dedekind zeta function at s = 1."""
        return float(self.c_K_mp())

    def c_K_mp(self, dps: int = 40) -> mpmath.mpf:
        with mpmath.workdps(dps):
            return +(2 * mpmath.pi / (self.w_K * mpmath.sqrt(abs(self.disc))))

    @property
    def c_K_symbolic(self) -> str:
        return f"2*pi/({self.w_K}*sqrt({abs(self.disc)}))"

    def omega_complex(self) -> complex:
        root = complex(0.0, math.sqrt(-self.d))
        if self.omega_kind is OmegaKind.HALF_ONE_PLUS_SQRT_D:
            return (1 + root) / 2
        return root

    def __str__(self) -> str:
        return f"Q(sqrt({self.d}))"


@lru_cache(maxsize=None)
def make_field(d: int) -> FieldParams:
    """Return the parameters of Q(sqrt(d)); only the nine Heegner values are accepted."""
    if d not in HEEGNER_D:
        raise ValueError(
            f"d={d} is not one of the class-number-one imaginary quadratic fields {HEEGNER_D}"
        )
    if d % 4 == 1:
        kind, disc = OmegaKind.HALF_ONE_PLUS_SQRT_D, d
    else:
        kind, disc = OmegaKind.SQRT_D, 4 * d
    w = {-1: 4, -3: 6}.get(d, 2)
    # m_K = w_K / (2^r1 h_K R_K) with r1 = 0, h_K = 1, R_K = 1
    return FieldParams(d=d, disc=disc, omega_kind=kind, w_K=w, m_K=Fraction(w))


def _guard(n: int) -> int:
    if n > MAX_NORM:
        raise OverflowError(f"norm {n} exceeds the supported bound 2**63")
    return n


def norm(f: FieldParams, x: QuadInt) -> int:
    a, b = x
    return a * a + f.trace_omega * a * b + f.norm_omega * b * b


def embedding_abs(f: FieldParams, x: QuadInt) -> float:
    """|sigma(x)| for either complex embedding; equals sqrt(norm(x))."""
    n = norm(f, x)
    if n == 0:
        raise ZeroDivisionError("embedding_abs of zero is undefined here")
    r = math.isqrt(n)
    if r * r == n:
        return float(r)
    return math.sqrt(n)


def to_complex(f: FieldParams, x: QuadInt) -> complex:
    return x.a + x.b * f.omega_complex()


def add(f: FieldParams, x: QuadInt, y: QuadInt) -> QuadInt:
    return QuadInt(x.a + y.a, x.b + y.b)


def sub(f: FieldParams, x: QuadInt, y: QuadInt) -> QuadInt:
    return QuadInt(x.a - y.a, x.b - y.b)


def neg(f: FieldParams, x: QuadInt) -> QuadInt:
    return QuadInt(-x.a, -x.b)


def mul(f: FieldParams, x: QuadInt, y: QuadInt) -> QuadInt:
    a, b = x
    c, e = y
    be = b * e
    return QuadInt(a * c - f.norm_omega * be, a * e + b * c + f.trace_omega * be)


def conjugate(f: FieldParams, x: QuadInt) -> QuadInt:
    return QuadInt(x.a + f.trace_omega * x.b, -x.b)


def divides(f: FieldParams, y: QuadInt, x: QuadInt) -> bool:
    """True iff y | x in O_K (y nonzero)."""
    n = norm(f, y)
    if n == 0:
        raise ZeroDivisionError("division by zero element")
    p, q = mul(f, x, conjugate(f, y))
    return p % n == 0 and q % n == 0


def divide_exact(f: FieldParams, x: QuadInt, y: QuadInt) -> QuadInt:
    n = norm(f, y)
    if n == 0:
        raise ZeroDivisionError("division by zero element")
    p, q = mul(f, x, conjugate(f, y))
    if p % n or q % n:
        raise NotDivisibleError(f"{y} does not divide {x} in {f}")
    return QuadInt(p // n, q // n)


def power(f: FieldParams, x: QuadInt, e: int) -> QuadInt:
    out = QuadInt(1, 0)
    for _ in range(e):
        out = mul(f, out, x)
    return out


@lru_cache(maxsize=None)
def _units(d: int) -> tuple[QuadInt, ...]:
    f = make_field(d)
    # norm 1 forces 4 = (2a + T b)^2 + |D| b^2, so |b| <= 1 and |a| <= 2
    found = [QuadInt(a, b) for b in (-1, 0, 1) for a in range(-2, 3) if norm(f, QuadInt(a, b)) == 1]
    assert len(found) == f.w_K
    return tuple(sorted(found))


def units(f: FieldParams) -> list[QuadInt]:
    return list(_units(f.d))


def is_unit(f: FieldParams, x: QuadInt) -> bool:
    return norm(f, x) == 1


def associates(f: FieldParams, x: QuadInt) -> list[QuadInt]:
    return [mul(f, x, u) for u in _units(f.d)]


def _associate_rank(x: QuadInt) -> tuple:
    a, b = x
    if a > 0 and b >= 0:
        rank = 0
    elif a > 0:
        rank = 1
    elif a == 0 and b > 0:
        rank = 2
    else:
        rank = 3
    return (rank, a, b)


def canonical(f: FieldParams, x: QuadInt) -> QuadInt:
    """Canonical representative of the associate class of x.

    Preference order: a > 0 and b >= 0, then a > 0, then a == 0 and b > 0;
    ties broken by lexicographically smallest (a, b).
    """
    return min(associates(f, x), key=_associate_rank)


def are_associate(f: FieldParams, x: QuadInt, y: QuadInt) -> bool:
    return canonical(f, x) == canonical(f, y)


def parse_element(text: str) -> QuadInt:
    """Parse ``"a,b"`` into a :class:`QuadInt`."""
    parts = text.replace(" ", "").split(",")
    if len(parts) != 2:
        raise ValueError(f"expected 'a,b', got {text!r}")
    return QuadInt(int(parts[0]), int(parts[1]))


def rational(n: int) -> QuadInt:
    return QuadInt(n, 0)


ONE = QuadInt(1, 0)
ZERO = QuadInt(0, 0)
