"""Admissible tuples over O_K, the modulus m (product of the small prime
ideals) and the residue v0 making every shifted element a unit mod m."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .arithmetic import PrimeIdeal, ResidueSystem, prime_ideals_upto, primes_upto
from .field_core import ONE, FieldParams, QuadInt, add, canonical, divides, mul, norm


@dataclass(frozen=True)
class HTuple:
    shifts: tuple[QuadInt, ...]

    def __post_init__(self):
        shifts = tuple(s if isinstance(s, QuadInt) else QuadInt(int(s), 0) for s in self.shifts)
        object.__setattr__(self, "shifts", shifts)
        if not shifts:
            raise ValueError("a tuple needs at least one shift")
        if len(set(shifts)) != len(shifts):
            raise ValueError(f"shifts must be distinct: {shifts}")

    @classmethod
    def rational(cls, values: Sequence[int]) -> "HTuple":
        return cls(tuple(QuadInt(int(v), 0) for v in values))

    @property
    def k(self) -> int:
        return len(self.shifts)

    def is_rational(self) -> bool:
        return all(s.b == 0 for s in self.shifts)


@dataclass(frozen=True)
class AdmissibilityResult:
    admissible: bool
    witness: PrimeIdeal | None = None

    def __bool__(self) -> bool:
        return self.admissible


def _covers(f: FieldParams, t: HTuple, P: PrimeIdeal) -> bool:
    rs = ResidueSystem(f, P.generator)
    return len({rs.index(h) for h in t.shifts}) == P.norm


def is_admissible(f: FieldParams, t: HTuple) -> AdmissibilityResult:
    """A k-tuple can only cover every class modulo a prime ideal of norm <= k."""
    for P in prime_ideals_upto(f, t.k):
        if _covers(f, t, P):
            return AdmissibilityResult(False, P)
    return AdmissibilityResult(True)


def is_admissible_in_Z(values: Sequence[int]) -> bool:
    k = len(values)
    return all(len({v % p for v in values}) < p for p in primes_upto(k).tolist())


def rational_transfer_check(f: FieldParams, t: HTuple) -> bool:
    """Check that admissibility in Z carries over to O_K for this tuple.

    Returns the truth of the implication; when the tuple is not admissible in Z
    the implication holds vacuously and the O_K check is still run.
    """
    if not t.is_rational():
        raise ValueError("transfer check needs rational-integer shifts")
    in_z = is_admissible_in_Z([s.a for s in t.shifts])
    in_k = bool(is_admissible(f, t))
    return (not in_z) or in_k


def modulus_primes(f: FieldParams, D0: int) -> list[PrimeIdeal]:
    """Prime ideals of norm < D0."""
    return prime_ideals_upto(f, D0, strict=True) if D0 > 2 else []


def modulus_m(f: FieldParams, D0: int) -> QuadInt:
    if D0 < 2:
        raise ValueError("D0 must be at least 2")
    out = ONE
    for P in modulus_primes(f, D0):
        out = mul(f, out, P.generator)
    return canonical(f, out)


class NoValidResidue(ValueError):
    def __init__(self, obstruction: PrimeIdeal):
        super().__init__(f"shifts cover every class modulo the prime ideal {obstruction.generator}")
        self.obstruction = obstruction


def choose_v0(f: FieldParams, t: HTuple, D0: int) -> QuadInt:
    """Least residue v0 mod m (canonical representatives in (a, b) order) with
    every v0 + h_i coprime to m."""
    primes = modulus_primes(f, D0)
    for P in primes:
        if _covers(f, t, P):
            raise NoValidResidue(P)
    rs = ResidueSystem(f, modulus_m(f, D0))
    for v in rs.representatives():
        if all(not divides(f, P.generator, add(f, v, h)) for P in primes for h in t.shifts):
            return v
    raise AssertionError("unreachable: CRT guarantees a residue")
