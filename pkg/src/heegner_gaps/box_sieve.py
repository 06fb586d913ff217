"""Norm boxes A0(N), A(N) = A0(2N) \\ A0(N), and sieving of prime elements,
G2-numbers and the beta indicator over them.

Since |sigma(x)| = norm(x)^(1/2) for both complex embeddings, the box
1 <= |sigma(x)| <= N is the norm range 1 <= norm(x) <= N^2.  All box work is
done on half-open norm intervals (lo, hi].

The number of prime factors of x, and for G2-numbers the norms of the two
factors, depend only on norm(x).  The census is therefore computed from a
segmented factor sieve over norms, weighted by the number w_K * r(n) of
elements of norm n.
"""
from __future__ import annotations

import enum
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import IO, Iterable, Iterator

import numpy as np

from .arithmetic import (
    ElementTag,
    ResidueSystem,
    SplitType,
    _prime_above,
    _split_type,
    divisible_mask,
    factor_element,
    kronecker_table,
    primes_in_range,
    primes_upto,
)
from .field_core import (
    MAX_NORM,
    FieldParams,
    QuadInt,
    associates,
    canonical,
    conjugate,
    norm,
)

DEFAULT_SEGMENT = 2**20


class Shell(enum.Enum):
    FULL = "full"  # A0(N)
    DYADIC = "dyadic"  # A(N)


@dataclass(frozen=True)
class BoxSpec:
    N: Fraction
    shell: Shell = Shell.FULL

    def __post_init__(self):
        object.__setattr__(self, "N", Fraction(self.N))
        if self.N <= 0:
            raise ValueError("N must be positive")

    def norm_bounds(self) -> tuple[int, int]:
        """(lo, hi) with the box equal to lo < norm <= hi."""
        n2 = math.floor(self.N * self.N)
        if self.shell is Shell.FULL:
            lo, hi = 0, n2
        else:
            lo, hi = n2, math.floor(4 * self.N * self.N)
        if hi > MAX_NORM:
            raise OverflowError("box exceeds the supported norm bound 2**63")
        return lo, hi


def full(N) -> BoxSpec:
    return BoxSpec(Fraction(N), Shell.FULL)


def dyadic(N) -> BoxSpec:
    return BoxSpec(Fraction(N), Shell.DYADIC)


def floor_power(N: Fraction, e: Fraction) -> int:
    """Largest integer t with t <= N**e (exact, N > 0, e >= 0 rational)."""
    N, e = Fraction(N), Fraction(e)
    P, Q = e.numerator, e.denominator
    num, den = N.numerator**P, N.denominator**P

    def ok(t):
        return t**Q * den <= num

    t = int(math.floor(float(N) ** float(e)))
    while t > 0 and not ok(t):
        t -= 1
    while ok(t + 1):
        t += 1
    return t


def le_power(x: Fraction, N: Fraction, e: Fraction) -> bool:
    """Exact test of x <= N**e for positive rationals x, N and rational e >= 0."""
    x, N, e = Fraction(x), Fraction(N), Fraction(e)
    P, Q = e.numerator, e.denominator
    return x**Q <= N**P


@dataclass(frozen=True)
class BetaParams:
    """Parameters of the indicator beta: the small prime factor w1 must satisfy
    Y' <= |sigma(w1)| <= N^b and the large one |sigma(w2)| > N^b."""

    b: Fraction = Fraction(1, 2)
    yprime: Fraction = Fraction(1)
    theta: Fraction = Fraction(2, 5)

    def __post_init__(self):
        for name in ("b", "yprime", "theta"):
            object.__setattr__(self, name, Fraction(getattr(self, name)))
        if not (0 <= self.theta / 2 < self.b <= Fraction(1, 2)):
            raise ValueError(f"need theta/2 < b <= 1/2, got b={self.b}, theta={self.theta}")
        if self.yprime < 1:
            raise ValueError("Y' must be >= 1")

    @classmethod
    def from_eta(cls, N, eta, b=Fraction(1, 2), theta=Fraction(2, 5)) -> "BetaParams":
        """Y = (N^2)^eta and Y = Y'^2, so Y' = N^eta (rounded to a float)."""
        return cls(b=b, yprime=Fraction(float(N) ** float(eta)), theta=theta)

    def eta(self, N) -> float:
        """log Y / log N^2 with Y = Y'^2."""
        return math.log(float(self.yprime) ** 2) / math.log(float(N) ** 2)

    def thresholds(self, N) -> tuple[int, int]:
        """(smallest admissible norm of w1, largest norm <= N^(2b))."""
        if not le_power(self.yprime * self.yprime, N, 2 * self.b):
            raise ValueError("Y' must not exceed N^b")
        return math.ceil(self.yprime * self.yprime), floor_power(N, 2 * self.b)


# --- lattice points ----------------------------------------------------------


def _a_range(f: FieldParams, b: int, M: int) -> tuple[int, int]:
    """Inclusive range of a with norm(a + b w) <= M (empty when lo > hi)."""
    rhs = 4 * M - abs(f.disc) * b * b
    if rhs < 0:
        return 1, 0
    s = math.isqrt(rhs)
    T = f.trace_omega
    return -((s + T * b) // 2), (s - T * b) // 2


def count_norm_le(f: FieldParams, M: int) -> int:
    """Number of elements (including 0) of norm <= M."""
    if M < 0:
        return 0
    bmax = math.isqrt(4 * M // abs(f.disc))
    total = 0
    for b in range(-bmax, bmax + 1):
        lo, hi = _a_range(f, b, M)
        total += max(0, hi - lo + 1)
    return total


def box_arrays(f: FieldParams, lo: int, hi: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """All (a, b, norm) with lo < norm <= hi, sorted by (norm, a, b)."""
    As, Bs = [], []
    bmax = math.isqrt(4 * hi // abs(f.disc)) if hi > 0 else 0
    for b in range(-bmax, bmax + 1):
        o0, o1 = _a_range(f, b, hi)
        if o1 < o0:
            continue
        i0, i1 = _a_range(f, b, lo)
        if i1 < i0:
            pieces = [(o0, o1)]
        else:
            pieces = [(o0, i0 - 1), (i1 + 1, o1)]
        for s, e in pieces:
            if e >= s:
                As.append(np.arange(s, e + 1, dtype=np.int64))
                Bs.append(np.full(e - s + 1, b, dtype=np.int64))
    if not As:
        empty = np.zeros(0, dtype=np.int64)
        return empty, empty, empty
    A, B = np.concatenate(As), np.concatenate(Bs)
    Nm = A * A + f.trace_omega * A * B + f.norm_omega * B * B
    keep = Nm > lo  # lo = 0 drops the zero element
    A, B, Nm = A[keep], B[keep], Nm[keep]
    order = np.lexsort((B, A, Nm))
    return A[order], B[order], Nm[order]


def _segments(lo: int, hi: int, size: int) -> list[tuple[int, int]]:
    out, s = [], lo
    while s < hi:
        out.append((s, min(hi, s + size)))
        s += size
    return out


def enumerate_box(f: FieldParams, box: BoxSpec, segment_size: int = DEFAULT_SEGMENT) -> Iterator[QuadInt]:
    """Every element of the box once, in (norm, a, b) order."""
    lo, hi = box.norm_bounds()
    for s, e in _segments(lo, hi, segment_size):
        A, B, _ = box_arrays(f, s, e)
        for a, b in zip(A.tolist(), B.tolist()):
            yield QuadInt(a, b)


@dataclass(frozen=True)
class BoxCount:
    count: int
    main_term: float

    @property
    def ratio(self) -> float:
        return self.count / self.main_term


def count_box(f: FieldParams, box: BoxSpec) -> BoxCount:
    """Exact box size and its ratio to 2 pi N^2 / sqrt|D| (6 pi N^2 / sqrt|D| for A(N))."""
    lo, hi = box.norm_bounds()
    count = count_norm_le(f, hi) - count_norm_le(f, lo)
    N2 = float(box.N) ** 2
    scale = 2 if box.shell is Shell.FULL else 6
    return BoxCount(count, scale * math.pi * N2 / math.sqrt(abs(f.disc)))


# --- norm tables -------------------------------------------------------------


@dataclass
class NormTable:
    """Per-norm data for lo < n <= hi.

    r: number of ideals of norm n; omega: number of prime factors of any
    element of norm n (-1 if none); small: for omega == 2, the smaller of the
    two prime-ideal norms (0 otherwise).
    """

    lo: int
    hi: int
    r: np.ndarray
    omega: np.ndarray
    small: np.ndarray

    def at(self, n: np.ndarray | int):
        i = np.asarray(n) - self.lo - 1
        return self.r[i], self.omega[i], self.small[i]


def norm_table(f: FieldParams, lo: int, hi: int, base: np.ndarray | None = None) -> NormTable:
    size = hi - lo
    n = np.arange(lo + 1, hi + 1, dtype=np.int64)
    rem = n.copy()
    r = np.ones(size, dtype=np.int64)
    omega = np.zeros(size, dtype=np.int64)
    first = np.zeros(size, dtype=np.int64)
    chi = kronecker_table(f)
    D = abs(f.disc)
    if base is None:
        base = primes_upto(math.isqrt(hi))
    for p in base.tolist():
        if p * p > hi:
            break
        start = -(-(lo + 1) // p) * p
        if start > hi:
            continue
        idx = np.arange(start - lo - 1, size, p)
        t = rem[idx]
        e = np.zeros(len(idx), dtype=np.int64)
        m = t % p == 0
        while m.any():
            t[m] //= p
            e[m] += 1
            m = t % p == 0
        rem[idx] = t
        c = chi[p % D]
        if c == 1:
            r[idx] *= e + 1
            omega[idx] += e
            fnorm = p
        elif c == 0:
            omega[idx] += e
            fnorm = p
        else:
            r[idx[e % 2 == 1]] = 0
            omega[idx] += e // 2
            fnorm = p * p
        unset = first[idx] == 0
        first[idx[unset]] = fnorm
    big = rem > 1
    c = chi[rem[big] % D]
    ib = np.flatnonzero(big)
    r[ib[c == 1]] *= 2
    r[ib[c == -1]] = 0
    omega[ib] += 1
    first[ib[first[ib] == 0]] = rem[ib[first[ib] == 0]]
    omega[r == 0] = -1
    small = np.zeros(size, dtype=np.int64)
    two = omega == 2
    small[two] = np.minimum(first[two], n[two] // first[two])
    return NormTable(lo, hi, r, omega, small)


def beta_mask(table: NormTable, N, params: BetaParams, norms: np.ndarray | None = None) -> np.ndarray:
    """beta as a function of the norm (for every norm in the table, or the given norms)."""
    ymin, T = params.thresholds(N)
    if norms is None:
        _, om, sm = table.r, table.omega, table.small
        nn = np.arange(table.lo + 1, table.hi + 1, dtype=np.int64)
    else:
        _, om, sm = table.at(norms)
        nn = np.asarray(norms)
    # boundary |sigma(w1)| = N^b belongs to the small-factor range
    out = (om == 2) & (sm >= ymin) & (sm <= T)
    large = np.where(sm > 0, nn // np.maximum(sm, 1), 0)
    return out & (large > T)


# --- census ------------------------------------------------------------------


@dataclass
class SieveCensus:
    total: int = 0
    primes: int = 0
    g2: int = 0
    beta_ones: int = 0
    # band j holds 2^j < |sigma(x)| <= 2^(j+1) (band 0 also holds |sigma(x)| = 1)
    bands: dict[int, dict[str, int]] = field(default_factory=dict)

    def merge(self, other: "SieveCensus") -> "SieveCensus":
        out = SieveCensus(
            self.total + other.total,
            self.primes + other.primes,
            self.g2 + other.g2,
            self.beta_ones + other.beta_ones,
            {j: dict(v) for j, v in self.bands.items()},
        )
        for j, v in other.bands.items():
            tgt = out.bands.setdefault(j, {"total": 0, "primes": 0, "g2": 0, "beta_ones": 0})
            for k2, c in v.items():
                tgt[k2] += c
        return out

    def to_dict(self) -> dict:
        d = asdict(self)
        d["bands"] = [{"band": j, **self.bands[j]} for j in sorted(self.bands)]
        return d


_POW4 = np.array([4**j for j in range(32)], dtype=np.int64)


def _band_index(norms: np.ndarray) -> np.ndarray:
    # 4^j < n <= 4^(j+1); n = 1 joins band 0
    return np.maximum(np.searchsorted(_POW4, norms, side="left") - 1, 0)


def _census_segment(f, s, e, N, beta, base) -> SieveCensus:
    t = norm_table(f, s, e, base)
    norms = np.arange(s + 1, e + 1, dtype=np.int64)
    weight = f.w_K * t.r
    masks = {
        "total": weight > 0,
        "primes": t.omega == 1,
        "g2": t.omega == 2,
        "beta_ones": beta_mask(t, N, beta) if beta is not None else np.zeros(len(norms), bool),
    }
    out = SieveCensus(**{k: int(weight[m].sum()) for k, m in masks.items()})
    bands = _band_index(norms)
    for j in np.unique(bands).tolist():
        sel = bands == j
        out.bands[j] = {k: int(weight[m & sel].sum()) for k, m in masks.items()}
    return out


def census(
    f: FieldParams,
    box: BoxSpec,
    beta: BetaParams | None = None,
    segment_size: int = DEFAULT_SEGMENT,
    workers: int = 1,
) -> SieveCensus:
    """Counts of elements, primes, G2-numbers and beta = 1 elements in the box.

    beta is evaluated with the box's N as its parameter.
    """
    lo, hi = box.norm_bounds()
    base = primes_upto(math.isqrt(hi)) if hi > 0 else None
    segs = _segments(lo, hi, segment_size)

    def job(se):
        return _census_segment(f, se[0], se[1], box.N, beta, base)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            parts = list(ex.map(job, segs))
    else:
        parts = [job(se) for se in segs]
    out = SieveCensus()
    for part in parts:
        out = out.merge(part)
    return out


# --- prime elements ----------------------------------------------------------


def _prime_elements_in(f: FieldParams, lo: int, hi: int, base: np.ndarray | None) -> list[QuadInt]:
    found: list[QuadInt] = []
    for p in primes_in_range(lo + 1, hi + 1, base).tolist():
        st = _split_type(f.d, p)
        if st is SplitType.INERT:
            continue
        pi = _prime_above(f.d, p)
        found.extend(associates(f, pi))
        if st is SplitType.SPLIT:
            found.extend(associates(f, canonical(f, conjugate(f, pi))))
    # inert p: the element p has norm p^2
    for p in primes_in_range(math.isqrt(lo) + 1, math.isqrt(hi) + 1).tolist():
        if lo < p * p <= hi and _split_type(f.d, p) is SplitType.INERT:
            found.extend(associates(f, QuadInt(p, 0)))
    found.sort(key=lambda x: (norm(f, x), x.a, x.b))
    return found


def iter_primes(f: FieldParams, box: BoxSpec, segment_size: int = DEFAULT_SEGMENT) -> Iterator[QuadInt]:
    """Prime elements of the box in (norm, a, b) order, one norm segment at a time."""
    lo, hi = box.norm_bounds()
    base = primes_upto(math.isqrt(hi)) if hi > 0 else None
    for s, e in _segments(lo, hi, segment_size):
        yield from _prime_elements_in(f, s, e, base)


@dataclass
class PrimeSieveResult:
    primes: list[QuadInt]
    census: SieveCensus


def sieve_primes(
    f: FieldParams, box: BoxSpec, beta: BetaParams | None = None, segment_size: int = DEFAULT_SEGMENT
) -> PrimeSieveResult:
    primes = list(iter_primes(f, box, segment_size))
    cen = census(f, box, beta, segment_size)
    assert cen.primes == len(primes)
    return PrimeSieveResult(primes, cen)


def mitsui_ratio(f: FieldParams, N) -> float:
    """|P0(N)| / (m_K N^2 / log N^2)."""
    count = census(f, full(N)).primes
    N2 = float(N) ** 2
    return count / (float(f.m_K) * N2 / math.log(N2))


# --- beta and the counting functions ------------------------------------------


def beta(f: FieldParams, x: QuadInt, N, params: BetaParams) -> int:
    """1 iff x = w1 w2 with Y' <= |sigma(w1)| <= N^b < |sigma(w2)|."""
    if x.a == 0 and x.b == 0:
        raise ValueError("beta is undefined at zero")
    fac = factor_element(f, x)
    if fac.big_omega != 2:
        return 0
    norms = sorted(norm(f, p) for p, e in fac.factors for _ in range(e))
    ymin, T = params.thresholds(N)
    small, large = norms
    return int(ymin <= small <= T < large)


def element_classes(f: FieldParams, A: np.ndarray, B: np.ndarray, table: NormTable) -> np.ndarray:
    Nm = A * A + f.trace_omega * A * B + f.norm_omega * B * B
    return table.at(Nm)[1]


def _shell_arrays(f: FieldParams, N):
    lo, hi = dyadic(N).norm_bounds()
    A, B, Nm = box_arrays(f, lo, hi)
    t = norm_table(f, lo, hi)
    return A, B, Nm, t


def pi_beta(f: FieldParams, N, params: BetaParams) -> int:
    return census(f, dyadic(N), params).beta_ones


def _beta_elements(f, N, params):
    A, B, Nm, t = _shell_arrays(f, N)
    m = beta_mask(t, N, params, Nm)
    return A[m], B[m]


def pi_beta_residue(f: FieldParams, N, params: BetaParams, q: QuadInt, gamma: QuadInt) -> int:
    A, B = _beta_elements(f, N, params)
    rs = ResidueSystem(f, q)
    return int(np.count_nonzero(rs.index_arrays(A, B) == rs.index(gamma)))


def pi_beta_coprime(f: FieldParams, N, params: BetaParams, u: QuadInt) -> int:
    A, B = _beta_elements(f, N, params)
    keep = np.ones(len(A), dtype=bool)
    if norm(f, u) > 1:
        for p, _ in factor_element(f, u).factors:
            keep &= ~divisible_mask(f, p, A, B)
    return int(np.count_nonzero(keep))


def pi_flat(f: FieldParams, N) -> int:
    return census(f, dyadic(N)).primes


def pi_flat_residue(f: FieldParams, N, q: QuadInt, a: QuadInt) -> int:
    rs = ResidueSystem(f, q)
    target = rs.index(a)
    return sum(1 for w in iter_primes(f, dyadic(N)) if rs.index(w) == target)


# --- streaming output ----------------------------------------------------------


def iter_records(f: FieldParams, box: BoxSpec, segment_size: int = DEFAULT_SEGMENT) -> Iterator[dict]:
    """(a, b, norm, class) records for every element of the box."""
    lo, hi = box.norm_bounds()
    base = primes_upto(math.isqrt(hi)) if hi > 0 else None
    tags = {0: ElementTag.UNIT.value, 1: ElementTag.PRIME.value, 2: ElementTag.G2.value}
    for s, e in _segments(lo, hi, segment_size):
        A, B, Nm = box_arrays(f, s, e)
        t = norm_table(f, s, e, base)
        om = t.at(Nm)[1]
        for a, b, n, o in zip(A.tolist(), B.tolist(), Nm.tolist(), om.tolist()):
            yield {"a": a, "b": b, "norm": n, "class": tags.get(o, ElementTag.COMPOSITE.value)}


def write_records(records: Iterable[dict], fh: IO[str]) -> int:
    n = 0
    for rec in records:
        fh.write(json.dumps(rec, separators=(",", ":")) + "\n")
        n += 1
    return n
