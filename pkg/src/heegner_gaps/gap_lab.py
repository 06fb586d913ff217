"""Pair search for G2 numbers at distance <= 2, norm-form decompositions of
the pairs, and equidistribution remainders in residue classes."""
from __future__ import annotations

import csv
import enum
import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import IO, Iterable, Iterator

import numpy as np

from .arithmetic import (
    ElementTag,
    Factorization,
    ResidueSystem,
    SplitType,
    classify,
    factor_element,
    iter_ideals_upto,
    phi,
    primes_upto,
    split_type,
)
from .box_sieve import (
    DEFAULT_SEGMENT,
    BetaParams,
    _segments,
    beta_mask,
    box_arrays,
    dyadic,
    full,
    iter_primes,
    norm_table,
)
from .field_core import (
    FieldParams,
    OmegaKind,
    QuadInt,
    canonical,
    embedding_abs,
    mul,
    norm,
    sub,
)
from .tuples import HTuple


@dataclass(frozen=True)
class GapPair:
    alpha1: QuadInt
    alpha2: QuadInt
    diff: QuadInt
    factorizations: tuple[Factorization, Factorization]
    diff_abs: float
    base: QuadInt  # the scanned alpha that produced the pair

    def to_dict(self) -> dict:
        return {
            "alpha1": str(self.alpha1),
            "alpha2": str(self.alpha2),
            "diff": str(self.diff),
            "diff_abs": self.diff_abs,
            "factors1": _fac_list(self.factorizations[0]),
            "factors2": _fac_list(self.factorizations[1]),
        }


def _fac_list(fac: Factorization) -> list[list]:
    return [[str(p), e] for p, e in fac.factors]


def _scan_segment(f: FieldParams, t: HTuple, lo: int, hi: int, base) -> list[tuple[QuadInt, int, int]]:
    """(alpha, i, j) for every alpha with lo < N(alpha) <= hi and a qualifying pair."""
    A, B, _ = box_arrays(f, lo, hi)
    if not len(A):
        return []
    T, n = f.trace_omega, f.norm_omega
    shifted = [(A + h.a, B + h.b) for h in t.shifts]
    norms = [X * X + T * X * Y + n * Y * Y for X, Y in shifted]
    top = int(max(m.max() for m in norms))
    table = norm_table(f, 0, max(top, 1))
    g2 = []
    for nn in norms:
        m = nn > 0
        om = np.full(len(A), -1)
        om[m] = table.at(nn[m])[1]
        g2.append(om == 2)
    close = [
        (i, j)
        for i in range(t.k)
        for j in range(i + 1, t.k)
        if norm(f, sub(f, t.shifts[j], t.shifts[i])) <= 4
    ]
    hits = []
    for i, j in close:
        for idx in np.flatnonzero(g2[i] & g2[j]).tolist():
            hits.append((idx, i, j))
    hits.sort()
    return [(QuadInt(int(A[x]), int(B[x])), i, j) for x, i, j in hits]


def find_gap_pairs(
    f: FieldParams,
    t: HTuple,
    Nmax,
    segment_size: int = DEFAULT_SEGMENT,
    workers: int = 1,
) -> Iterator[GapPair]:
    """Pairs (alpha + h_i, alpha + h_j) of G2 numbers, alpha in A0(Nmax), with
    N(h_j - h_i) <= 4. Ordered by (N(alpha), alpha, i, j); repeats dropped."""
    lo, hi = full(Nmax).norm_bounds()
    base = primes_upto(math.isqrt(hi)) if hi > 0 else None
    segs = _segments(lo, hi, segment_size)
    with ThreadPoolExecutor(max_workers=max(1, workers)) as ex:
        results = ex.map(lambda se: _scan_segment(f, t, se[0], se[1], base), segs)
        seen: set = set()
        for hits in results:
            for alpha, i, j in hits:
                a1 = QuadInt(alpha.a + t.shifts[i].a, alpha.b + t.shifts[i].b)
                a2 = QuadInt(alpha.a + t.shifts[j].a, alpha.b + t.shifts[j].b)
                if (a1, a2) in seen:
                    continue
                seen.add((a1, a2))
                diff = sub(f, a2, a1)
                yield GapPair(
                    a1,
                    a2,
                    diff,
                    (factor_element(f, a1), factor_element(f, a2)),
                    embedding_abs(f, diff),
                    alpha,
                )


def verify_pair(f: FieldParams, p: GapPair) -> bool:
    """Independent re-check: both G2 from scratch, the difference, the distance."""
    return (
        classify(f, p.alpha1).tag is ElementTag.G2
        and classify(f, p.alpha2).tag is ElementTag.G2
        and sub(f, p.alpha2, p.alpha1) == p.diff
        and norm(f, p.diff) <= 4
        and p.factorizations[0].expand(f) == p.alpha1
        and p.factorizations[1].expand(f) == p.alpha2
    )


def write_pairs(pairs: Iterable[GapPair], fh: IO[str]) -> int:
    n = 0
    for p in pairs:
        fh.write(json.dumps(p.to_dict(), separators=(",", ":")) + "\n")
        n += 1
    return n


# --- norm-form decompositions -------------------------------------------------


def sqrt_coords(f: FieldParams, x: QuadInt) -> tuple[int, int]:
    """Integer coordinates (u, v) with s*x = u + v*sqrt(d), where s = 2 when
    d = 1 mod 4 and s = 1 otherwise; then s^2 N(x) = u^2 - d v^2."""
    if f.omega_kind is OmegaKind.SQRT_D:
        return x.a, x.b
    return 2 * x.a + x.b, x.b


@dataclass
class FactorRecord:
    generator: QuadInt
    norm: int
    p: int
    inert: bool
    coords: tuple[int, int]


@dataclass
class Decomposition:
    scale: int  # s^2 in p = (u^2 + |d| v^2) / s^2
    factors1: list[FactorRecord]
    factors2: list[FactorRecord]
    inert_flagged: bool
    cross1: Fraction  # Re(alpha1) rebuilt from factor coordinates
    re_alpha1: Fraction
    identity_checked: bool  # diff rational, so the norm identity applies
    identity_holds: bool | None

    @property
    def norms(self) -> tuple[int, ...]:
        return tuple(r.norm for r in self.factors1 + self.factors2)

    def to_dict(self) -> dict:
        def rec(r: FactorRecord) -> dict:
            return {
                "generator": str(r.generator),
                "norm": r.norm,
                "p": r.p,
                "inert": r.inert,
                "coords": list(r.coords),
            }

        return {
            "scale": self.scale,
            "factors1": [rec(r) for r in self.factors1],
            "factors2": [rec(r) for r in self.factors2],
            "inert_flagged": self.inert_flagged,
            "cross1": str(self.cross1),
            "re_alpha1": str(self.re_alpha1),
            "identity_checked": self.identity_checked,
            "identity_holds": self.identity_holds,
        }


def _records(f: FieldParams, fac: Factorization) -> list[FactorRecord]:
    # fold the unit into the first factor so the factors multiply to the element
    gens = [p for p, e in fac.factors for _ in range(e)]
    gens[0] = mul(f, fac.unit, gens[0])
    out = []
    for g in gens:
        n = norm(f, g)
        r = math.isqrt(n)
        inert = r * r == n and split_type(f, r) is SplitType.INERT
        out.append(FactorRecord(g, n, r if inert else n, inert, sqrt_coords(f, g)))
    return out


def _real_part(f: FieldParams, x: QuadInt) -> Fraction:
    u, _ = sqrt_coords(f, x)
    return Fraction(u, 1 if f.omega_kind is OmegaKind.SQRT_D else 2)


def corollary_decomposition(f: FieldParams, pair: GapPair) -> Decomposition:
    s = 1 if f.omega_kind is OmegaKind.SQRT_D else 2
    r1 = _records(f, pair.factorizations[0])
    r2 = _records(f, pair.factorizations[1])
    for r in r1 + r2:
        u, v = r.coords
        if u * u - f.d * v * v != s * s * r.norm:
            raise AssertionError(f"norm form fails for {r.generator}")
    (u1, v1), (u2, v2) = r1[0].coords, r1[1].coords
    cross = Fraction(u1 * u2 + f.d * v1 * v2, s * s)
    re1 = _real_part(f, pair.alpha1)
    checked = pair.diff.b == 0
    holds = None
    if checked:
        h = pair.diff.a
        holds = norm(f, pair.alpha2) == norm(f, pair.alpha1) + 2 * h * re1 + h * h and cross == re1
    return Decomposition(
        s * s,
        r1,
        r2,
        any(r.inert for r in r1 + r2),
        cross,
        re1,
        checked,
        holds,
    )


# --- equidistribution ------------------------------------------------------------


class Which(enum.Enum):
    PRIMES = "primes"
    BETA = "beta"


@dataclass
class EquidistRow:
    norm: int
    generator: QuadInt
    phi: int
    max_eps: float  # at N
    eps_star: float  # max over the sampled M
    main: float
    total: int
    partition_ok: bool


@dataclass
class EquidistReport:
    N: Fraction
    Q: int
    which: Which
    rows: list[EquidistRow] = field(default_factory=list)
    sample_M: tuple[Fraction, ...] = ()

    @property
    def total_max_eps(self) -> float:
        return sum(r.max_eps for r in self.rows)

    @property
    def total_eps_star(self) -> float:
        return sum(r.eps_star for r in self.rows)

    @property
    def partition_ok(self) -> bool:
        return all(r.partition_ok for r in self.rows)

    COLUMNS = ("norm", "generator", "phi", "max_eps", "eps_star", "main", "total", "partition_ok")

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.COLUMNS)
        for r in self.rows:
            w.writerow([r.norm, str(r.generator), r.phi, f"{r.max_eps:.12g}", f"{r.eps_star:.12g}",
                        f"{r.main:.12g}", r.total, r.partition_ok])
        return buf.getvalue()

    def to_dict(self) -> dict:
        return {
            "N": str(self.N),
            "Q": self.Q,
            "which": self.which.value,
            "sample_M": [str(m) for m in self.sample_M],
            "total_max_eps": round(self.total_max_eps, 12),
            "total_eps_star": round(self.total_eps_star, 12),
            "partition_ok": self.partition_ok,
            "rows": [
                {
                    "norm": r.norm,
                    "generator": str(r.generator),
                    "phi": r.phi,
                    "max_eps": round(r.max_eps, 12),
                    "eps_star": round(r.eps_star, 12),
                    "main": round(r.main, 12),
                    "total": r.total,
                    "partition_ok": r.partition_ok,
                }
                for r in self.rows
            ],
        }


def target_elements(f: FieldParams, N, which: Which, params: BetaParams | None = None):
    """Coordinates of the counted set inside the shell A(N)."""
    if which is Which.PRIMES:
        ws = list(iter_primes(f, dyadic(N)))
        return np.array([w.a for w in ws], dtype=np.int64), np.array([w.b for w in ws], dtype=np.int64)
    lo, hi = dyadic(N).norm_bounds()
    A, B, Nm = box_arrays(f, lo, hi)
    m = beta_mask(norm_table(f, lo, hi), N, params or BetaParams(), Nm)
    return A[m], B[m]


def squarefree_moduli(f: FieldParams, Q: int) -> list[tuple[int, QuadInt, Factorization]]:
    out = []
    for n, fac in iter_ideals_upto(f, Q):
        if all(e == 1 for _, e in fac.factors):
            out.append((n, canonical(f, fac.expand(f)), fac))
    out.sort(key=lambda r: (r[0], r[1].a, r[1].b))
    return out


def residue_errors(f: FieldParams, q: QuadInt, A, B, which: Which) -> tuple[float, float, int, bool]:
    """(max |eps| over coprime classes, main term, total, partition holds)."""
    rs = ResidueSystem(f, q)
    counts = np.bincount(rs.index_arrays(A, B), minlength=rs.size) if len(A) else np.zeros(rs.size, dtype=np.int64)
    reps = list(rs.representatives())
    cop = np.array([rs.is_coprime(r) for r in reps], dtype=bool)
    total = int(len(A))
    ph = int(cop.sum())
    base = total if which is Which.PRIMES else int(counts[cop].sum())
    main = base / ph
    eps = np.abs(counts[cop] - main)
    return float(eps.max()), main, total, int(counts.sum()) == total


def equidist_report(
    f: FieldParams,
    N,
    Q: int,
    which: Which = Which.PRIMES,
    params: BetaParams | None = None,
) -> EquidistReport:
    N = Fraction(N)
    samples = (N / 4, N / 2, N)
    elems = {M: target_elements(f, M, which, params) for M in samples}
    rep = EquidistReport(N, Q, which, sample_M=samples)
    for n, gen, fac in squarefree_moduli(f, Q):
        errs = {M: residue_errors(f, gen, *elems[M], which) for M in samples}
        e_n, main, total, ok = errs[N]
        rep.rows.append(
            EquidistRow(
                n,
                gen,
                phi(f, fac),
                e_n,
                max(e[0] for e in errs.values()),
                main,
                total,
                all(e[3] for e in errs.values()),
            )
        )
    return rep


# --- growth table -------------------------------------------------------------------


@dataclass
class DensityRow:
    N: int
    lo: int
    hi: int
    elements: int
    g2: int
    beta_ones: int
    gap_pairs: int
    cumulative_pairs: int


DENSITY_COLUMNS = ("N", "norm_lo", "norm_hi", "elements", "g2", "beta_ones", "gap_pairs", "cumulative_pairs")


def density_report(
    f: FieldParams, t: HTuple, Nmax: int, params: BetaParams | None = None
) -> list[DensityRow]:
    """Counts per band N in {2, 4, ..., Nmax}; band N holds N^2/4 < N(alpha) <= N^2
    (the first band also takes the units), with beta taken at shell parameter N/2."""
    if Nmax < 2:
        raise ValueError("Nmax must be at least 2")
    Ns = []
    N = 2
    while N < Nmax:
        Ns.append(N)
        N *= 2
    Ns.append(int(Nmax))
    params = params or BetaParams()
    pairs_by_norm = np.array(sorted(norm(f, p.base) for p in find_gap_pairs(f, t, Nmax)), dtype=np.int64)
    rows = []
    prev_hi = 0
    cum = 0
    for N in Ns:
        hi = N * N
        A, B, Nm = box_arrays(f, prev_hi, hi)
        table = norm_table(f, prev_hi, hi)
        om = table.at(Nm)[1]
        M = Fraction(N, 2)
        # beta needs the thresholds of the shell A(N/2); Y' must not exceed (N/2)^b
        bm = beta_mask(table, M, params, Nm) if len(Nm) else np.zeros(0, dtype=bool)
        gp = int(np.count_nonzero((pairs_by_norm > prev_hi) & (pairs_by_norm <= hi)))
        cum += gp
        rows.append(DensityRow(N, prev_hi, hi, len(A), int(np.count_nonzero(om == 2)), int(bm.sum()), gp, cum))
        prev_hi = hi
    return rows


def density_csv(rows: list[DensityRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(DENSITY_COLUMNS)
    for r in rows:
        w.writerow([r.N, r.lo, r.hi, r.elements, r.g2, r.beta_ones, r.gap_pairs, r.cumulative_pairs])
    return buf.getvalue()
