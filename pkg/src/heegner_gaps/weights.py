"""Sieve weights lambda_d built from the cutoff F, the inversion identity that
links them to y_r, and direct evaluation of the quadratic sums S1, S2 at
desk scale.

Squarefree ideals coprime to m are handled as frozensets of indices into the
list of prime ideals of norm < R; a k-tuple of such sets is pairwise
coprime exactly when the sets are disjoint.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import IO, Iterator, Sequence

import numpy as np

from .arithmetic import (
    Factorization,
    PrimeIdeal,
    ResidueSystem,
    divisible_mask,
    factor_element,
    prime_ideals_upto,
)
from .box_sieve import BetaParams, beta_mask, box_arrays, count_box, dyadic, norm_table
from .field_core import ONE, FieldParams, QuadInt, canonical, mul
from .functional import PolyF
from .tuples import HTuple, choose_v0, modulus_m, modulus_primes

MAX_R = 10**4
MAX_BOX = 10**7

Key = tuple[frozenset, ...]


class ScaleError(ValueError):
    """Requested size is beyond exhaustive desk-scale evaluation."""


@dataclass
class WeightConfig:
    field: FieldParams
    k: int
    R: float
    D0: int
    F: PolyF
    tuple: HTuple | None = None
    beta_params: BetaParams | None = None

    def __post_init__(self):
        if self.F.k != self.k:
            raise ValueError("F must have k variables")
        if not self.R > 1:
            raise ValueError("R must exceed 1")
        if self.R > MAX_R:
            raise ScaleError(f"R={self.R} too large for exhaustive enumeration (max {MAX_R})")
        if self.tuple is not None and self.tuple.k != self.k:
            raise ValueError("tuple length must equal k")


class WeightTable:
    """y and lambda for every supported tuple of a configuration."""

    def __init__(self, cfg: WeightConfig):
        self.cfg = cfg
        f, R = cfg.field, cfg.R
        self.logR = math.log(R)
        self.primes: list[PrimeIdeal] = prime_ideals_upto(f, math.ceil(R) - 1)
        self.primes = [P for P in self.primes if P.norm < R]
        m_gens = {P.generator for P in modulus_primes(f, cfg.D0)}
        self.index = {P.generator: i for i, P in enumerate(self.primes)}
        self.usable = [i for i, P in enumerate(self.primes) if P.generator not in m_gens]
        self.m_primes = [i for i, P in enumerate(self.primes) if P.generator in m_gens]
        self.support: list[Key] = list(self._tuples())
        self.y: dict[Key, float] = {key: self._y(key) for key in self.support}
        self.lam: dict[Key, float] = {key: self._lambda(key) for key in self.support}

    # -- ideal helpers

    def _norm(self, s: frozenset) -> int:
        out = 1
        for i in s:
            out *= self.primes[i].norm
        return out

    def _phi(self, s: frozenset) -> int:
        out = 1
        for i in s:
            out *= self.primes[i].norm - 1
        return out

    def _tuples(self) -> Iterator[Key]:
        """Disjoint k-tuples of squarefree m-coprime ideals with norm product < R."""
        k, R = self.cfg.k, self.cfg.R
        usable = self.usable

        def rec(pos: int, prod: int, slots: list[set]):
            if pos == len(usable):
                yield tuple(frozenset(s) for s in slots)
                return
            yield from rec(pos + 1, prod, slots)
            P = self.primes[usable[pos]]
            if prod * P.norm < R:
                for j in range(k):
                    slots[j].add(usable[pos])
                    yield from rec(pos + 1, prod * P.norm, slots)
                    slots[j].discard(usable[pos])

        yield from sorted(rec(0, 1, [set() for _ in range(k)]), key=self._sort_key)

    def _sort_key(self, key: Key):
        return tuple((self._norm(s), tuple(sorted(s))) for s in key)

    def _point(self, key: Key) -> list[float]:
        return [math.log(self._norm(s)) / self.logR for s in key]

    def _y(self, key: Key) -> float:
        return float(self.cfg.F(self._point(key)))

    def _lambda(self, key: Key) -> float:
        """The weight formula summed directly over r with d | r, evaluating F."""
        sign_norm = 1
        for s in key:
            sign_norm *= (-1) ** len(s) * self._norm(s)
        total = 0.0
        for r in self.support:
            if all(d <= ri for d, ri in zip(key, r)):
                phi = 1
                for ri in r:
                    phi *= self._phi(ri)
                total += float(self.cfg.F(self._point(r))) / phi
        return sign_norm * total

    # -- conversion from generators

    def key_of(self, ideals: Sequence[QuadInt | Factorization]) -> Key | None:
        """Index sets for a tuple of ideal generators, or None when the tuple
        is outside the squarefree, pairwise-coprime, m-coprime support or
        involves a prime ideal of norm >= R."""
        f = self.cfg.field
        sets = []
        for g in ideals:
            fac = g if isinstance(g, Factorization) else factor_element(f, g)
            s = set()
            for p, e in fac.factors:
                if e > 1:
                    return None
                i = self.index.get(canonical(f, p))
                if i is None or i in self.m_primes:
                    return None
                s.add(i)
            sets.append(frozenset(s))
        if len(sets) != self.cfg.k:
            raise ValueError("need k ideals")
        seen: set = set()
        for s in sets:
            if seen & s:
                return None
            seen |= s
        return tuple(sets)

    def y_value(self, ideals) -> float:
        key = self.key_of(ideals)
        return 0.0 if key is None else self.y.get(key, 0.0)

    def lambda_value(self, ideals) -> float:
        key = self.key_of(ideals)
        if key is None:
            return 0.0
        prod = 1
        for s in key:
            prod *= self._norm(s)
        if prod >= self.cfg.R:
            return 0.0
        return self.lam[key]

    # -- the inversion identity

    def lambda_from_y(self) -> dict[Key, float]:
        """lambda_a = prod(mu(a_i)|a_i|) sum_{a | r} y_r / prod phi(r_i)."""
        out = {}
        for a in self.support:
            c = 1
            for s in a:
                c *= (-1) ** len(s) * self._norm(s)
            acc = 0.0
            for r, yr in self.y.items():
                if yr and all(ai <= ri for ai, ri in zip(a, r)):
                    phi = 1
                    for ri in r:
                        phi *= self._phi(ri)
                    acc += yr / phi
            out[a] = c * acc
        return out

    def y_from_lambda(self) -> dict[Key, float]:
        """y_r = prod(mu(r_i) phi(r_i)) sum_{r | a} lambda_a / prod |a_i|."""
        out = {}
        for r in self.support:
            c = 1
            for s in r:
                c *= (-1) ** len(s) * self._phi(s)
            acc = 0.0
            for a, la in self.lam.items():
                if la and all(ri <= ai for ri, ai in zip(r, a)):
                    nrm = 1
                    for ai in a:
                        nrm *= self._norm(ai)
                    acc += la / nrm
            out[r] = c * acc
        return out

    def inversion_discrepancy(self) -> float:
        lam2 = self.lambda_from_y()
        y2 = self.y_from_lambda()
        d1 = max((abs(lam2[k] - self.lam[k]) for k in self.support), default=0.0)
        d2 = max((abs(y2[k] - self.y[k]) for k in self.support), default=0.0)
        return max(d1, d2)

    @property
    def lambda_max(self) -> float:
        return max((abs(v) for v in self.lam.values()), default=0.0)

    @property
    def y_max(self) -> float:
        return max((abs(v) for v in self.y.values()), default=0.0)

    def generators(self, key: Key) -> list[QuadInt]:
        f = self.cfg.field
        out = []
        for s in key:
            g = ONE
            for i in sorted(s):
                g = mul(f, g, self.primes[i].generator)
            out.append(canonical(f, g))
        return out

    def records(self) -> Iterator[dict]:
        for key in self.support:
            yield {
                "ideals": [str(g) for g in self.generators(key)],
                "norms": [self._norm(s) for s in key],
                "y": self.y[key],
                "lambda": self.lam[key],
            }

    def write_records(self, fh: IO[str]) -> int:
        n = 0
        for rec in self.records():
            fh.write(json.dumps(rec, separators=(",", ":")) + "\n")
            n += 1
        return n


def build_table(cfg: WeightConfig) -> WeightTable:
    return WeightTable(cfg)


def y_value(cfg: WeightConfig, r: Sequence[QuadInt]) -> float:
    return WeightTable(cfg).y_value(r)


def lambda_value(cfg: WeightConfig, d: Sequence[QuadInt]) -> float:
    return WeightTable(cfg).lambda_value(d)


def inversion_check(cfg: WeightConfig) -> float:
    """Largest discrepancy over the support in the round trip y -> lambda -> y
    and between the directly computed lambda and lambda rebuilt from y."""
    return WeightTable(cfg).inversion_discrepancy()


def lambda_growth(cfg: WeightConfig) -> float:
    """lambda_max / (y_max (log R)^k)."""
    t = WeightTable(cfg)
    return t.lambda_max / (t.y_max * t.logR**cfg.k)


# --- direct evaluation of S1 and S2 ------------------------------------------


@dataclass
class EmpiricalSums:
    S1: float
    S2: float
    n_alpha: int
    v0: QuadInt
    modulus: QuadInt


def empirical_sums(cfg: WeightConfig, N, table: WeightTable | None = None) -> EmpiricalSums:
    f = cfg.field
    if cfg.tuple is None:
        raise ValueError("S1/S2 need the shift tuple")
    lo, hi = dyadic(N).norm_bounds()
    size = count_box(f, dyadic(N)).count
    if size > MAX_BOX:
        raise ScaleError(f"|A(N)| = {size} exceeds the desk-scale bound {MAX_BOX}")
    if cfg.R > math.sqrt(size):
        raise ValueError("need R <= |A(N)|^(1/2)")
    table = table or WeightTable(cfg)
    A, B, _ = box_arrays(f, lo, hi)
    v0 = choose_v0(f, cfg.tuple, cfg.D0)
    mod = modulus_m(f, cfg.D0)
    rs = ResidueSystem(f, mod)
    keep = rs.index_arrays(A, B) == rs.index(v0)
    A, B = A[keep], B[keep]
    shifted = [(A + h.a, B + h.b) for h in cfg.tuple.shifts]
    masks = {}
    inner = np.zeros(len(A))
    for key, lam in table.lam.items():
        if lam == 0:
            continue
        m = np.ones(len(A), dtype=bool)
        for i, s in enumerate(key):
            for j in s:
                if (i, j) not in masks:
                    masks[i, j] = divisible_mask(f, table.primes[j].generator, *shifted[i])
                m &= masks[i, j]
        inner += lam * m
    S1 = float(np.sum(inner**2))
    bp = cfg.beta_params or BetaParams()
    count = np.zeros(len(A))
    if len(A):
        norms = [X * X + f.trace_omega * X * Y + f.norm_omega * Y * Y for X, Y in shifted]
        top = int(max(n.max() for n in norms))
        t = norm_table(f, 0, max(top, 1))
        for nn in norms:
            ok = nn > 0
            bm = np.zeros(len(A), dtype=bool)
            bm[ok] = beta_mask(t, N, bp, nn[ok])
            count += bm
    S2 = float(np.sum(count * inner**2))
    return EmpiricalSums(S1, S2, len(A), v0, mod)


def empirical_S1(cfg: WeightConfig, N) -> float:
    return empirical_sums(cfg, N).S1


def empirical_S2(cfg: WeightConfig, N) -> float:
    return empirical_sums(cfg, N).S2
