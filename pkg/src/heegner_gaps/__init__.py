"""Arithmetic, sieve and functional computations behind bounded gaps between
products of two primes in the nine imaginary quadratic fields of class
number one."""

__version__ = "0.1.0"

from .field_core import HEEGNER_D, FieldParams, QuadInt, make_field, norm, parse_element
from .arithmetic import ElementTag, Factorization, classify, factor_element, prime_above
from .box_sieve import BetaParams, beta, census, count_box, dyadic, full, sieve_primes
from .tuples import HTuple, choose_v0, is_admissible, modulus_m
from .functional import ConsistencyError, PolyF, criterion
from .weights import WeightConfig, WeightTable, empirical_sums, inversion_check
from .gap_lab import GapPair, Which, corollary_decomposition, equidist_report, find_gap_pairs

__all__ = [
    "HEEGNER_D", "FieldParams", "QuadInt", "make_field", "norm", "parse_element",
    "ElementTag", "Factorization", "classify", "factor_element", "prime_above",
    "BetaParams", "beta", "census", "count_box", "dyadic", "full", "sieve_primes",
    "HTuple", "choose_v0", "is_admissible", "modulus_m",
    "ConsistencyError", "PolyF", "criterion",
    "WeightConfig", "WeightTable", "empirical_sums", "inversion_check",
    "GapPair", "Which", "corollary_decomposition", "equidist_report", "find_gap_pairs",
]
