"""Concrete series over primes: the prime, square-free and twin-prime sums,
primorial/totient helpers, reciprocal sums over the twin sequence, and the
floating companions used once exact denominators become impractical.
"""

from __future__ import annotations

import math
from fractions import Fraction
from itertools import islice
from typing import Iterator, NamedTuple

import numpy as np

from .engine import ReportRow, SeriesDefinition, report_rows
from .sieve import (
    DEFAULT_SEGMENT_SIZE,
    SieveConfig,
    iter_prime_arrays,
    iter_primes,
    nth_primes,
    nth_twin_values,
    twin_sequence_up_to,
)

#: Euler-Mascheroni constant, full double precision (numpy's computed value).
EULER_GAMMA = float(np.euler_gamma)


class PrimorialValue(NamedTuple):
    n: int
    value: int


class TotientOfPrimorial(NamedTuple):
    n: int
    value: int


class BrunPartial(NamedTuple):
    limit: int
    sum: Fraction


def primorial(n: int) -> PrimorialValue:
    """Product of the first n primes; n = 0 gives the empty product 1."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    value = 1
    for p in nth_primes(n) if n else []:
        value *= p
    return PrimorialValue(n, value)


def totient_primorial(n: int) -> TotientOfPrimorial:
    """prod(p_i - 1) over the first n primes, i.e. the Euler totient of the
    n-th primorial; n = 0 gives 1."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    value = 1
    for p in nth_primes(n) if n else []:
        value *= p - 1
    return TotientOfPrimorial(n, value)


def prime_definition(depth_guard: int | None = None) -> SeriesDefinition:
    """F_i = p_i with a = 1: term n is totient(p_{n-1}#) / p_n#."""
    kwargs = {"depth_guard": depth_guard} if depth_guard else {}
    return SeriesDefinition(iter_primes, offset_a=1, label="prime", **kwargs)


def square_free_definition(depth_guard: int | None = None) -> SeriesDefinition:
    """F_i = p_i^2 with a = 1: term n is the fraction of integers whose first
    squared-prime divisor is p_n^2."""
    kwargs = {"depth_guard": depth_guard} if depth_guard else {}
    return SeriesDefinition(
        lambda: (p * p for p in iter_primes()),
        offset_a=1,
        label="square-free",
        **kwargs,
    )


def twin_prime_definition(depth_guard: int | None = None) -> SeriesDefinition:
    """F = odd primes (3, 5, 7, ...) with a = 2: term n is the fraction of
    odd pairs (x, x+2) first hit when sieving by the n-th odd prime."""
    kwargs = {"depth_guard": depth_guard} if depth_guard else {}

    def odd_primes() -> Iterator[int]:
        return islice(iter_primes(), 1, None)

    return SeriesDefinition(odd_primes, offset_a=2, label="twin-prime", **kwargs)


def prime_series(n_terms: int) -> list[ReportRow]:
    return report_rows(prime_definition(), n_terms)


def square_free_series(n_terms: int) -> list[ReportRow]:
    return report_rows(square_free_definition(), n_terms)


def twin_prime_series(n_terms: int) -> list[ReportRow]:
    return report_rows(twin_prime_definition(), n_terms)


def brun_partial(limit: int) -> BrunPartial:
    """Exact sum of 1/v over the flattened twin sequence up to `limit`.

    The shared member 5 contributes twice, matching the pairwise convention
    (1/3 + 1/5) + (1/5 + 1/7) + ... of the reciprocal twin sum.
    """
    total = Fraction(0)
    for v in twin_sequence_up_to(limit):
        total += Fraction(1, v)
    return BrunPartial(limit, total)


def _dominance_violation(n_terms: int) -> int | None:
    """First index k where term k of the a=1 series over the twin sequence
    fails (<= 1/p2_k at k=1, < 1/p2_k for k >= 2), or None.

    Term k is prod_{i<k}(p2_i - 1) / (prod_{i<k} p2_i * p2_k), so the
    comparison against 1/p2_k reduces to comparing the two running integer
    products; no rational reduction is needed.
    """
    values = nth_twin_values(n_terms)
    num = 1  # prod (p2_i - 1), i < k
    den = 1  # prod p2_i, i < k
    for k, v in enumerate(values, 1):
        if k == 1:
            if num > den:
                return k
        elif num >= den:
            return k
        num *= v - 1
        den *= v
    return None


def brun_dominance_check(n_terms: int) -> bool:
    """True iff every term of the a=1 twin-sequence series is bounded by the
    matching reciprocal 1/p2_k (strictly for k >= 2)."""
    return _dominance_violation(n_terms) is None


def mertens_residual(n_terms: int) -> list[tuple[int, float]]:
    """(p_n, ratio) for n = 1..n_terms, where ratio = (1 - S_n) ln(p_n) e^gamma.

    The residual 1 - S_n = prod(1 - 1/p_i) is evaluated in log space; the
    ratio tends to 1.
    """
    if n_terms < 1:
        raise ValueError("n_terms must be at least 1")
    ps = np.array(nth_primes(n_terms), dtype=np.float64)
    log_residual = np.cumsum(np.log1p(-1.0 / ps))
    ratios = np.exp(log_residual) * np.log(ps) * math.exp(EULER_GAMMA)
    return list(zip((int(p) for p in ps), ratios.tolist()))


def _prime_log_sum(limit: int, transform) -> float:
    """Exactly rounded sum of transform(p) over primes p <= limit.

    transform maps a float64 prime array to the per-prime float contributions.
    math.fsum makes the total independent of segmentation.
    """
    chunks: list[list[float]] = []
    for arr in iter_prime_arrays(SieveConfig(limit, DEFAULT_SEGMENT_SIZE)):
        if arr.size:
            chunks.append(transform(arr.astype(np.float64)).tolist())
    return math.fsum(x for chunk in chunks for x in chunk)


def square_free_sum_float(limit: int) -> float:
    """Floating S^SF using all primes <= limit: 1 - prod(1 - 1/p^2)."""
    log_r = _prime_log_sum(limit, lambda x: np.log1p(-1.0 / (x * x)))
    return 1.0 - math.exp(log_r)


def twin_residual_float(limit: int) -> float:
    """Floating 1/2 - S^TP using odd primes <= limit: (1/2) prod(1 - 2/p)."""
    log_r = _prime_log_sum(limit, lambda x: np.log1p(-2.0 / x[x > 2.0]))
    return 0.5 * math.exp(log_r)
