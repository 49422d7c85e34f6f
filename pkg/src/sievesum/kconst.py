"""Estimate the limit K of the product prod(1 - 1/p2_i) over the flattened
twin-pair sequence.

A finite partial product is still far from the limit (about 15% high at
1e8), so two independent extrapolations are provided:

* ``hl-tail``: analytic tail under the pair-density model 2*C2/ln^2(t),
  where C2 is the twin-pair density constant prod_{p>2}(1 - 1/(p-1)^2),
  itself computed here rather than quoted. Each pair near t contributes
  about -2/t to the log product, so the missing tail integrates to
  -4*C2/ln(x) (plus a second-order 1/v^2 correction).
* ``aitken``: iterated pairwise linear extrapolation of the log partial
  products against h = 1/ln(limit), which assumes nothing about pair
  density and serves as the cross-check.

Estimates are conditional on the sieved data plus the density model and
carry an explicit error estimate; they are not proof-grade bounds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .sieve import DEFAULT_SEGMENT_SIZE, SieveConfig, iter_prime_arrays, iter_twin_lesser_arrays

PAIR_DENSITY_PRIME_LIMIT = 10**8
HL_ASSUMPTIONS = (
    "conditional on sieved twin pairs up to the stated limit plus the "
    "2*C2/ln^2(t) pair-density tail model; error estimate is heuristic"
)
AITKEN_ASSUMPTIONS = (
    "conditional on sieved twin pairs up to the stated limits; assumes the "
    "log partial product is asymptotically linear in 1/ln(limit)"
)


class ExtrapolationError(ValueError):
    """The partial product cannot support the requested extrapolation."""


class DegenerateDataError(ExtrapolationError):
    """Differences underlying the extrapolation vanish (e.g. repeated limits)."""


@dataclass(frozen=True)
class PartialProduct:
    """log(prod(1 - 1/v)) over twin-sequence values v with pair member <= limit."""

    limit: int
    log_value: float
    pair_count: int


@dataclass(frozen=True)
class TwinConstant:
    """Computed twin-pair density constant with its self-consistency record."""

    c2: float
    limit: int
    self_check_delta: float


@dataclass(frozen=True)
class ProductEstimate:
    method: str
    k_estimate: float
    limit_used: int
    tail_correction: float
    error_estimate: float
    c2_used: float | None = None
    assumptions: str = field(default=HL_ASSUMPTIONS)


def partial_product(
    limit: int, segment_size: int = DEFAULT_SEGMENT_SIZE
) -> PartialProduct:
    """Accumulate log1p(-1/v) over both members of every twin pair with
    greater member <= limit (the repeated 5 contributes twice).

    Per-segment contributions are computed vectorised, then reduced in
    ascending order with exactly rounded summation (math.fsum), so the
    result is bit-identical for any segmentation of the same limit.
    Limits below the first pair yield the empty product (log_value 0.0).
    """
    config = SieveConfig(limit, segment_size)
    chunks: list[list[float]] = []
    pair_count = 0
    if limit >= 5:
        for lessers in iter_twin_lesser_arrays(config):
            if lessers.size == 0:
                continue
            pair_count += int(lessers.size)
            v = lessers.astype(np.float64)
            per_pair = np.log1p(-1.0 / v) + np.log1p(-1.0 / (v + 2.0))
            chunks.append(per_pair.tolist())
    log_value = math.fsum(x for chunk in chunks for x in chunk)
    return PartialProduct(limit=limit, log_value=log_value, pair_count=pair_count)


def c2_partial(limit: int, segment_size: int = DEFAULT_SEGMENT_SIZE) -> float:
    """Raw truncation prod_{2<p<=limit}(1 - 1/(p-1)^2), no tail correction."""
    chunks: list[list[float]] = []
    for arr in iter_prime_arrays(SieveConfig(limit, segment_size)):
        arr = arr[arr > 2]
        if arr.size:
            x = arr.astype(np.float64)
            chunks.append(np.log1p(-1.0 / ((x - 1.0) ** 2)).tolist())
    return math.exp(math.fsum(x for chunk in chunks for x in chunk))


def _c2_density_tail(limit: int) -> float:
    # sum_{p>limit} 1/(p-1)^2 under prime density 1/ln(t):
    # integral of 1/(t^2 ln t) ~ (1/(x ln x)) (1 - 1/ln x), error O(1/(x ln^3 x)).
    ln = math.log(limit)
    return (1.0 / (limit * ln)) * (1.0 - 1.0 / ln)


@lru_cache(maxsize=None)
def twin_constant(prime_limit: int = PAIR_DENSITY_PRIME_LIMIT) -> TwinConstant:
    """The pair-density constant prod_{p>2}(1 - 1/(p-1)^2) to >= 10 digits.

    Computed from the defining product over primes up to `prime_limit` plus a
    density-model tail bound; accepted only if the tail-corrected truncations
    at prime_limit/2 and prime_limit agree to 1e-10. Cached per limit.
    """
    if prime_limit < 10**6:
        raise ValueError("prime_limit too small for a 10-digit result")
    half = prime_limit // 2
    lo_chunks: list[float] = []
    hi_chunks: list[float] = []
    for arr in iter_prime_arrays(SieveConfig(prime_limit, DEFAULT_SEGMENT_SIZE)):
        arr = arr[arr > 2]
        if arr.size == 0:
            continue
        x = arr.astype(np.float64)
        terms = np.log1p(-1.0 / ((x - 1.0) ** 2))
        cut = int(np.searchsorted(arr, half, side="right"))
        if cut:
            lo_chunks.append(terms[:cut].tolist())
        if cut < arr.size:
            hi_chunks.append(terms[cut:].tolist())
    log_half = math.fsum(x for chunk in lo_chunks for x in chunk)
    log_full = math.fsum(
        x for chunk in (*lo_chunks, *hi_chunks) for x in chunk
    )
    at_half = math.exp(log_half - _c2_density_tail(half))
    at_full = math.exp(log_full - _c2_density_tail(prime_limit))
    delta = abs(at_full - at_half)
    if delta > 1e-10:
        raise ArithmeticError(
            f"pair-density constant failed self-consistency: truncations at "
            f"{half} and {prime_limit} differ by {delta:.3e}"
        )
    return TwinConstant(c2=at_full, limit=prime_limit, self_check_delta=delta)


def hl_tail_correction(limit: int, c2: float) -> float:
    """Log-space tail below 1/ln(limit) under the 2*C2/ln^2(t) pair density.

    Leading term: each pair near t adds ~ -2/t to the log, so the tail is
    -integral_x^inf 4*C2/(t ln^2 t) dt = -4*C2/ln(x). The second-order term
    is -(1/2) sum_{v>x} 1/v^2 under the same density, ~ -2*C2/(x ln^2 x).
    """
    ln = math.log(limit)
    return -4.0 * c2 / ln - 2.0 * c2 / (limit * ln * ln)


def extrapolate_hl(pp: PartialProduct, c2: float | None = None) -> ProductEstimate:
    """Tail-correct a single partial product using the pair-density model."""
    if pp.limit < 10**4:
        raise ExtrapolationError(
            f"limit {pp.limit} too small for the density tail model (need >= 1e4)"
        )
    if c2 is None:
        c2 = twin_constant().c2
    tail = hl_tail_correction(pp.limit, c2)
    k = math.exp(pp.log_value + tail)
    ln = math.log(pp.limit)
    # first neglected tail order is ~ 1/ln(x) relative to the leading term
    error = abs(tail) / ln * k
    return ProductEstimate(
        method="hl-tail",
        k_estimate=k,
        limit_used=pp.limit,
        tail_correction=tail,
        error_estimate=error,
        c2_used=c2,
        assumptions=HL_ASSUMPTIONS,
    )


def extrapolate_aitken(partials: list[PartialProduct]) -> ProductEstimate:
    """Accelerate partial products from increasing limits (geometric spacing
    such as 1e6/1e7/1e8 works well) without any density input.

    The log partials are extrapolated to h = 0 in the variable
    h = 1/ln(limit) by iterated pairwise linear elimination; the estimate
    comes from the latest pair and the spread of the pairwise extrapolants
    supplies the error estimate.
    """
    if len(partials) < 3:
        raise ValueError("need at least 3 partial products")
    pps = sorted(partials, key=lambda p: p.limit)
    hs = [1.0 / math.log(p.limit) for p in pps]
    ys = [p.log_value for p in pps]
    h_scale = max(hs)
    estimates: list[float] = []
    for j in range(len(pps) - 1):
        dh = hs[j + 1] - hs[j]
        if abs(dh) < 1e-12 * h_scale:
            raise DegenerateDataError(
                f"limits {pps[j].limit} and {pps[j + 1].limit} give a "
                f"near-zero difference in 1/ln(limit) ({dh:.3e}); "
                "extrapolation is ill-conditioned"
            )
        slope = (ys[j + 1] - ys[j]) / dh
        estimates.append(math.exp(ys[j + 1] - slope * hs[j + 1]))
    k = estimates[-1]
    spread = max(
        abs(b - a) for a, b in zip(estimates, estimates[1:])
    )
    error = max(spread, 4.0 * math.ulp(k))
    return ProductEstimate(
        method="aitken",
        k_estimate=k,
        limit_used=pps[-1].limit,
        tail_correction=math.log(k) - ys[-1],
        error_estimate=error,
        c2_used=None,
        assumptions=AITKEN_ASSUMPTIONS,
    )


def estimate_K(
    limit: int,
    method: str = "both",
    segment_size: int = DEFAULT_SEGMENT_SIZE,
) -> ProductEstimate:
    """Dispatch to one or both estimators at the given sieve limit.

    ``aitken`` uses partial products at limit/100, limit/10 and limit.
    ``both`` runs both and returns the hl-tail estimate with its error
    inflated to cover the spread between the two methods.
    """
    if method not in ("hl-tail", "aitken", "both"):
        raise ValueError(f"unknown method {method!r}")
    if method == "hl-tail":
        return extrapolate_hl(partial_product(limit, segment_size))
    if limit < 10**6:
        raise ExtrapolationError(
            f"limit {limit} too small for aitken sub-limits (need >= 1e6)"
        )
    partials = [
        partial_product(limit // 100, segment_size),
        partial_product(limit // 10, segment_size),
        partial_product(limit, segment_size),
    ]
    aitken = extrapolate_aitken(partials)
    if method == "aitken":
        return aitken
    hl = extrapolate_hl(partials[-1])
    return ProductEstimate(
        method=hl.method,
        k_estimate=hl.k_estimate,
        limit_used=hl.limit_used,
        tail_correction=hl.tail_correction,
        error_estimate=max(
            hl.error_estimate, abs(hl.k_estimate - aitken.k_estimate)
        ),
        c2_used=hl.c2_used,
        assumptions=HL_ASSUMPTIONS + "; error covers the inter-method spread",
    )
