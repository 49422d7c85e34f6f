import math

import numpy as np
import pytest


def trial_division_primes(limit: int) -> list[int]:
    """Independent oracle: keep n iff no prime divisor <= sqrt(n) divides it.

    Pure divisibility tests (vectorised remainders), no index striding, so
    it shares no mechanics with the segmented sieve under test.
    """
    if limit < 2:
        return []
    divisors: list[int] = []
    for c in range(2, math.isqrt(limit) + 1):
        if all(c % p for p in divisors if p * p <= c):
            divisors.append(c)
    n = np.arange(2, limit + 1, dtype=np.int64)
    composite = np.zeros(n.shape, dtype=bool)
    for p in divisors:
        composite |= (n % p == 0) & (n != p)
    return n[~composite].tolist()


@pytest.fixture(scope="session")
def oracle_primes_1m() -> list[int]:
    return trial_division_primes(10**6)
