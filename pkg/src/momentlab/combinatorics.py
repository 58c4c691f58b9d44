"""Exact integer and rational combinatorics used by the moment operations.

Everything here returns Python ints or Fractions, no floats. The cached
recurrences are safe to share between threads: functools caches take an
internal lock and the functions are pure, so concurrent callers can only
ever observe identical values.
"""
from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache
from typing import Iterator, Sequence


@lru_cache(maxsize=None)
def stirling_subset(n: int, k: int) -> int:
    """Stirling subset number: partitions of an n-set into k nonempty blocks.

    Triangle recurrence S(n, k) = k S(n-1, k) + S(n-1, k-1), with
    S(0, 0) = 1 and S(n, 0) = S(0, k) = 0 otherwise.
    """
    if n < 0 or k < 0:
        raise ValueError("stirling_subset needs n >= 0 and k >= 0")
    if n == 0 and k == 0:
        return 1
    if n == 0 or k == 0 or k > n:
        return 0
    return k * stirling_subset(n - 1, k) + stirling_subset(n - 1, k - 1)


def boltzmann(n: int, k: int) -> int:
    """Number of surjections from an n-set onto a k-set.

    For n >= 1 this is the alternating sum
    sum_{j=0}^{k-1} (-1)^j C(k, j) (k - j)^n; the n = 0 edge follows the
    surjection count itself (1 for k = 0, else 0), which keeps all three
    characterizations below in agreement everywhere.
    """
    if n < 0 or k < 0:
        raise ValueError("boltzmann needs n >= 0 and k >= 0")
    if n == 0:
        return 1 if k == 0 else 0
    if k == 0 or k > n:
        return 0
    total = 0
    for j in range(k):
        term = math.comb(k, j) * (k - j) ** n
        total += -term if j % 2 else term
    return total


def boltzmann_from_stirling(n: int, k: int) -> int:
    """Same count, via k! times the Stirling subset number."""
    if n < 0 or k < 0:
        raise ValueError("needs n >= 0 and k >= 0")
    return math.factorial(k) * stirling_subset(n, k)


def boltzmann_by_finite_difference(n: int, k: int) -> int:
    """Same count, as the k-th forward difference of x^n at x = 0."""
    if n < 0 or k < 0:
        raise ValueError("needs n >= 0 and k >= 0")
    total = 0
    for j in range(k + 1):
        term = math.comb(k, j) * j ** n
        total += term if (k - j) % 2 == 0 else -term
    return total


def binom_general(t: Fraction | int, j: int) -> Fraction:
    """Generalized binomial coefficient C(t, j) = t (t-1) ... (t-j+1) / j!.

    Defined for any rational t; for integer t >= 0 it agrees with the
    ordinary binomial coefficient. C(t, 0) = 1.
    """
    if j < 0:
        raise ValueError("binom_general needs j >= 0")
    t = Fraction(t)
    num = Fraction(1)
    for i in range(j):
        num *= t - i
    return num / math.factorial(j)


def compositions(n: int, j: int) -> Iterator[tuple[int, ...]]:
    """Yield the compositions of n into exactly j positive parts.

    Lexicographic order, so (1, 2) comes before (2, 1). Empty stream when
    j > n. There are C(n-1, j-1) of them.
    """
    if n < 1 or j < 1:
        raise ValueError("compositions needs n >= 1 and j >= 1")

    def rec(rest: int, parts: int, prefix: tuple[int, ...]) -> Iterator[tuple[int, ...]]:
        if parts == 1:
            yield prefix + (rest,)
            return
        for first in range(1, rest - parts + 2):
            yield from rec(rest - first, parts - 1, prefix + (first,))

    if j > n:
        return
    yield from rec(n, j, ())


def multinomial(n: int, parts: Sequence[int]) -> int:
    """Multinomial coefficient n! / (n_1! ... n_j!); parts must sum to n."""
    if any(p < 0 for p in parts):
        raise ValueError("multinomial parts must be non-negative")
    if sum(parts) != n:
        raise ValueError("multinomial parts must sum to n")
    out = math.factorial(n)
    for p in parts:
        out //= math.factorial(p)
    return out


def boltzmann_ratio_bound_report(n_max: int) -> list[dict]:
    """Check the ratio estimate B(n, k+1)/B(n, k) <= ((k+1)/k)^n / (k+1)^2.

    The estimate is reported, not asserted, because it fails for small
    (n, k): already at n = 3, k = 1 the left side is 6/1 while the right
    side is 8/4 = 2. Returns one record per violation over
    1 <= k < n <= n_max, with exact rational values.
    """
    out = []
    for n in range(2, n_max + 1):
        for k in range(1, n):
            lhs = Fraction(boltzmann(n, k + 1), boltzmann(n, k))
            rhs = Fraction(k + 1, k) ** n / (k + 1) ** 2
            if lhs > rhs:
                out.append({"n": n, "k": k, "ratio": lhs, "bound": rhs})
    return out
