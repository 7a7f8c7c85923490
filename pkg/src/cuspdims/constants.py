"""Numerical constants computed from their definitions, with error bounds."""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache

import mpmath

EULER_GAMMA = 0.57721566490153286061
# n/phi(n) < e^gamma loglog n + 3/loglog n for all n >= 3
# (Rosser-Schoenfeld 1962, Thm 15: 2.50637 works except at n = 223092870).
ROSSER_SCHOENFELD_C = 3.0
# omega(n) <= 1.3841 log n / loglog n for n >= 3 (Robin 1983).
ROBIN_OMEGA_C = 1.3841


def bernoulli_numbers(m: int) -> list[Fraction]:
    """B_0..B_m with B_1 = -1/2."""
    B = [Fraction(0)] * (m + 1)
    B[0] = Fraction(1)
    for n in range(1, m + 1):
        B[n] = -sum(math.comb(n + 1, j) * B[j] for j in range(n)) / (n + 1)
    return B


def zeta_euler_maclaurin(s, M: int = 40, J: int = 12, dps: int = 50):
    """zeta(s) for real s > 1 and a rigorous bound on the truncation error.

    For real s the Euler-Maclaurin remainder is bounded by the first
    omitted correction term.
    """
    with mpmath.workdps(dps):
        s = mpmath.mpf(s)
        B = bernoulli_numbers(2 * J + 2)
        total = mpmath.fsum(mpmath.mpf(n) ** -s for n in range(1, M))
        total += mpmath.mpf(M) ** (1 - s) / (s - 1) + mpmath.mpf(M) ** -s / 2

        def term(j):
            poch = mpmath.rf(s, 2 * j - 1)
            b = B[2 * j]
            return mpmath.mpf(b.numerator) / b.denominator / mpmath.factorial(2 * j) \
                * poch * mpmath.mpf(M) ** (-s - 2 * j + 1)

        total += mpmath.fsum(term(j) for j in range(1, J + 1))
        err = abs(term(J + 1))
        return total, err


@lru_cache(maxsize=None)
def eta_with_error() -> tuple[float, float]:
    """eta = zeta(3/2)/zeta(3) and an upper bound on |error|."""
    with mpmath.workdps(50):
        z32, e32 = zeta_euler_maclaurin(mpmath.mpf(3) / 2)
        z3, e3 = zeta_euler_maclaurin(3)
        val = z32 / z3
        hi = (z32 + e32) / (z3 - e3)
        lo = (z32 - e32) / (z3 + e3)
        err = max(hi - val, val - lo)
        return float(val), float(err) + 1e-16


def eta() -> float:
    return eta_with_error()[0]


def eta_upper() -> float:
    """A value >= eta, safe to use on the large side of inequalities."""
    v, e = eta_with_error()
    return v + e + 1e-15


def primes_upto(n: int) -> list[int]:
    s = bytearray([1]) * (n + 1)
    s[0:2] = b"\x00\x00"
    for p in range(2, math.isqrt(n) + 1):
        if s[p]:
            s[p * p::p] = bytes(len(range(p * p, n + 1, p)))
    return [i for i in range(n + 1) if s[i]]


@lru_cache(maxsize=None)
def artin_lower_bound(prime_limit: int = 10**4) -> float:
    """A rigorous lower bound for prod_p (1 - 1/(p(p-1))).

    Partial product to prime_limit, times 1 - 1/P for the tail
    (prod_{p>P} (1 - 1/(p(p-1))) >= 1 - sum_{n>P} 1/(n(n-1)) = 1 - 1/P).
    """
    prod = 1.0
    for p in primes_upto(prime_limit):
        prod *= 1.0 - 1.0 / (p * (p - 1))
    # float round-off over ~1200 factors is far below 1e-12 relative
    return prod * (1.0 - 1.0 / prime_limit) * (1.0 - 1e-12)


def ford_C(dps: int = 30) -> float:
    """Ford's C = 1/(2|log rho|), where F(rho) = 1 for
    F(x) = sum_{n>=1} ((n+1)log(n+1) - n log n - 1) x^n."""
    with mpmath.workdps(dps):
        def F(x):
            return mpmath.nsum(
                lambda n: ((n + 1) * mpmath.log(n + 1) - n * mpmath.log(n) - 1) * x**n,
                [1, mpmath.inf])
        rho = mpmath.findroot(lambda x: F(x) - 1, mpmath.mpf("0.54"))
        return float(1 / (2 * abs(mpmath.log(rho))))
