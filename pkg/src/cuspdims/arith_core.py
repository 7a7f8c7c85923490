"""Factorization and multiplicative-function plumbing.

Single levels are factored exactly up to 2**64 (trial division, then
Pollard-Brent rho with a deterministic Miller-Rabin test).  Range scans
go through an :class:`SpfSieve`, a smallest-prime-factor table built by
a linear sieve.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from typing import Callable, Iterator, Optional, Sequence

import numpy as np

from . import _kernels

MAX_LEVEL = 2**64 - 1
DEFAULT_MEMORY_BUDGET = 2 * 1024**3  # bytes

# Deterministic for every n < 2**64 (Jim Sinclair's set).
_MR_WITNESSES = (2, 325, 9375, 28178, 450775, 9780504, 1795265022)
_SMALL_PRIMES = tuple(p for p in range(2, 1000) if all(p % q for q in range(2, int(p**0.5) + 1)))


class SieveBudgetError(MemoryError):
    """Requested sieve does not fit in the configured memory budget."""


@dataclass(frozen=True, order=True)
class PrimePower:
    p: int
    e: int

    def __post_init__(self):
        if self.e < 1:
            raise ValueError(f"exponent must be >= 1, got {self.e}")
        if not is_prime(self.p):
            raise ValueError(f"{self.p} is not prime")

    @property
    def value(self) -> int:
        return self.p**self.e


@dataclass(frozen=True)
class Factorization:
    n: int
    factors: tuple[PrimePower, ...] = ()

    def __post_init__(self):
        prod = 1
        last = 1
        for pp in self.factors:
            if pp.p <= last:
                raise ValueError("primes must be strictly increasing")
            last = pp.p
            prod *= pp.value
        if prod != self.n:
            raise ValueError(f"factors multiply to {prod}, not {self.n}")

    @classmethod
    def from_pairs(cls, n: int, pairs: Sequence[tuple[int, int]]) -> "Factorization":
        return cls(n, tuple(PrimePower(p, e) for p, e in sorted(pairs)))

    def __iter__(self) -> Iterator[tuple[int, int]]:
        for pp in self.factors:
            yield pp.p, pp.e

    def __len__(self) -> int:
        return len(self.factors)


@dataclass(frozen=True, eq=False)
class SpfSieve:
    """Smallest prime factor for every 2 <= n <= limit (int32 entries)."""

    limit: int
    spf: np.ndarray = field(repr=False)
    primes: np.ndarray = field(repr=False)

    def __getitem__(self, n: int) -> int:
        if not 2 <= n <= self.limit:
            raise IndexError(n)
        return int(self.spf[n])

    def as_dict(self) -> dict[int, int]:
        return {n: int(self.spf[n]) for n in range(2, self.limit + 1)}


def build_spf_sieve(limit: int, memory_budget: int = DEFAULT_MEMORY_BUDGET) -> SpfSieve:
    if limit < 2:
        raise ValueError("sieve limit must be >= 2")
    if limit >= 2**31:
        raise ValueError("sieve entries are 32-bit; limit must be < 2**31")
    # spf table plus the prime list (pi(x) < 1.25506 x / log x)
    n_primes = int(1.25506 * limit / math.log(limit)) + 16
    need = 4 * (limit + 1) + 4 * n_primes
    if need > memory_budget:
        raise SieveBudgetError(
            f"sieve to {limit} needs {need} bytes, budget is {memory_budget}")
    spf, primes = _kernels.linear_sieve(limit, n_primes)
    spf.setflags(write=False)
    primes.setflags(write=False)
    return SpfSieve(limit, spf, primes)


def _is_sprp(n: int, a: int, d: int, s: int) -> bool:
    x = pow(a, d, n)
    if x == 1 or x == n - 1:
        return True
    for _ in range(s - 1):
        x = x * x % n
        if x == n - 1:
            return True
    return False


def is_prime(n: int) -> bool:
    """Deterministic primality for n < 2**64."""
    if n < 2:
        return False
    for p in _SMALL_PRIMES:
        if n % p == 0:
            return n == p
    if n < 1_000_000:
        return True
    if n > MAX_LEVEL:
        raise ValueError("primality is only certified below 2**64")
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_WITNESSES:
        a %= n
        if a and not _is_sprp(n, a, d, s):
            return False
    return True


def _pollard_brent(n: int, rng: random.Random) -> int:
    if n % 2 == 0:
        return 2
    while True:
        y, c, m = rng.randrange(1, n), rng.randrange(1, n), 128
        g = r = q = 1
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(m, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = math.gcd(q, n)
                k += m
            r *= 2
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = math.gcd(abs(x - ys), n)
        if g != n:
            return g


def _split(n: int, out: dict[int, int], rng: random.Random) -> None:
    if n == 1:
        return
    if is_prime(n):
        out[n] = out.get(n, 0) + 1
        return
    r = math.isqrt(n)
    if r * r == n:
        _split(r, out, rng)
        _split(r, out, rng)
        return
    d = _pollard_brent(n, rng)
    _split(d, out, rng)
    _split(n // d, out, rng)


def factorize(n: int, sieve: Optional[SpfSieve] = None) -> Factorization:
    if n < 1:
        raise ValueError("level must be positive")
    if n > MAX_LEVEL:
        raise ValueError("levels are supported below 2**64")
    out: dict[int, int] = {}
    if sieve is not None and n <= sieve.limit:
        spf = sieve.spf
        m = n
        while m > 1:
            p = int(spf[m])
            out[p] = out.get(p, 0) + 1
            m //= p
        return Factorization.from_pairs(n, list(out.items()))
    m = n
    for p in _SMALL_PRIMES:
        if p * p > m:
            break
        while m % p == 0:
            out[p] = out.get(p, 0) + 1
            m //= p
    if m > 1:
        # fixed seed keeps the output order-independent of global RNG state
        _split(m, out, random.Random(m))
    return Factorization.from_pairs(n, list(out.items()))


def mobius(f: Factorization) -> int:
    if any(e >= 2 for _, e in f):
        return 0
    return -1 if len(f) % 2 else 1


def omega(f: Factorization) -> int:
    return len(f)


def euler_phi(f: Factorization) -> int:
    r = 1
    for p, e in f:
        r *= p ** (e - 1) * (p - 1)
    return r


def squarefull_part(f: Factorization) -> int:
    """H(N): product of the prime powers of N with exponent at least 2."""
    r = 1
    for p, e in f:
        if e >= 2:
            r *= p**e
    return r


def is_square(n: int) -> bool:
    r = math.isqrt(n)
    return r * r == n


def squarefree_flags(limit: int) -> np.ndarray:
    """Boolean array s with s[b] true iff b is squarefree (index 0 false)."""
    s = np.ones(limit + 1, dtype=bool)
    s[0] = False
    for a in range(2, math.isqrt(limit) + 1):
        s[a * a::a * a] = False
    return s


def enumerate_squarefull(limit: int) -> np.ndarray:
    """All squarefull n <= limit, ascending, as int64.

    Each squarefull number is a**2 * b**3 with b squarefree in exactly one
    way, so no deduplication is needed.
    """
    if limit < 1:
        raise ValueError("limit must be >= 1")
    bmax = 1
    while (bmax + 1) ** 3 <= limit:
        bmax += 1
    sqf = squarefree_flags(bmax)
    chunks = []
    for b in range(1, bmax + 1):
        if not sqf[b]:
            continue
        b3 = b**3
        amax = math.isqrt(limit // b3)
        a = np.arange(1, amax + 1, dtype=np.int64)
        chunks.append(a * a * b3)
    out = np.concatenate(chunks)
    out.sort()
    return out


def eval_multiplicative(f: Factorization, local: Callable[[int, int], object]):
    r = 1
    for p, e in f:
        r = r * local(p, e)
    return r


def divisors(f: Factorization) -> list[int]:
    ds = [1]
    for p, e in f:
        ds = [d * p**j for d in ds for j in range(e + 1)]
    return sorted(ds)
