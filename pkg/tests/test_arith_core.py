import math
import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cuspdims.arith_core import (Factorization, PrimePower, SieveBudgetError, build_spf_sieve,
                                 divisors, enumerate_squarefull, euler_phi, eval_multiplicative,
                                 factorize, is_prime, is_square, mobius, omega, squarefree_flags,
                                 squarefull_part)


def trial_factor(n):
    out, p = [], 2
    while p * p <= n:
        e = 0
        while n % p == 0:
            n //= p
            e += 1
        if e:
            out.append((p, e))
        p += 1
    if n > 1:
        out.append((n, 1))
    return out


@pytest.fixture(scope="module")
def sieve():
    return build_spf_sieve(10**6)


def test_spf_small():
    s = build_spf_sieve(10)
    assert s.as_dict() == {2: 2, 3: 3, 4: 2, 5: 5, 6: 2, 7: 7, 8: 2, 9: 3, 10: 2}


def test_spf_matches_trial_division(sieve):
    rng = random.Random(5)
    for n in [2, 3, 4, 999983, 10**6] + [rng.randrange(2, 10**6) for _ in range(2000)]:
        assert sieve[n] == trial_factor(n)[0][0]


def test_sieve_prime_list(sieve):
    assert sieve.primes.size == 78498
    assert sieve.primes[-1] == 999983


def test_sieve_limits():
    with pytest.raises(ValueError):
        build_spf_sieve(1)
    with pytest.raises(ValueError):
        build_spf_sieve(2**31)
    with pytest.raises(SieveBudgetError):
        build_spf_sieve(10**8, memory_budget=10**6)


def test_factorize_with_and_without_sieve(sieve):
    for n in range(1, 10**5 + 1, 7):
        assert factorize(n, sieve) == factorize(n)


def test_factorize_product_and_order(sieve):
    for n in range(1, 10**6 + 1, 997):
        f = factorize(n, sieve)
        assert math.prod(pp.value for pp in f.factors) == n
        ps = [p for p, _ in f]
        assert ps == sorted(ps) and len(set(ps)) == len(ps)


@pytest.mark.parametrize("n, pairs", [
    (1, []),
    (67846, [(2, 1), (33923, 1)]),
    (2**64 - 59, [(2**64 - 59, 1)]),
    (4294967291**2, [(4294967291, 2)]),
    (2**64 - 1, [(3, 1), (5, 1), (17, 1), (257, 1), (641, 1), (65537, 1), (6700417, 1)]),
    (600851475143, [(71, 1), (839, 1), (1471, 1), (6857, 1)]),
])
def test_factorize_known(n, pairs):
    assert list(factorize(n)) == pairs


@given(st.integers(2, 2**40), st.integers(2, 2**20))
@settings(max_examples=60, deadline=None)
def test_factorize_semiprime_like(a, b):
    f = factorize(a * b)
    assert math.prod(p**e for p, e in f) == a * b
    assert all(is_prime(p) for p, _ in f)


def test_is_prime_against_sieve(sieve):
    flags = np.zeros(10**6 + 1, dtype=bool)
    flags[sieve.primes] = True
    for n in range(0, 20000):
        assert is_prime(n) == bool(flags[n])


def test_is_prime_pseudoprimes():
    # strong pseudoprimes to several small bases
    for n in [2047, 1373653, 25326001, 3215031751, 2152302898747, 3474749660383,
              341550071728321, 3825123056546413051, 318665857834031151167461]:
        if n < 2**64:
            assert not is_prime(n)
    assert is_prime(2**61 - 1)


def test_factorize_rejects():
    with pytest.raises(ValueError):
        factorize(0)
    with pytest.raises(ValueError):
        factorize(2**64)


def test_dataclass_validation():
    with pytest.raises(ValueError):
        PrimePower(4, 1)
    with pytest.raises(ValueError):
        PrimePower(3, 0)
    with pytest.raises(ValueError):
        Factorization(12, (PrimePower(2, 1), PrimePower(3, 1)))
    with pytest.raises(ValueError):
        Factorization(6, (PrimePower(3, 1), PrimePower(2, 1)))


def brute_phi(n):
    return sum(1 for a in range(1, n + 1) if math.gcd(a, n) == 1)


def brute_mu(n):
    fs = trial_factor(n)
    if any(e > 1 for _, e in fs):
        return 0
    return (-1) ** len(fs)


def brute_H(n):
    best = 1
    for d in range(1, n + 1):
        if n % d == 0:
            c = n // d
            sqfull = all(e >= 2 for _, e in trial_factor(d))
            sqfree = all(e == 1 for _, e in trial_factor(c))
            if sqfull and sqfree and math.gcd(c, d) == 1:
                best = max(best, d)
    return best


def test_multiplicative_helpers_brute_force(sieve):
    for n in range(1, 1500):
        f = factorize(n, sieve)
        assert euler_phi(f) == brute_phi(n)
        assert mobius(f) == brute_mu(n)
        assert omega(f) == len({p for p, _ in trial_factor(n)})
        assert squarefull_part(f) == brute_H(n)
        assert divisors(f) == [d for d in range(1, n + 1) if n % d == 0]


def test_helpers_definition_checks_to_1e5(sieve):
    # cheaper definition-based checks over the whole range
    for n in range(1, 10**5 + 1):
        f = factorize(n, sieve)
        tf = trial_factor(n) if n > 1 else []
        assert list(f) == tf
    sq = squarefree_flags(10**5)
    for n in range(1, 10**5 + 1, 13):
        assert sq[n] == all(e == 1 for _, e in trial_factor(n))


def test_is_square():
    for n in range(0, 5000):
        assert is_square(n) == (int(math.isqrt(n)) ** 2 == n)
    big = (2**31 + 11) ** 2
    assert is_square(big) and not is_square(big + 1) and not is_square(big - 1)


def test_enumerate_squarefull_brute():
    got = enumerate_squarefull(10**4).tolist()
    want = [n for n in range(1, 10**4 + 1) if all(e >= 2 for _, e in trial_factor(n))]
    assert got == want
    assert enumerate_squarefull(100).tolist() == [1, 4, 8, 9, 16, 25, 27, 32, 36, 49, 64, 72, 81, 100]


@given(st.integers(1, 10**6), st.integers(1, 10**6))
@settings(max_examples=200, deadline=None)
def test_eval_multiplicative_coprime(m, n):
    if math.gcd(m, n) != 1:
        return
    local = lambda p, e: p**e + 3 * e - p  # any function of (p, e)
    fm, fn, fmn = factorize(m), factorize(n), factorize(m * n)
    assert eval_multiplicative(fmn, local) == eval_multiplicative(fm, local) * eval_multiplicative(fn, local)
