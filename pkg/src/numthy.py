"""
Elementary number theory shared by every other module.

Factorizations come from a linear smallest-prime-factor sieve that is built
once and then only read. Numbers above the sieve bound fall back to trial
division.
"""

import math
import logging
import threading
from dataclasses import dataclass

logger = logging.getLogger(__name__)

# Covers the default census ceiling of 500000
SIEVE_LIMIT = 1 << 19
MAX_N = 2**63 - 1


@dataclass(frozen=True)
class Factorization:
    """Canonical factorization of n as ascending (prime, exponent) pairs."""

    n: int
    factors: tuple

    def __post_init__(self):
        product = 1
        previous = 1
        for prime, exponent in self.factors:
            if prime <= previous or exponent < 1:
                raise ValueError(f"non-canonical factorization of {self.n}: {self.factors}")
            previous = prime
            product *= prime ** exponent
        if product != self.n:
            raise ValueError(f"factors {self.factors} do not multiply to {self.n}")

    @property
    def primes(self):
        return [prime for prime, _ in self.factors]

    @property
    def radical(self):
        return math.prod(self.primes)

    @property
    def is_squarefree(self):
        return all(exponent == 1 for _, exponent in self.factors)


@dataclass(frozen=True)
class OddSquarefreeProfile:
    """Sorted primes of an odd squarefree n, their count t and the index r."""

    primes: tuple
    t: int
    r: int

    @property
    def n(self):
        return math.prod(self.primes)


class PrimeSieve:
    """Linear sieve of smallest prime factors up to a fixed limit."""

    def __init__(self, limit=SIEVE_LIMIT):
        if limit < 2:
            raise ValueError(f"sieve limit must be at least 2, got {limit}")
        self.limit = limit
        self.spf, self.primes = self._build(limit)
        logger.debug(f"Built prime sieve up to {limit} ({len(self.primes)} primes)")

    @staticmethod
    def _build(limit):
        spf = [0] * (limit + 1)
        primes = []
        for i in range(2, limit + 1):
            if spf[i] == 0:
                spf[i] = i
                primes.append(i)
            smallest = spf[i]
            for p in primes:
                if p > smallest or i * p > limit:
                    break
                spf[i * p] = p
        return spf, primes

    def factor_pairs(self, n):
        """Return [(prime, exponent), ...] for 1 <= n <= limit."""
        pairs = []
        while n > 1:
            p = self.spf[n]
            exponent = 0
            while n % p == 0:
                n //= p
                exponent += 1
            pairs.append((p, exponent))
        return pairs

    def trial_division(self, n):
        """Factor n beyond the sieve bound, using sieve primes first."""
        pairs = []
        for p in self.primes:
            if p * p > n:
                break
            if n % p == 0:
                exponent = 0
                while n % p == 0:
                    n //= p
                    exponent += 1
                pairs.append((p, exponent))
        candidate = self.primes[-1] + 2
        while candidate * candidate <= n:
            if n % candidate == 0:
                exponent = 0
                while n % candidate == 0:
                    n //= candidate
                    exponent += 1
                pairs.append((candidate, exponent))
            candidate += 2
        if n > 1:
            pairs.append((n, 1))
        return pairs


_shared_sieve = None
_sieve_lock = threading.Lock()


def shared_sieve():
    """Return the process-wide sieve, building it on first use."""
    global _shared_sieve
    if _shared_sieve is None:
        with _sieve_lock:
            if _shared_sieve is None:
                _shared_sieve = PrimeSieve(SIEVE_LIMIT)
    return _shared_sieve


def _check_positive(n):
    if isinstance(n, bool) or not isinstance(n, int):
        raise TypeError(f"expected a positive integer, got {n!r}")
    if n < 1:
        raise ValueError(f"expected a positive integer, got {n}")
    if n > MAX_N:
        raise ValueError(f"{n} exceeds the supported bound {MAX_N}")


def factorize(n):
    """
    Factor n into ascending prime powers.

    Args:
        n (int): 1 <= n <= 2**63 - 1.

    Returns:
        Factorization: The canonical factorization; empty for n = 1.

    Raises:
        ValueError: If n is not positive or too large.
    """
    _check_positive(n)
    sieve = shared_sieve()
    if n <= sieve.limit:
        pairs = sieve.factor_pairs(n)
    else:
        pairs = sieve.trial_division(n)
    return Factorization(n, tuple(pairs))


def mobius(n):
    """Möbius function: 0 unless squarefree, else (-1)^(number of primes)."""
    factorization = factorize(n)
    if not factorization.is_squarefree:
        return 0
    return -1 if len(factorization.factors) % 2 else 1


def totient(n):
    """Euler's totient, multiplicative over the factorization."""
    result = n
    for p in factorize(n).primes:
        result = result // p * (p - 1)
    return result


def divisors(n):
    """All divisors of n in ascending order, 1 and n included."""
    found = [1]
    for prime, exponent in factorize(n).factors:
        powers = [prime ** e for e in range(1, exponent + 1)]
        found += [d * q for d in found for q in powers]
    return sorted(found)


def radical(n):
    """Product of the distinct primes dividing n."""
    return factorize(n).radical


def is_squarefree(n):
    return factorize(n).is_squarefree


def is_prime(n):
    factors = factorize(n).factors
    return len(factors) == 1 and factors[0][1] == 1


def odd_squarefree_profile(n):
    """
    Profile of an odd squarefree n with at least two prime factors.

    r counts the primes strictly below p1 + p2. Equality is impossible since
    p1 + p2 is even.

    Args:
        n (int): Positive integer.

    Returns:
        OddSquarefreeProfile or None: None when n is even, not squarefree,
        or has fewer than two prime factors.
    """
    factorization = factorize(n)
    if n % 2 == 0 or not factorization.is_squarefree:
        return None
    primes = factorization.primes
    if len(primes) < 2:
        return None
    bound = primes[0] + primes[1]
    r = sum(1 for p in primes if p < bound)
    return OddSquarefreeProfile(tuple(primes), len(primes), r)
