"""
Leading coefficients of cyclotomic polynomials from power sums.

S_k(n) is the sum of k-th powers of the primitive n-th roots of unity and
sigma_k(n) is the coefficient of Φ_n at x^(phi(n) - k). Power sums have
closed forms, Newton's identities turn them into sigma_k, and for odd
squarefree n with an odd number of primes the sigma ladder below p1 + p2 has
a closed form of its own. The roots themselves are never materialized.
"""

import math
import logging
from dataclasses import dataclass, field

from errors import InexactDivisionError
from numthy import factorize, is_prime, mobius, totient, odd_squarefree_profile

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PowerSumTable:
    """values[k - 1] = S_k(n) for 1 <= k <= K."""

    n: int
    values: tuple

    def __getitem__(self, k):
        if not 1 <= k <= len(self.values):
            raise IndexError(f"S_{k} not tabulated for n={self.n} (K={len(self.values)})")
        return self.values[k - 1]


@dataclass(frozen=True)
class SigmaPrefix:
    """sigma[k] = coefficient of Φ_n at x^(phi(n) - k), 0 <= k <= K."""

    n: int
    sigma: tuple

    @property
    def K(self):
        return len(self.sigma) - 1


@dataclass(frozen=True)
class TheoremMainReport:
    """Outcome of checking which values the leading coefficients of Φ_2n take."""

    n: int
    primes: tuple
    t: int
    r: int
    guaranteed: tuple
    extra_minus: bool
    verified: bool
    witness: dict = field(default_factory=dict)

    @property
    def required(self):
        """Guaranteed values plus 1 - r when the extra condition holds."""
        if self.extra_minus:
            return (1 - self.r,) + self.guaranteed
        return self.guaranteed

    def describe(self):
        """Render the report as printable lines."""
        lines = [
            f"n = {' * '.join(map(str, self.primes))} = {self.n}",
            f"t = {self.t}, r = {self.r}",
            f"guaranteed coefficients of Φ_{2 * self.n}: "
            f"{self.guaranteed[0]}..{self.guaranteed[-1]}",
        ]
        if self.extra_minus:
            lines.append(f"1 + p_r < p_1 + p_2, so {1 - self.r} is required as well")
        for value in self.required:
            exponent = self.witness.get(value)
            where = f"x^{exponent}" if exponent is not None else "missing"
            lines.append(f"  {value:>3}: {where}")
        return lines


def _require_odd_squarefree(n):
    factorization = factorize(n)
    if n == 1 or n % 2 == 0 or not factorization.is_squarefree:
        raise ValueError(f"n must be odd, squarefree and greater than 1, got {n}")
    return factorization


def power_sum(n, k):
    """
    S_k(n) for odd squarefree n via (-1)^t phi(g) mu(g), g = gcd(n, k).

    Args:
        n (int): Odd squarefree integer greater than 1.
        k (int): Positive exponent.

    Returns:
        int: The exact power sum.

    Raises:
        ValueError: If n is even, not squarefree, or 1.
    """
    factorization = _require_odd_squarefree(n)
    if k < 1:
        raise ValueError(f"power sums need k >= 1, got {k}")
    g = math.gcd(n, k)
    sign = -1 if len(factorization.factors) % 2 else 1
    return sign * totient(g) * mobius(g)


def power_sum_general(n, k):
    """
    S_k(n) = phi(n) / phi(n/g) * mu(n/g) with g = gcd(k, n), for any n >= 1.

    Args:
        n (int): Positive integer.
        k (int): Positive exponent.

    Returns:
        int: The exact power sum.
    """
    if k < 1:
        raise ValueError(f"power sums need k >= 1, got {k}")
    cofactor = n // math.gcd(k, n)
    fibre, leftover = divmod(totient(n), totient(cofactor))
    if leftover:
        raise InexactDivisionError(n, k, leftover)
    return fibre * mobius(cofactor)


def power_sum_table(n, K):
    """Tabulate S_1(n) .. S_K(n) with the odd squarefree closed form."""
    _require_odd_squarefree(n)
    return PowerSumTable(n, tuple(power_sum(n, k) for k in range(1, K + 1)))


def _newton(n, K, sums):
    """sigma_0 = 1, k sigma_k = -(sigma_{k-1} S_1 + ... + sigma_0 S_k)."""
    sigma = [1]
    for k in range(1, K + 1):
        total = sum(sigma[k - i] * sums[i - 1] for i in range(1, k + 1))
        quotient, remainder = divmod(-total, k)
        if remainder:
            raise InexactDivisionError(n, k, remainder)
        sigma.append(quotient)
    return SigmaPrefix(n, tuple(sigma))


def sigma_prefix(n, K):
    """
    Leading coefficients sigma_0 .. sigma_K of Φ_n by Newton's identities.

    Args:
        n (int): Odd squarefree integer greater than 1.
        K (int): Prefix length, 0 <= K <= phi(n).

    Returns:
        SigmaPrefix: Exact sigma values; every division by k is checked.

    Raises:
        InexactDivisionError: If a division by k leaves a remainder.
    """
    _require_odd_squarefree(n)
    if not 0 <= K <= totient(n):
        raise ValueError(f"K must lie in [0, phi({n})], got {K}")
    return _newton(n, K, power_sum_table(n, K).values)


def sigma_prefix_general(n, K):
    """Same recursion as sigma_prefix, driven by power_sum_general for any n."""
    if not 0 <= K <= totient(n):
        raise ValueError(f"K must lie in [0, phi({n})], got {K}")
    sums = [power_sum_general(n, k) for k in range(1, K + 1)]
    return _newton(n, K, sums)


def sigma_closed_form(n, k):
    """
    Closed-form sigma_k(n) for odd squarefree n with t >= 3 odd, k < p1 + p2.

    The ladder is 1 below p1, 0 on [p1, p2), and from p2 on it drops by one
    at every further prime: -(i - 1) on [p_i, p_{i+1}) and -(r - 1) on
    [p_r, p1 + p2).

    Args:
        n (int): Odd squarefree integer with an odd number t >= 3 of primes.
        k (int): Index with 1 <= k < p1 + p2.

    Returns:
        int: sigma_k(n).

    Raises:
        ValueError: If n has the wrong shape or k is out of range.
    """
    profile = odd_squarefree_profile(n)
    if profile is None or profile.t < 3 or profile.t % 2 == 0:
        raise ValueError(f"closed form needs odd squarefree n with an odd t >= 3, got {n}")
    p1, p2 = profile.primes[0], profile.primes[1]
    if not 1 <= k < p1 + p2:
        raise ValueError(f"closed form covers 1 <= k < {p1 + p2}, got k={k}")
    if k < p1:
        return 1
    reached = sum(1 for p in profile.primes if p <= k)
    return -(reached - 1)


def _validate_prime_tuple(primes):
    primes = tuple(primes)
    if len(primes) < 3 or len(primes) % 2 == 0:
        raise ValueError(f"need an odd number (>= 3) of primes, got {len(primes)}")
    for p in primes:
        if isinstance(p, bool) or not isinstance(p, int):
            raise TypeError(f"primes must be integers, got {p!r}")
        if p < 3 or not is_prime(p):
            raise ValueError(f"{p} is not an odd prime")
    if any(a >= b for a, b in zip(primes, primes[1:])):
        raise ValueError(f"primes must be strictly ascending, got {primes}")
    return primes


def verify_theorem_main(primes):
    """
    Check that Φ_2n has every coefficient -(r-2), ..., r-1 (and 1-r if 1+p_r < p1+p2).

    Only sigma_0 .. sigma_{p1+p2-1} of Φ_n are computed. Since Φ_2n(x) =
    Φ_n(-x) and phi(n) is even, the coefficient of Φ_2n at x^(phi(n)-k) is
    (-1)^k sigma_k(n); Φ_2n itself is never built.

    Args:
        primes (list): Ascending distinct odd primes, odd count >= 3.

    Returns:
        TheoremMainReport: Witness exponents and the verdict.
    """
    primes = _validate_prime_tuple(primes)
    n = math.prod(primes)
    profile = odd_squarefree_profile(n)
    degree = totient(n)
    K = min(degree, primes[0] + primes[1] - 1)
    prefix = sigma_prefix(n, K)

    witness = {}
    for k, s in enumerate(prefix.sigma):
        value = s if k % 2 == 0 else -s
        witness.setdefault(value, degree - k)

    r = profile.r
    guaranteed = tuple(range(-(r - 2), r))
    extra_minus = 1 + primes[r - 1] < primes[0] + primes[1]
    required = guaranteed + ((1 - r,) if extra_minus else ())
    kept = {value: witness[value] for value in sorted(required) if value in witness}
    verified = len(kept) == len(required)
    if not verified:
        missing = sorted(set(required) - set(kept))
        logger.error(f"n={n}: values {missing} not found among the leading coefficients")
    return TheoremMainReport(
        n=n,
        primes=primes,
        t=profile.t,
        r=r,
        guaranteed=guaranteed,
        extra_minus=extra_minus,
        verified=verified,
        witness=kept,
    )
