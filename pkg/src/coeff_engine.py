"""
Exact coefficient vectors of cyclotomic polynomials.

Two algorithmically independent engines are provided:

- ``phi_poly_series`` expands the Möbius product of (1 - x^d) factors as a
  truncated power series over the radical of n, mirrors the lower half by
  palindromy and inflates exponents back to n. It runs on a checked int64
  fast path and escalates to Python integers (or raises) before any value
  could wrap around.
- ``phi_poly_division`` divides x^n - 1 by the product of all lower
  cyclotomic polynomials, memoizing each one. It is a reference oracle.
"""

import logging
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations

import numpy as np

from errors import CoefficientOverflowError, EngineConsistencyError
from numthy import factorize, totient, divisors

logger = logging.getLogger(__name__)

ENGINE_VERSION = "cyclophi-series-1"
ENGINES = ("series", "division", "auto")
OVERFLOW_POLICIES = ("escalate", "raise")
# Largest n for which engine="auto" cross-checks against the division engine
AUTO_CROSSCHECK_LIMIT = 1000
DIVISION_CACHE_SIZE = 4096

_INT64_MAX = int(np.iinfo(np.int64).max)


@dataclass(frozen=True)
class CoeffVec:
    """Coefficients of Φ_n indexed by exponent; coeffs[j] multiplies x^j."""

    n: int
    coeffs: tuple

    def __post_init__(self):
        if len(self.coeffs) != totient(self.n) + 1:
            raise ValueError(
                f"Φ_{self.n} needs {totient(self.n) + 1} coefficients, got {len(self.coeffs)}"
            )
        if self.coeffs[-1] != 1:
            raise ValueError(f"Φ_{self.n} must be monic")

    @property
    def degree(self):
        return len(self.coeffs) - 1

    @property
    def height(self):
        """Largest absolute coefficient."""
        return max(abs(c) for c in self.coeffs)

    def evaluate(self, x):
        """Evaluate at x in {-1, 0, 1}; the only points this toolkit needs."""
        if x not in (-1, 0, 1):
            raise ValueError(f"evaluation is only supported at -1, 0, 1, got {x}")
        if x == 0:
            return self.coeffs[0]
        if x == 1:
            return sum(self.coeffs)
        return sum(c if j % 2 == 0 else -c for j, c in enumerate(self.coeffs))

    def is_palindromic(self):
        return self.coeffs == self.coeffs[::-1]

    def nontrivial_values(self):
        """Distinct coefficient values outside {-1, 0, 1}, ascending."""
        return [c for c in coefficient_value_set(self) if abs(c) >= 2]


def _check_index(n):
    if isinstance(n, bool) or not isinstance(n, int):
        raise TypeError(f"cyclotomic index must be an integer, got {n!r}")
    if n < 1:
        raise ValueError(f"cyclotomic index must be positive, got {n}")


def inflate_exponents(v, stretch):
    """
    Substitute x -> x^stretch into Φ_m.

    For stretch composed of primes dividing m this yields Φ_{m * stretch}.

    Args:
        v (CoeffVec): Coefficients of Φ_m.
        stretch (int): Positive exponent multiplier.

    Returns:
        CoeffVec: Coefficients of Φ_{m * stretch}.
    """
    if stretch == 1:
        return v
    coeffs = [0] * (v.degree * stretch + 1)
    for j, c in enumerate(v.coeffs):
        coeffs[j * stretch] = c
    return CoeffVec(v.n * stretch, tuple(coeffs))


class _SeriesBuffer:
    """Truncated power series with a checked int64 fast path."""

    def __init__(self, n, length, overflow):
        self.n = n
        self.length = length
        self.overflow = overflow
        self.values = np.zeros(length, dtype=np.int64)
        self.values[0] = 1

    @property
    def exact(self):
        return self.values.dtype == object

    def _ensure_room(self, growth, operation):
        """Escalate or raise unless max|a| * growth fits in int64."""
        if self.exact:
            return
        peak = int(np.abs(self.values).max())
        if peak * growth <= _INT64_MAX:
            return
        if self.overflow == "raise":
            raise CoefficientOverflowError(self.n, f"{operation}, peak {peak}")
        logger.debug(f"n={self.n}: escalating to exact integers before {operation}")
        self.values = self.values.astype(object)

    def multiply_one_minus(self, d):
        """a(x) <- a(x) * (1 - x^d)"""
        self._ensure_room(2, f"multiply by 1-x^{d}")
        a = self.values
        a[d:] = a[d:] - a[:-d]

    def divide_one_minus(self, d):
        """a(x) <- a(x) / (1 - x^d), i.e. a[i] += a[i-d] in ascending order."""
        terms = -(-self.length // d)
        self._ensure_room(terms, f"divide by 1-x^{d}")
        a = self.values
        if d * d <= self.length:
            for residue in range(d):
                a[residue::d] = np.cumsum(a[residue::d])
        else:
            for start in range(d, self.length, d):
                stop = min(start + d, self.length)
                a[start:stop] += a[start - d:stop - d]


def _squarefree_series(n, overflow):
    """Φ_n for squarefree n > 1 via the truncated Möbius product."""
    primes = factorize(n).primes
    degree = totient(n)
    half = degree // 2
    # One coefficient beyond the lower half, used as a mirror self-check
    length = min(degree + 1, (degree + 2) // 2 + 1)

    multiply, divide = [], []
    t = len(primes)
    for size in range(t + 1):
        # Φ_n = prod over d | n of (1 - x^d)^mu(n/d); mu(n/d) = (-1)^(t - size)
        target = multiply if (t - size) % 2 == 0 else divide
        for subset in combinations(primes, size):
            d = 1
            for p in subset:
                d *= p
            if d < length:
                target.append(d)

    buffer = _SeriesBuffer(n, length, overflow)
    # Multiplying first keeps every intermediate a polynomial with small coefficients
    for d in sorted(multiply):
        buffer.multiply_one_minus(d)
    for d in sorted(divide):
        buffer.divide_one_minus(d)

    a = buffer.values
    if a[0] != 1:
        raise EngineConsistencyError(n, f"constant term {a[0]} instead of 1")
    if half + 1 < length and a[half + 1] != a[degree - half - 1]:
        raise EngineConsistencyError(n, "lower half is not palindromic")

    coeffs = tuple(int(a[j]) if j <= half else int(a[degree - j]) for j in range(degree + 1))
    return CoeffVec(n, coeffs)


def phi_poly_series(n, overflow="escalate"):
    """
    Coefficients of Φ_n from the truncated Möbius product.

    Args:
        n (int): Positive index.
        overflow (str): 'escalate' switches to exact Python integers when the
            int64 fast path could overflow; 'raise' raises instead.

    Returns:
        CoeffVec: Exact coefficients of Φ_n.

    Raises:
        ValueError: If n < 1 or the overflow policy is unknown.
        CoefficientOverflowError: With overflow='raise' when int64 is too narrow.
    """
    _check_index(n)
    if overflow not in OVERFLOW_POLICIES:
        raise ValueError(f"unknown overflow policy {overflow!r}")
    if n == 1:
        return CoeffVec(1, (-1, 1))
    rad = factorize(n).radical
    base = _squarefree_series(rad, overflow)
    return inflate_exponents(base, n // rad)


def _convolve_checked(a, b):
    """Exact product of two int64 coefficient arrays."""
    bound = int(np.abs(a).sum()) * int(np.abs(b).max())
    if a.dtype != object and b.dtype != object and bound <= _INT64_MAX:
        return np.convolve(a, b)
    product = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a.tolist()):
        if x:
            for j, y in enumerate(b.tolist()):
                product[i + j] += x * y
    return np.array(product, dtype=object)


@lru_cache(maxsize=DIVISION_CACHE_SIZE)
def _division_coeffs(n):
    if n == 1:
        return (-1, 1)

    denominator = np.ones(1, dtype=np.int64)
    for d in divisors(n)[:-1]:
        denominator = _convolve_checked(denominator, np.array(_division_coeffs(d), dtype=np.int64))

    # Long division of x^n - 1 by the monic denominator
    low = len(denominator) - 1
    remainder = np.zeros(n + 1, dtype=denominator.dtype)
    remainder[0] = -1
    remainder[n] = 1
    quotient = [0] * (n - low + 1)
    peak = int(np.abs(denominator).max())
    bound = 1
    for i in range(n - low, -1, -1):
        q = int(remainder[i + low])
        if q == 0:
            continue
        bound += abs(q) * peak
        if bound > _INT64_MAX and remainder.dtype != object:
            remainder = remainder.astype(object)
            denominator = denominator.astype(object)
        quotient[i] = q
        remainder[i:i + low + 1] -= q * denominator

    if any(remainder[:low]):
        raise EngineConsistencyError(n, "x^n - 1 is not divisible by the lower factors")
    return tuple(quotient)


def phi_poly_division(n):
    """
    Coefficients of Φ_n by inductive long division.

    Φ_n is the quotient of x^n - 1 by the product of Φ_d over the proper
    divisors d of n. Every Φ_d is memoized in a bounded LRU cache; the cache
    itself is thread-safe, though concurrent callers may duplicate work.

    Args:
        n (int): Positive index, practical up to about 10^4.

    Returns:
        CoeffVec: Exact coefficients of Φ_n.
    """
    _check_index(n)
    return CoeffVec(n, _division_coeffs(n))


def phi_poly_negate_odd(v):
    """
    Φ_2n(x) = Φ_n(-x) for odd n > 1.

    Args:
        v (CoeffVec): Coefficients of Φ_n with n odd and n > 1.

    Returns:
        CoeffVec: Coefficients of Φ_2n.

    Raises:
        ValueError: If v.n is even or 1.
    """
    if v.n % 2 == 0 or v.n == 1:
        raise ValueError(f"Φ_2n(x) = Φ_n(-x) needs an odd index n > 1, got {v.n}")
    coeffs = tuple(c if j % 2 == 0 else -c for j, c in enumerate(v.coeffs))
    return CoeffVec(2 * v.n, coeffs)


def coefficient_value_set(v):
    """Sorted distinct coefficient values of v."""
    return sorted(set(v.coeffs))


def phi_poly(n, engine="series", overflow="escalate"):
    """
    Dispatch to an engine by name.

    Args:
        n (int): Positive index.
        engine (str): 'series', 'division' or 'auto'. 'auto' uses the series
            engine and cross-checks against division for small n.
        overflow (str): Series engine overflow policy.

    Returns:
        CoeffVec: Exact coefficients of Φ_n.
    """
    if engine not in ENGINES:
        raise ValueError(f"unknown engine {engine!r}; choose from {', '.join(ENGINES)}")
    if engine == "division":
        return phi_poly_division(n)
    result = phi_poly_series(n, overflow=overflow)
    if engine == "auto" and n <= AUTO_CROSSCHECK_LIMIT:
        if phi_poly_division(n) != result:
            raise EngineConsistencyError(n, "series and division engines disagree")
        logger.debug(f"n={n}: series result confirmed by division engine")
    return result
