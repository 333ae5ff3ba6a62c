"""Exact cyclotomic values and the Midy-number generator built on them."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from itertools import combinations

from .arith import factorize, is_prime
from .errors import DomainError, PostconditionViolated


class Verdict(str, enum.Enum):
    PRIME = "Prime"
    MIDY_NUMBER = "MidyNumber"
    UNIT = "Unit"


@dataclass(frozen=True)
class GeneratorOutcome:
    n: int
    base: int
    value: int
    verdict: Verdict


def cyclotomic_eval(n: int, b: int, budget: int | None = None) -> int:
    """Return ``Phi_n(b)`` exactly.

    Uses ``Phi_n(b) = prod_{d | n} (b**(n/d) - 1)**mu(d)``; only squarefree
    ``d`` contribute, so the product runs over subsets of the primes of ``n``.
    Terms with ``mu = +1`` go to the numerator, the rest to the denominator,
    and the single final division is checked to be exact.
    """
    if n < 1:
        raise DomainError(f"cyclotomic index must be >= 1, got {n}")
    if b < 2:
        raise DomainError(f"cyclotomic argument must be >= 2, got {b}")
    if n == 1:
        return b - 1
    primes = factorize(n, budget).primes
    num, den = 1, 1
    for k in range(len(primes) + 1):
        for subset in combinations(primes, k):
            term = b ** (n // math.prod(subset)) - 1
            if k % 2 == 0:
                num *= term
            else:
                den *= term
    value, rem = divmod(num, den)
    if rem:
        raise PostconditionViolated(f"inexact cyclotomic division for n={n}, b={b}")
    return value


def gcd_n_phi(n: int, b: int, budget: int | None = None) -> int:
    """``gcd(n, Phi_n(b))``, checked to be 1 or the largest prime factor of ``n``."""
    if n < 3 or b < 2:
        raise DomainError(f"gcd_n_phi requires n >= 3 and b >= 2, got n={n}, b={b}")
    return _checked_gcd(n, cyclotomic_eval(n, b, budget), budget)


def _checked_gcd(n: int, phi: int, budget: int | None) -> int:
    g = math.gcd(n, phi)
    if g != 1 and g != factorize(n, budget).primes[-1]:
        raise PostconditionViolated(
            f"gcd({n}, Phi_{n}(b)) = {g} is neither 1 nor the largest prime of {n}"
        )
    return g


def midy_generator(n: int, b: int, budget: int | None = None) -> GeneratorOutcome:
    """``Phi_n(b) / gcd(n, Phi_n(b))`` with its primality verdict.

    A composite value is a Midy number to base ``b``.
    """
    if n <= 2:
        raise DomainError(f"generator requires n > 2, got {n}")
    phi = cyclotomic_eval(n, b, budget)
    value = phi // _checked_gcd(n, phi, budget)
    if value <= 1:
        verdict = Verdict.UNIT
    elif is_prime(value):
        verdict = Verdict.PRIME
    else:
        verdict = Verdict.MIDY_NUMBER
    return GeneratorOutcome(n=n, base=b, value=value, verdict=verdict)
