"""Integer kernel: primality, factorization, orders, valuations, totient, CRT.

All integers are plain Python ``int``; every function is pure.  The only
cache (on factorizations) is keyed by value and immutable, so concurrent
callers observe identical results.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from functools import lru_cache, reduce
from typing import Iterable, Iterator, Sequence

from . import config
from .errors import DomainError, FactorizationBudgetExceeded, ModuliNotCoprime, NotCoprime

TRIAL_DIVISION_LIMIT = 10**6

# Witnesses 2..41 decide primality for every n below this bound
# (Sorenson & Webster, 2015), which covers all of the 64-bit range.
DETERMINISTIC_LIMIT = 3_317_044_064_679_887_385_961_981
_DETERMINISTIC_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)
PROBABILISTIC_ROUNDS = 40


def _sieve(limit: int) -> tuple[int, ...]:
    flags = bytearray([1]) * (limit + 1)
    flags[0:2] = b"\x00\x00"
    for i in range(2, math.isqrt(limit) + 1):
        if flags[i]:
            flags[i * i :: i] = bytes(len(range(i * i, limit + 1, i)))
    return tuple(i for i, f in enumerate(flags) if f)


_SMALL_PRIMES = _sieve(TRIAL_DIVISION_LIMIT)
_SMALL_PRIME_SET = frozenset(p for p in _SMALL_PRIMES if p < 1000)


def primes_below(limit: int) -> tuple[int, ...]:
    """All primes ``p < limit``."""
    if limit <= TRIAL_DIVISION_LIMIT + 1:
        import bisect

        return _SMALL_PRIMES[: bisect.bisect_left(_SMALL_PRIMES, limit)]
    return _sieve(limit - 1)


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
    """Primality test.

    Deterministic for ``n < DETERMINISTIC_LIMIT`` (about 3.3e24).  Larger
    inputs additionally run ``PROBABILISTIC_ROUNDS`` strong-probable-prime
    rounds with bases drawn from a generator seeded by ``n`` itself, so the
    verdict is reproducible; a composite survives with probability below
    ``4**-40``.
    """
    if n < 2:
        return False
    if n < 1000:
        return n in _SMALL_PRIME_SET
    for p in _SMALL_PRIMES[:60]:
        if n % p == 0:
            return False
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _DETERMINISTIC_WITNESSES:
        if not _is_sprp(n, a, d, s):
            return False
    if n < DETERMINISTIC_LIMIT:
        return True
    rng = random.Random(n)
    for _ in range(PROBABILISTIC_ROUNDS):
        if not _is_sprp(n, rng.randrange(2, n - 1), d, s):
            return False
    return True


@dataclass(frozen=True)
class Factorization:
    """Prime factorization as ascending ``(prime, exponent)`` pairs."""

    factors: tuple[tuple[int, int], ...]

    def __iter__(self) -> Iterator[tuple[int, int]]:
        return iter(self.factors)

    def __len__(self) -> int:
        return len(self.factors)

    @property
    def value(self) -> int:
        return math.prod(p**e for p, e in self.factors)

    @property
    def primes(self) -> tuple[int, ...]:
        return tuple(p for p, _ in self.factors)

    @property
    def omega(self) -> int:
        return len(self.factors)

    @property
    def is_squarefree(self) -> bool:
        return all(e == 1 for _, e in self.factors)

    def exponent(self, p: int) -> int:
        for q, e in self.factors:
            if q == p:
                return e
        return 0

    def as_dict(self) -> dict[int, int]:
        return dict(self.factors)


def _brent(n: int, c: int, budget: int) -> int:
    """Pollard's rho with Brent's cycle detection; returns a factor or ``n``."""
    y, r, q, g = 2, 1, 1, 1
    m = 128
    used = 0
    x = ys = y
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
        used += r
        if used > budget:
            raise FactorizationBudgetExceeded(n, budget)
        r *= 2
    if g == n:
        while True:
            ys = (ys * ys + c) % n
            g = math.gcd(abs(x - ys), n)
            if g > 1:
                break
    return g


def _split(n: int, budget: int, out: dict[int, int]) -> None:
    if is_prime(n):
        out[n] = out.get(n, 0) + 1
        return
    r = math.isqrt(n)
    if r * r == n:
        _split(r, budget, out)
        _split(r, budget, out)
        return
    for c in range(1, 64):
        g = _brent(n, c, budget)
        if g != n:
            _split(g, budget, out)
            _split(n // g, budget, out)
            return
    raise FactorizationBudgetExceeded(n, budget)


@lru_cache(maxsize=65536)
def _factor_cached(n: int, budget: int) -> tuple[tuple[int, int], ...]:
    out: dict[int, int] = {}
    m = n
    for p in _SMALL_PRIMES:
        if p * p > m:
            break
        if m % p == 0:
            e = 0
            while m % p == 0:
                m //= p
                e += 1
            out[p] = e
    if m > 1:
        if m < TRIAL_DIVISION_LIMIT**2:
            out[m] = out.get(m, 0) + 1
        else:
            _split(m, budget, out)
    return tuple(sorted(out.items()))


def factorize(n: int, budget: int | None = None) -> Factorization:
    """Factor ``n >= 2``.

    Trial division by primes below 10**6, then Pollard-Brent rho.  ``budget``
    caps the rho iterations (default from ``MIDY_FACTOR_BUDGET``); exceeding
    it raises :class:`FactorizationBudgetExceeded`.
    """
    if n < 2:
        raise DomainError(f"factorize requires n >= 2, got {n}")
    return Factorization(_factor_cached(n, budget or config.factor_budget()))


def mod_pow(b: int, e: int, n: int) -> int:
    if n < 1:
        raise DomainError("modulus must be positive")
    return pow(b, e, n)


def p_adic_valuation(p: int, n: int) -> int:
    if n < 1 or p < 2:
        raise DomainError(f"valuation needs p >= 2 and n >= 1, got p={p}, n={n}")
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def _order_mod_prime_power(b: int, p: int, e: int, budget: int | None) -> int:
    order = p - 1
    if order > 1:
        for r, _ in factorize(order, budget):
            while order % r == 0 and pow(b, order // r, p) == 1:
                order //= r
    # lift: the order modulo p**e is order * p**j for the least j that works
    if e > 1:
        pe = p**e
        x = pow(b, order, pe)
        while x != 1:
            x = pow(x, p, pe)
            order *= p
    return order


def multiplicative_order(b: int, n: int, budget: int | None = None) -> int:
    """Least ``e >= 1`` with ``b**e = 1 (mod n)``; 1 when ``n == 1``."""
    if n < 1:
        raise DomainError("modulus must be positive")
    if n == 1:
        return 1
    b %= n
    if math.gcd(b, n) != 1:
        raise NotCoprime(f"gcd({b}, {n}) != 1")
    if b == 1:
        return 1
    order = 1
    for p, e in factorize(n, budget):
        bb = b % p**e
        o = _order_mod_prime_power(bb, p, e, budget)
        order = math.lcm(order, o)
    return order


def euler_phi(n: int, budget: int | None = None) -> int:
    if n < 1:
        raise DomainError("euler_phi requires n >= 1")
    if n == 1:
        return 1
    return math.prod((p - 1) * p ** (e - 1) for p, e in factorize(n, budget))


def carmichael_lambda(n: int, budget: int | None = None) -> int:
    """Exponent of the unit group modulo ``n``."""
    if n < 1:
        raise DomainError("carmichael_lambda requires n >= 1")
    if n == 1:
        return 1
    parts = []
    for p, e in factorize(n, budget):
        if p == 2 and e >= 3:
            parts.append(2 ** (e - 2))
        else:
            parts.append((p - 1) * p ** (e - 1))
    return reduce(math.lcm, parts, 1)


def moebius(n: int, budget: int | None = None) -> int:
    if n < 1:
        raise DomainError("moebius requires n >= 1")
    if n == 1:
        return 1
    f = factorize(n, budget)
    if not f.is_squarefree:
        return 0
    return -1 if f.omega % 2 else 1


def omega(n: int, budget: int | None = None) -> int:
    return 0 if n == 1 else factorize(n, budget).omega


def divisors(n: int, budget: int | None = None) -> list[int]:
    """All positive divisors of ``n``, ascending."""
    if n < 1:
        raise DomainError("divisors requires n >= 1")
    divs = [1]
    if n > 1:
        for p, e in factorize(n, budget):
            divs = [d * p**k for d in divs for k in range(e + 1)]
    return sorted(divs)


def crt_combine(residues: Sequence[tuple[int, int]] | Iterable[tuple[int, int]]) -> int:
    """Solve ``x = r_i (mod m_i)`` for pairwise coprime moduli."""
    x, m = 0, 1
    for r, mi in residues:
        if mi < 1:
            raise DomainError("moduli must be positive")
        if math.gcd(m, mi) != 1:
            raise ModuliNotCoprime(f"modulus {mi} shares a factor with {m}")
        # x + m*k = r (mod mi)
        k = (r - x) * pow(m, -1, mi) % mi if mi > 1 else 0
        x += m * k
        m *= mi
    return x % m
