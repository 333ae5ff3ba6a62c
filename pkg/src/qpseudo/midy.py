"""Midy's property, Midy sets, Midy numbers (overpseudoprimes) and base counts."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import config
from .arith import (
    divisors,
    euler_phi,
    factorize,
    is_prime,
    multiplicative_order,
    p_adic_valuation,
)
from .cyclotomic import cyclotomic_eval
from .errors import DomainError, NotADivisor, NotCoprime, OracleBoundExceeded


@dataclass(frozen=True)
class MidySet:
    modulus: int
    base: int
    order: int
    members: tuple[int, ...]

    def __contains__(self, d: object) -> bool:
        return d in self.members


@dataclass(frozen=True)
class BlockDecomposition:
    x: int
    digits: tuple[int, ...]
    block_length: int
    block_values: tuple[int, ...]
    block_sum: int


class MidyBaseCount(NamedTuple):
    by_order_equality: int
    by_full_definition: int


def _reduce_base(N: int, b: int) -> int:
    if N < 2:
        raise DomainError(f"modulus must be >= 2, got {N}")
    if b < 1:
        raise DomainError(f"base must be positive, got {b}")
    r = b % N
    if math.gcd(r, N) != 1:
        raise NotCoprime(f"gcd({b}, {N}) != 1")
    return r


def _order_and_block(N: int, b: int, d: int) -> tuple[int, int]:
    order = multiplicative_order(b, N)
    if d <= 1 or order % d:
        raise NotADivisor(f"{d} is not a divisor > 1 of |{b}|_{N} = {order}")
    return order, order // d


def has_midy_property(N: int, b: int, d: int) -> bool:
    """Decide ``d in M_b(N)`` from valuations.

    With ``k = |b|_N / d``, ``d`` qualifies iff ``v_p(N) <= v_p(d)`` for every
    prime ``p`` dividing ``gcd(b**k - 1, N)``.
    """
    b = _reduce_base(N, b)
    _, k = _order_and_block(N, b, d)
    g = math.gcd(pow(b, k, N) - 1, N)
    if g == 1:
        return True
    return all(p_adic_valuation(p, N) <= p_adic_valuation(p, d) for p, _ in factorize(g))


def _check_oracle_bound(N: int, order: int, bound: int | None) -> None:
    bound = bound or config.oracle_bound()
    if N > bound or order > bound:
        raise OracleBoundExceeded(f"N={N}, order={order} exceeds oracle bound {bound}")


def has_midy_property_oracle(N: int, b: int, d: int, bound: int | None = None) -> bool:
    """Decide ``d in M_b(N)`` by summing the period blocks of every ``x/N``.

    Block ``j`` of the period of ``x/N`` equals ``(r_{j-1} * b**k - r_j) / N``
    where ``r_j = x * b**(j*k) mod N`` are the long-division remainders; the
    sum over blocks is evaluated exactly, for all ``x`` in ``U_N`` at once.
    """
    b = _reduce_base(N, b)
    order, k = _order_and_block(N, b, d)
    _check_oracle_bound(N, order, bound)
    xs = np.array([x for x in range(1, N) if math.gcd(x, N) == 1], dtype=np.int64)
    step = pow(b, k, N)
    r = xs.copy()
    total = np.zeros_like(xs)
    for _ in range(d):
        total += r
        r = r * step % N
    assert np.array_equal(r, xs), "period did not close"
    big = b**k
    # sum_j (r_{j-1} * big - r_j) / N telescopes to (big - 1) * sum_j r_j / N
    for s in np.unique(total).tolist():
        block_sum, rem = divmod((big - 1) * s, N)
        assert rem == 0
        if block_sum % (big - 1):
            return False
    return True


def _digits(value: int, b: int, width: int) -> list[int]:
    if width <= 48:
        out = [0] * width
        for i in range(width - 1, -1, -1):
            value, out[i] = divmod(value, b)
        return out
    half = width // 2
    hi, lo = divmod(value, b**half)
    return _digits(hi, b, width - half) + _digits(lo, b, half)


def block_decomposition(N: int, b: int, d: int, x: int) -> BlockDecomposition:
    """Split the base-``b`` period of ``x/N`` into ``d`` blocks and sum them."""
    if b < 2:
        raise DomainError("block decomposition needs a numeration base b >= 2")
    _reduce_base(N, b)
    if not 1 <= x < N or math.gcd(x, N) != 1:
        raise DomainError(f"x={x} is not a unit modulo {N}")
    order, k = _order_and_block(N, b, d)
    period = x * (b**order - 1) // N
    digits = _digits(period, b, order)
    blocks = []
    for j in range(d):
        value = 0
        for a in digits[j * k : (j + 1) * k]:
            value = value * b + a
        blocks.append(value)
    return BlockDecomposition(
        x=x,
        digits=tuple(digits),
        block_length=k,
        block_values=tuple(blocks),
        block_sum=sum(blocks),
    )


def midy_set(N: int, b: int) -> MidySet:
    b = _reduce_base(N, b)
    order = multiplicative_order(b, N)
    members = tuple(d for d in divisors(order) if d > 1 and has_midy_property(N, b, d))
    return MidySet(modulus=N, base=b, order=order, members=members)


def prime_power_midy_check(N: int, b: int, q: int, v: int) -> bool:
    """Structural test for ``q**v in M_b(N)``.

    Holds iff ``v_q(N) <= v`` and every other prime ``p | N`` has
    ``v_q(|b|_p) > v_q(|b|_N) - v`` (which forces ``v_q(|b|_p) > 0``).
    """
    if not is_prime(q) or v < 1:
        raise DomainError(f"need a prime q and v >= 1, got q={q}, v={v}")
    b = _reduce_base(N, b)
    order = multiplicative_order(b, N)
    if order % q**v:
        raise NotADivisor(f"{q}^{v} does not divide |{b}|_{N} = {order}")
    fac = factorize(N)
    if fac.exponent(q) > v:
        return False
    slack = p_adic_valuation(q, order) - v
    others = [p for p in fac.primes if p != q]
    if not others:
        return True
    vals = [p_adic_valuation(q, multiplicative_order(b, p)) for p in others]
    return min(vals) > 0 and slack < min(vals)


def _odd_composite(N: int) -> bool:
    return N > 2 and N % 2 == 1 and not is_prime(N)


def is_midy_number(N: int, b: int) -> bool:
    """Overpseudoprime test: ``|b|_p == |b|_N`` for every prime ``p | N``."""
    b = _reduce_base(N, b)
    if not _odd_composite(N):
        return False
    order = multiplicative_order(b, N)
    if math.gcd(N, order) != 1:
        return False
    return all(multiplicative_order(b, p) == order for p in factorize(N).primes)


def is_midy_number_cyclotomic(N: int, b: int) -> bool:
    """Overpseudoprime test via ``Phi_{|b|_N}(b) = 0 (mod N)``."""
    b = _reduce_base(N, b)
    if not _odd_composite(N):
        raise DomainError(f"{N} is not an odd composite")
    order = multiplicative_order(b, N)
    if math.gcd(N, order) != 1:
        raise DomainError(f"gcd({N}, |{b}|_{N}) != 1")
    if b == 1:
        return True  # Phi_1(1) = 0
    return cyclotomic_eval(order, b) % N == 0


def is_midy_number_by_definition(N: int, b: int) -> bool:
    """Overpseudoprime test: every divisor ``d > 1`` of ``|b|_N`` lies in ``M_b(N)``."""
    b = _reduce_base(N, b)
    if not _odd_composite(N):
        return False
    ms = midy_set(N, b)
    if math.gcd(N, ms.order) != 1:
        return False
    return ms.members == tuple(d for d in divisors(ms.order) if d > 1)


def count_midy_bases(N: int) -> int:
    """Number of ``b in U_N`` making ``N`` a Midy number.

    ``sum over d | D of phi(d)**omega(N)`` with ``D = gcd(p - 1 : p | N)``.
    """
    if not _odd_composite(N):
        raise DomainError(f"{N} is not an odd composite")
    fac = factorize(N)
    D = math.gcd(*(p - 1 for p in fac.primes))
    return sum(euler_phi(d) ** fac.omega for d in divisors(D))


def count_midy_bases_brute(N: int, bound: int | None = None) -> MidyBaseCount:
    """Exhaustive tallies over ``U_N`` of both Midy-number criteria."""
    if not _odd_composite(N):
        raise DomainError(f"{N} is not an odd composite")
    bound = bound or config.oracle_bound()
    if N > bound:
        raise OracleBoundExceeded(f"N={N} exceeds oracle bound {bound}")
    primes = factorize(N).primes
    by_order = by_def = 0
    for b in range(1, N):
        if math.gcd(b, N) != 1:
            continue
        order = multiplicative_order(b, N)
        if all(multiplicative_order(b, p) == order for p in primes):
            by_order += 1
        if is_midy_number(N, b):
            by_def += 1
    return MidyBaseCount(by_order, by_def)
