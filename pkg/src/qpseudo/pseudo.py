"""Fermat, strong, Carmichael and q-pseudoprimality with exact base counts."""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

from . import config
from .arith import Factorization, factorize, is_prime, multiplicative_order, p_adic_valuation
from .errors import (
    DomainError,
    HypothesisViolated,
    NotCoprime,
    OracleBoundExceeded,
    PostconditionViolated,
)
from .midy import is_midy_number

PREDICATES = ("fermat", "strong", "q_probable", "midy_order_equality")


class QDecomposition(NamedTuple):
    q: int
    s: int
    t: int


class QTestResult(NamedTuple):
    result: bool
    witness_i: int | None


class QResult(NamedTuple):
    q: int
    q_probable_prime: bool
    witness_i: int | None


@dataclass(frozen=True)
class Classification:
    n: int
    base: int
    is_probable_prime: bool
    fermat_psp: bool
    strong_psp: bool
    midy_number: bool
    carmichael: bool
    q_results: tuple[QResult, ...] = ()
    factorization: Factorization | None = field(default=None, compare=False)


def _require_coprime(N: int, b: int) -> None:
    if math.gcd(b, N) != 1:
        raise NotCoprime(f"gcd({b}, {N}) != 1")


def _require_odd(N: int) -> None:
    if N < 3 or N % 2 == 0:
        raise DomainError(f"{N} is not an odd integer >= 3")


def _composite(N: int) -> bool:
    return N > 3 and not is_prime(N)


def miller_condition(N: int, b: int) -> bool:
    """Strong probable-prime condition: ``b**t = 1`` or some ``b**(2**i t) = -1``."""
    _require_odd(N)
    _require_coprime(N, b)
    s, t = q_decompose(N, 2)[1:]
    x = pow(b, t, N)
    if x == 1 or x == N - 1:
        return True
    for _ in range(s - 1):
        x = x * x % N
        if x == N - 1:
            return True
    return False


def is_fermat_psp(N: int, b: int) -> bool:
    _require_coprime(N, b)
    return _composite(N) and pow(b, N - 1, N) == 1


def is_strong_psp(N: int, b: int) -> bool:
    return miller_condition(N, b) and _composite(N)


def strong_psp_via_valuation(N: int, b: int) -> bool:
    """Strong pseudoprimality as Fermat plus a uniform ``v_2(|b|_p)`` over ``p | N``."""
    _require_odd(N)
    if not is_fermat_psp(N, b):
        return False
    vals = {p_adic_valuation(2, multiplicative_order(b, p)) for p in factorize(N).primes}
    return len(vals) == 1


def is_carmichael(N: int) -> bool:
    """Korselt: composite, squarefree, and ``p - 1 | N - 1`` for every ``p | N``."""
    if N < 3:
        raise DomainError(f"is_carmichael requires N >= 3, got {N}")
    if not _composite(N):
        return False
    fac = factorize(N)
    return fac.is_squarefree and all((N - 1) % (p - 1) == 0 for p in fac.primes)


def _gcd_p_minus_1(N: int) -> int:
    return math.gcd(*(p - 1 for p in factorize(N).primes))


def eligible_q(N: int) -> tuple[int, ...]:
    """Primes ``q`` dividing ``p - 1`` for every prime ``p | N``, ascending."""
    _require_odd(N)
    return factorize(_gcd_p_minus_1(N)).primes


def nu_q_of(q: int, N: int) -> int:
    """``v_q(gcd(p - 1 : p | N))``."""
    if not is_prime(q):
        raise DomainError(f"{q} is not prime")
    return p_adic_valuation(q, _gcd_p_minus_1(N))


def q_decompose(N: int, q: int) -> QDecomposition:
    """Write ``N - 1 = q**s * t`` with ``q`` not dividing ``t``."""
    if N < 2 or (N - 1) % q:
        raise DomainError(f"{q} does not divide {N} - 1")
    s = p_adic_valuation(q, N - 1)
    return QDecomposition(q, s, (N - 1) // q**s)


def _check_q_hypothesis(N: int, q: int) -> None:
    bad = [p for p in factorize(N).primes if (p - 1) % q]
    if bad:
        raise HypothesisViolated(f"{q} does not divide p - 1 for p in {bad}")


def phi_q_mod(x: int, q: int, N: int) -> int:
    """``(1 + x + ... + x**(q-1)) mod N`` in ``O(log q)`` multiplications.

    Evaluates ``(x**q - 1) / (x - 1)`` modulo ``N * (x - 1)``, where the
    division is exact.
    """
    x %= N
    if x == 1:
        return q % N
    if x == 0:
        return 1 % N
    m = N * (x - 1)
    return ((pow(x, q, m) - 1) % m) // (x - 1) % N


def is_q_probable_prime(N: int, b: int, q: int, check_hypothesis: bool = True) -> QTestResult:
    """Miller-style q-probable-prime test.

    With ``N - 1 = q**s t``, passes when ``b**t = 1 (mod N)`` (``witness_i``
    is ``None``) or when ``N`` divides ``Phi_q(b**(q**i t))`` for some
    ``0 <= i < s`` (``witness_i = i``).  ``check_hypothesis`` enforces that
    ``q | p - 1`` for every prime ``p | N``; skipping it gives the looser
    semantics under which Carmichael-like collapses occur.
    """
    _require_odd(N)
    if not is_prime(q):
        raise DomainError(f"{q} is not prime")
    _, s, t = q_decompose(N, q)
    if check_hypothesis:
        _check_q_hypothesis(N, q)
    _require_coprime(N, b)
    x = pow(b, t, N)
    if x == 1:
        return QTestResult(True, None)
    for i in range(s):
        if phi_q_mod(x, q, N) == 0:
            return QTestResult(True, i)
        x = pow(x, q, N)
    return QTestResult(False, None)


def is_q_pseudoprime_def(N: int, b: int, q: int) -> bool:
    """Definition form: ``v_q(|b|_p)`` is the same for every prime ``p | N``.

    Bases failing ``b**(N-1) = 1 (mod N)`` are outside the definition and give
    ``False``; a prime ``N`` is never a pseudoprime.
    """
    _require_odd(N)
    if not is_prime(q):
        raise DomainError(f"{q} is not prime")
    _check_q_hypothesis(N, q)
    _require_coprime(N, b)
    if not _composite(N) or pow(b, N - 1, N) != 1:
        return False
    vals = {p_adic_valuation(q, multiplicative_order(b, p)) for p in factorize(N).primes}
    return len(vals) == 1


def q_divisor_congruence(N: int, b: int, q: int) -> int | None:
    """``q**(i+1)`` when the second test condition fires with witness ``i``.

    Every prime divisor of ``N`` is then ``1 mod q**(i+1)``; a counterexample
    raises :class:`PostconditionViolated`.
    """
    res = is_q_probable_prime(N, b, q, check_hypothesis=True)
    if res.witness_i is None:
        return None
    m = q ** (res.witness_i + 1)
    bad = [p for p in factorize(N).primes if p % m != 1]
    if bad:
        raise PostconditionViolated(f"primes {bad} of {N} are not 1 mod {m}")
    return m


def seeded_bases(N: int, count: int, seed: int = 0) -> list[int]:
    """``count`` reproducible pseudorandom bases in ``U_N`` (repeats allowed)."""
    rng = random.Random(seed)
    out: list[int] = []
    while len(out) < count:
        b = rng.randrange(2, N - 1) if N > 3 else 1
        if math.gcd(b, N) == 1:
            out.append(b)
    return out


def carmichael_collapse_check(
    N: int, q: int, sample: Sequence[int] | None = None, bound: int | None = None
) -> bool:
    """Check ``b**t = 1 (mod N)`` for a Carmichael ``N`` and a prime ``q`` foreign to every ``p - 1``.

    ``N - 1 = q**s t``.  With an empty ``sample`` every ``b in U_N`` is tried,
    which requires ``N`` below the oracle bound.
    """
    if not is_prime(q):
        raise HypothesisViolated(f"{q} is not prime")
    if not is_carmichael(N):
        raise HypothesisViolated(f"{N} is not a Carmichael number")
    if (N - 1) % q:
        raise HypothesisViolated(f"{q} does not divide {N} - 1")
    bad = [p for p in factorize(N).primes if (p - 1) % q == 0]
    if bad:
        raise HypothesisViolated(f"{q} divides p - 1 for p in {bad}")
    t = q_decompose(N, q).t
    if not sample:
        bound = bound or config.oracle_bound()
        if N > bound:
            raise OracleBoundExceeded(f"N={N} exceeds oracle bound {bound}; pass a sample")
        sample = [b for b in range(1, N) if math.gcd(b, N) == 1]
    for b in sample:
        _require_coprime(N, b)
        if pow(b, t, N) != 1:
            return False
    return True


def count_pp_bases(N: int) -> int:
    """``prod over p | N of gcd(p - 1, N - 1)``."""
    if not _composite(N):
        raise DomainError(f"{N} is not composite")
    return math.prod(math.gcd(p - 1, N - 1) for p in factorize(N).primes)


def count_spp_bases(N: int) -> int:
    _require_odd(N)
    if not _composite(N):
        raise DomainError(f"{N} is not composite")
    return count_qpp_bases(N, 2)


def count_qpp_bases(N: int, q: int) -> int:
    """Number of ``b in U_N`` for which ``N`` is a q-probable prime."""
    _require_odd(N)
    if not is_prime(q):
        raise DomainError(f"{q} is not prime")
    _check_q_hypothesis(N, q)
    fac = factorize(N)
    w = fac.omega
    t = q_decompose(N, q).t
    nu = nu_q_of(q, N)
    geometric = (q ** (nu * w) - 1) // (q**w - 1)
    return (1 + (q - 1) ** w * geometric) * math.prod(math.gcd(p - 1, t) for p in fac.primes)


def _midy_order_equality(N: int, b: int) -> bool:
    order = multiplicative_order(b, N)
    return all(multiplicative_order(b, p) == order for p in factorize(N).primes)


def count_bases_brute(
    N: int,
    predicate: str,
    q: int | None = None,
    bound: int | None = None,
    engine: str = "auto",
) -> int:
    """Count ``b in U_N`` satisfying ``predicate`` by exhaustion.

    ``engine="python"`` calls the test functions of this module once per
    base; ``"kernel"`` uses the vectorized kernels (numba or numpy);
    ``"auto"`` picks the kernel whenever ``N`` fits machine words.
    """
    if predicate not in PREDICATES:
        raise DomainError(f"unknown predicate {predicate!r}; expected one of {PREDICATES}")
    if predicate == "q_probable" and q is None:
        raise DomainError("q_probable needs q")
    bound = bound or config.oracle_bound()
    if N > bound:
        raise OracleBoundExceeded(f"N={N} exceeds oracle bound {bound}")
    if predicate != "fermat":
        _require_odd(N)
    if predicate == "q_probable":
        q_decompose(N, q)
    from . import kernels

    if engine == "kernel" or (engine == "auto" and N <= kernels.MAX_MODULUS):
        return kernels.count_bases(N, predicate, q or 0)
    if engine not in ("python", "auto"):
        raise DomainError(f"unknown engine {engine!r}")

    if predicate == "fermat":
        test = lambda b: pow(b, N - 1, N) == 1  # noqa: E731
    elif predicate == "strong":
        test = lambda b: miller_condition(N, b)  # noqa: E731
    elif predicate == "q_probable":
        test = lambda b: is_q_probable_prime(N, b, q, check_hypothesis=False).result  # noqa: E731
    else:
        test = lambda b: _midy_order_equality(N, b)  # noqa: E731
    return sum(1 for b in range(1, N) if math.gcd(b, N) == 1 and test(b))


def classify(n: int, base: int, q_list: Sequence[int] | None = None) -> Classification:
    """Every pseudoprimality flag of ``n`` to ``base``."""
    _require_odd(n)
    _require_coprime(n, base)
    prime = is_prime(n)
    fac = factorize(n)
    qs = tuple(q_list) if q_list else eligible_q(n)
    q_results = []
    for q in qs:
        res = is_q_probable_prime(n, base, q, check_hypothesis=True)
        q_results.append(QResult(q, res.result, res.witness_i))
    return Classification(
        n=n,
        base=base,
        is_probable_prime=prime,
        fermat_psp=is_fermat_psp(n, base),
        strong_psp=is_strong_psp(n, base),
        midy_number=is_midy_number(n, base),
        carmichael=is_carmichael(n),
        q_results=tuple(q_results),
        factorization=fac,
    )
