"""Machine-word kernels for exhaustive base counts and census prefilters.

Every kernel has two implementations with identical results: an explicit
loop compiled with numba ``@njit`` and a vectorized numpy version.  The
numba path is used when numba imports and ``MIDY_NUMBA`` is not ``0``.
Moduli are limited to ``MAX_MODULUS`` so every product of two residues fits
in a signed 64-bit integer.
"""

from __future__ import annotations

import contextlib
import os
from typing import Iterator

import numpy as np

from .arith import carmichael_lambda, factorize

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        if len(args) == 1 and callable(args[0]):
            return args[0]
        return lambda f: f


MAX_MODULUS = 3_037_000_499  # floor(sqrt(2**63 - 1))

_backend = "numba" if HAVE_NUMBA and os.environ.get("MIDY_NUMBA", "1") != "0" else "numpy"


def backend() -> str:
    return _backend


def set_backend(name: str) -> None:
    global _backend
    if name not in ("numba", "numpy"):
        raise ValueError(f"unknown backend {name!r}")
    if name == "numba" and not HAVE_NUMBA:
        raise RuntimeError("numba is not installed")
    _backend = name


@contextlib.contextmanager
def use_backend(name: str) -> Iterator[None]:
    previous = _backend
    set_backend(name)
    try:
        yield
    finally:
        set_backend(previous)


# ---------------------------------------------------------------- numba loops


@njit(cache=True)
def _nb_powmod(b, e, m):
    result = 1 % m
    b %= m
    while e > 0:
        if e & 1:
            result = result * b % m
        b = b * b % m
        e >>= 1
    return result


@njit(cache=True)
def _nb_powmod_flat(b, e, m, out):
    for i in range(b.shape[0]):
        out[i] = _nb_powmod(b[i], e[i], m[i])


@njit(cache=True)
def _nb_gcd(a, b):
    while b:
        a, b = b, a % b
    return a


@njit(cache=True)
def _nb_order(b, m, lam, primes):
    e = lam
    for r in primes:
        while e % r == 0 and _nb_powmod(b, e // r, m) == 1:
            e //= r
    return e


@njit(cache=True)
def _nb_miller(b, n, s, t):
    x = _nb_powmod(b, t, n)
    if x == 1 or x == n - 1:
        return True
    for _ in range(s - 1):
        x = x * x % n
        if x == n - 1:
            return True
    return False


@njit(cache=True)
def _nb_phi_q(x, q, n):
    acc = 1 % n
    for _ in range(q - 1):
        acc = (acc * x + 1) % n
    return acc


@njit(cache=True)
def _nb_count_fermat(n):
    count = 0
    for b in range(1, n):
        if _nb_gcd(b, n) == 1 and _nb_powmod(b, n - 1, n) == 1:
            count += 1
    return count


@njit(cache=True)
def _nb_count_strong(n, s, t):
    count = 0
    for b in range(1, n):
        if _nb_gcd(b, n) == 1 and _nb_miller(b, n, s, t):
            count += 1
    return count


@njit(cache=True)
def _nb_count_qprobable(n, q, s, t):
    count = 0
    for b in range(1, n):
        if _nb_gcd(b, n) != 1:
            continue
        x = _nb_powmod(b, t, n)
        if x == 1:
            count += 1
            continue
        for _ in range(s):
            if _nb_phi_q(x, q, n) == 0:
                count += 1
                break
            x = _nb_powmod(x, q, n)
    return count


@njit(cache=True)
def _nb_count_midy(n, mods, lams, primes, nprimes):
    # row 0 describes the modulus n itself, the other rows its primes
    count = 0
    for b in range(1, n):
        if _nb_gcd(b, n) != 1:
            continue
        order = _nb_order(b, n, lams[0], primes[0, : nprimes[0]])
        ok = True
        for j in range(1, mods.shape[0]):
            if _nb_order(b, mods[j], lams[j], primes[j, : nprimes[j]]) != order:
                ok = False
                break
        if ok:
            count += 1
    return count


@njit(cache=True)
def _nb_census_mask(ns, base, strong):
    out = np.zeros(ns.shape[0], dtype=np.bool_)
    for i in range(ns.shape[0]):
        n = ns[i]
        if _nb_gcd(base % n, n) != 1:
            continue
        if strong:
            t = n - 1
            s = 0
            while t % 2 == 0:
                t //= 2
                s += 1
            out[i] = _nb_miller(base, n, s, t)
        else:
            out[i] = _nb_powmod(base, n - 1, n) == 1
    return out


# --------------------------------------------------------------- numpy paths


def _np_powmod(b, e, m):
    b, e, m = np.broadcast_arrays(np.asarray(b, np.int64), np.asarray(e, np.int64), np.asarray(m, np.int64))
    b = b % m
    e = e.copy()
    result = np.ones_like(b) % m
    while np.any(e > 0):
        odd = (e & 1).astype(bool)
        result = np.where(odd, result * b % m, result)
        b = b * b % m
        e >>= 1
    return result


def _np_order(bs, m, lam, primes):
    e = np.full(bs.shape, lam, dtype=np.int64)
    for r in primes:
        mult, rest = 0, lam
        while rest % r == 0:
            rest //= r
            mult += 1
        for _ in range(mult):
            divisible = e % r == 0
            cand = np.where(divisible, e // r, e)
            drop = divisible & (_np_powmod(bs, cand, m) == 1)
            if not drop.any():
                break
            e = np.where(drop, cand, e)
    return e


def _np_miller(bs, n, s, t):
    x = _np_powmod(bs, t, n)
    ok = (x == 1) | (x == n - 1)
    for _ in range(int(np.max(s, initial=1)) - 1):
        x = x * x % n
        ok |= (x == n - 1) & (s > 1)
        s = s - 1
    return ok


def _np_phi_q(x, q, n):
    acc = np.ones_like(x) % n
    for _ in range(q - 1):
        acc = (acc * x + 1) % n
    return acc


def _units(n: int) -> np.ndarray:
    bs = np.arange(1, n, dtype=np.int64)
    return bs[np.gcd(bs, n) == 1]


def _np_count(n: int, predicate: str, q: int) -> int:
    bs = _units(n)
    if predicate == "fermat":
        return int(np.count_nonzero(_np_powmod(bs, n - 1, n) == 1))
    if predicate == "strong":
        s, t = _split_exponent(n, 2)
        return int(np.count_nonzero(_np_miller(bs, n, np.int64(s), t)))
    if predicate == "q_probable":
        s, t = _split_exponent(n, q)
        x = _np_powmod(bs, t, n)
        ok = x == 1
        for _ in range(s):
            ok |= _np_phi_q(x, q, n) == 0
            x = _np_powmod(x, q, n)
        return int(np.count_nonzero(ok))
    mods, lams, prime_lists = _order_tables(n)
    order = _np_order(bs, n, lams[0], prime_lists[0])
    ok = np.ones(bs.shape, dtype=bool)
    for m, lam, primes in zip(mods[1:], lams[1:], prime_lists[1:]):
        ok &= _np_order(bs, m, lam, primes) == order
    return int(np.count_nonzero(ok))


def _np_census_mask(ns, base, strong):
    ns = np.asarray(ns, dtype=np.int64)
    coprime = np.gcd(base % ns, ns) == 1
    if not strong:
        return coprime & (_np_powmod(base, ns - 1, ns) == 1)
    t = ns - 1
    s = np.zeros_like(ns)
    even = t % 2 == 0
    while even.any():
        t = np.where(even, t // 2, t)
        s = s + even
        even = t % 2 == 0
    return coprime & _np_miller(np.int64(base), ns, s, t)


# ------------------------------------------------------------------ dispatch


def _split_exponent(n: int, q: int) -> tuple[int, int]:
    s, t = 0, n - 1
    while t % q == 0:
        t //= q
        s += 1
    return s, t


def _order_tables(n: int) -> tuple[list[int], list[int], list[tuple[int, ...]]]:
    mods = [n] + list(factorize(n).primes)
    lams = [carmichael_lambda(m) for m in mods]
    prime_lists = [factorize(lam).primes if lam > 1 else () for lam in lams]
    return mods, lams, prime_lists


def _check_modulus(n: int) -> None:
    if not 2 <= n <= MAX_MODULUS:
        raise ValueError(f"modulus {n} outside the machine-word kernel range")


def powmod(bases, exps, mods) -> np.ndarray:
    """Elementwise ``bases**exps % mods`` with broadcasting."""
    b, e, m = np.broadcast_arrays(
        np.asarray(bases, np.int64), np.asarray(exps, np.int64), np.asarray(mods, np.int64)
    )
    if m.size and (m.min() < 1 or m.max() > MAX_MODULUS):
        raise ValueError("modulus outside the machine-word kernel range")
    if _backend == "numba":
        out = np.empty(b.size, dtype=np.int64)
        _nb_powmod_flat(b.ravel(), e.ravel(), m.ravel(), out)
        return out.reshape(b.shape)
    return _np_powmod(b, e, m)


def count_bases(n: int, predicate: str, q: int = 0) -> int:
    """Number of ``b in U_n`` satisfying one of the brute-force predicates."""
    _check_modulus(n)
    if _backend == "numpy":
        return _np_count(n, predicate, q)
    if predicate == "fermat":
        return int(_nb_count_fermat(n))
    if predicate == "strong":
        s, t = _split_exponent(n, 2)
        return int(_nb_count_strong(n, s, t))
    if predicate == "q_probable":
        s, t = _split_exponent(n, q)
        return int(_nb_count_qprobable(n, q, s, t))
    if predicate == "midy_order_equality":
        mods, lams, prime_lists = _order_tables(n)
        width = max(1, max(len(p) for p in prime_lists))
        primes = np.ones((len(mods), width), dtype=np.int64)
        for j, row in enumerate(prime_lists):
            primes[j, : len(row)] = row
        nprimes = np.array([len(p) for p in prime_lists], dtype=np.int64)
        return int(
            _nb_count_midy(
                n, np.array(mods, dtype=np.int64), np.array(lams, dtype=np.int64), primes, nprimes
            )
        )
    raise ValueError(f"unknown predicate {predicate!r}")


def census_mask(ns: np.ndarray, base: int, strong: bool) -> np.ndarray:
    """Which odd ``n`` in ``ns`` pass the base-``base`` Fermat (or strong) test.

    Bases sharing a factor with ``n`` are rejected.
    """
    ns = np.asarray(ns, dtype=np.int64)
    if ns.size == 0:
        return np.zeros(0, dtype=bool)
    if ns.min() < 3 or ns.max() > MAX_MODULUS or not 1 <= base <= MAX_MODULUS:
        raise ValueError("census candidates or base outside the machine-word kernel range")
    if _backend == "numba":
        return _nb_census_mask(ns, np.int64(base), strong)
    return _np_census_mask(ns, base, strong)
