import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import factor_trial, is_prime_trial, miller_brute, order_brute, units
from qpseudo import kernels
from qpseudo.pseudo import count_bases_brute, eligible_q

BACKENDS = ["numpy"] + (["numba"] if kernels.HAVE_NUMBA else [])


@pytest.fixture(params=BACKENDS)
def backend(request):
    with kernels.use_backend(request.param):
        yield request.param


def test_use_backend_restores():
    before = kernels.backend()
    with kernels.use_backend("numpy"):
        assert kernels.backend() == "numpy"
    assert kernels.backend() == before
    with pytest.raises(ValueError):
        kernels.set_backend("cuda")


def test_powmod_matches_builtin(backend):
    rng = np.random.default_rng(7)
    m = rng.integers(1, kernels.MAX_MODULUS, 500)
    b = rng.integers(0, kernels.MAX_MODULUS, 500)
    e = rng.integers(0, 2**40, 500)
    got = kernels.powmod(b, e, m)
    assert got.tolist() == [pow(int(x), int(y), int(z)) for x, y, z in zip(b, e, m)]


def test_powmod_broadcasts(backend):
    assert kernels.powmod([2, 3, 4], 10, 1000).tolist() == [24, 49, 576]


def test_powmod_rejects_wide_modulus(backend):
    with pytest.raises(ValueError):
        kernels.powmod(2, 3, kernels.MAX_MODULUS + 1)


def _brute(N, predicate, q=0):
    us = units(N)
    if predicate == "fermat":
        return sum(pow(b, N - 1, N) == 1 for b in us)
    if predicate == "strong":
        return sum(miller_brute(N, b) for b in us)
    if predicate == "midy_order_equality":
        ps = list(factor_trial(N))
        return sum(all(order_brute(b, p) == order_brute(b, N) for p in ps) for b in us)
    raise AssertionError(predicate)


@pytest.mark.parametrize("N", [9, 15, 45, 91, 121, 341, 561, 1105, 2047])
@pytest.mark.parametrize("predicate", ["fermat", "strong", "midy_order_equality"])
def test_count_matches_oracle(backend, N, predicate):
    assert kernels.count_bases(N, predicate) == _brute(N, predicate)


def test_all_engines_agree(backend):
    for N in range(9, 800, 2):
        if is_prime_trial(N):
            continue
        for predicate in ("fermat", "strong", "midy_order_equality"):
            assert kernels.count_bases(N, predicate) == count_bases_brute(N, predicate, engine="python")
        for q in eligible_q(N):
            assert kernels.count_bases(N, "q_probable", q) == count_bases_brute(
                N, "q_probable", q, engine="python"
            ), (N, q)


def test_census_mask(backend):
    ns = np.arange(3, 20001, 2)
    got = kernels.census_mask(ns, 2, strong=False)
    expected = [math.gcd(2, n) == 1 and pow(2, n - 1, n) == 1 for n in ns.tolist()]
    assert got.tolist() == expected
    got = kernels.census_mask(ns, 3, strong=True)
    expected = [n % 3 != 0 and miller_brute(n, 3) for n in ns.tolist()]
    assert got.tolist() == expected


def test_census_mask_non_coprime_base(backend):
    assert kernels.census_mask(np.array([9, 15, 21]), 3, strong=False).tolist() == [False] * 3
    assert kernels.census_mask(np.array([], dtype=np.int64), 2, strong=True).size == 0


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 10**6), st.integers(0, 10**12), st.integers(1, kernels.MAX_MODULUS))
def test_backends_agree_property(b, e, m):
    outs = []
    for name in BACKENDS:
        with kernels.use_backend(name):
            outs.append(int(kernels.powmod(b, e, m)))
    assert set(outs) == {pow(b, e, m)}
