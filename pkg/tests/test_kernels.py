"""Both kernel backends against plain-Python references and each other."""
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from klab import kernels


def py_spf(n):
    out = [0, 1] + [0] * (n - 1)
    for x in range(2, n + 1):
        out[x] = next(d for d in range(2, x + 1) if x % d == 0)
    return out


def test_backend_selection_is_reported():
    assert kernels.BACKEND in kernels.available_backends()
    assert set(kernels.NAMES) <= set(dir(kernels.backend("numpy")))
    with pytest.raises(ValueError):
        kernels.backend("fortran")


@given(st.integers(2, 5000), st.lists(st.integers(0, 10**6), min_size=0, max_size=40))
@settings(max_examples=60, deadline=None)
def test_batch_inverse_matches_pow(m, xs):
    arr = np.array([x % m for x in xs], dtype=np.int64)
    for name in kernels.available_backends():
        out = kernels.backend(name).batch_inverse(arr, m)
        for x, y in zip(arr.tolist(), out.tolist()):
            if math.gcd(x, m) == 1:
                assert y == pow(x, -1, m)
            else:
                assert y == -1


def test_batch_inverse_near_kernel_cap(backend):
    m = kernels.KERNEL_MAX_MODULUS
    xs = np.array([1, 2, 3, m - 1, 123456789], dtype=np.int64)
    assert backend.batch_inverse(xs, m).tolist() == [pow(int(x), -1, m) for x in xs]


def test_expsum_agrees_with_direct(backend):
    m = 97
    res = (np.arange(200, dtype=np.int64) * 31) % m
    re, im = backend.expsum(res, m)
    z = sum(complex(math.cos(2 * math.pi * r / m), math.sin(2 * math.pi * r / m)) for r in res.tolist())
    assert abs(complex(re, im) - z) < 1e-11


def test_weighted_and_bilinear_agree_across_backends():
    rng = np.random.default_rng(3)
    m = 1009
    r1 = rng.integers(0, m, 30)
    r2 = rng.integers(0, m, 25)
    w1 = rng.standard_normal(30) + 1j * rng.standard_normal(30)
    w2 = np.exp(1j * rng.uniform(0, 6.28, 25))
    outs = []
    for name in kernels.available_backends():
        k = kernels.backend(name)
        a = k.expsum_weighted(r1, w1.real.copy(), w1.imag.copy(), m)
        b = k.bilinear_expsum(r1, w1.real.copy(), w1.imag.copy(), r2, w2.real.copy(), w2.imag.copy(), m)
        outs.append((complex(*a), complex(*b)))
    direct = sum(w * np.exp(2j * np.pi * r / m) for r, w in zip(r1, w1))
    direct2 = sum(x * y * np.exp(2j * np.pi * ((int(s) * int(t)) % m) / m)
                  for s, x in zip(r1, w1) for t, y in zip(r2, w2))
    for a, b in outs:
        assert abs(a - direct) < 1e-10
        assert abs(b - direct2) < 1e-9


def test_tally_steps(backend):
    m = 13
    hist = np.zeros(m, dtype=np.int64)
    hist[0] = 1
    shifts = np.array([1, 5, 5, 12], dtype=np.int64)
    h1 = backend.cyclic_tally_step(hist, shifts, m)
    assert h1.tolist() == np.bincount(shifts % m, minlength=m).tolist()
    h2 = backend.cyclic_tally_step(h1, shifts, m)
    ref = np.zeros(m, dtype=np.int64)
    for a in shifts:
        for b in shifts:
            ref[(a + b) % m] += 1
    assert h2.tolist() == ref.tolist()
    p = backend.product_tally_step(h1, np.array([2, 3], dtype=np.int64), m)
    ref = np.zeros(m, dtype=np.int64)
    for a in shifts:
        for b in (2, 3):
            ref[a * b % m] += 1
    assert p.tolist() == ref.tolist()


@given(st.integers(2, 300), st.integers(0, 299), st.integers(0, 40), st.integers(0, 400))
@settings(max_examples=80, deadline=None)
def test_lattice_count_matches_enumeration(m, lam, U, V):
    lam %= m
    ref = sum(1 for u in range(-U, U + 1) for v in range(-V, V + 1) if (lam * u - v) % m == 0)
    for name in kernels.available_backends():
        assert kernels.backend(name).lattice_count(lam, m, U, V) == ref


def test_factor_tables(backend):
    n = 500
    spf = backend.spf_sieve(n)
    assert spf.tolist() == py_spf(n)
    lpf = backend.lpf_from_spf(spf)
    for x in range(2, n + 1):
        y, big = x, 1
        while y > 1:
            big = max(big, spf[y])
            y //= spf[y]
        assert lpf[x] == big
    assert lpf[1] == 1


def test_top_factors(backend):
    spf = backend.spf_sieve(1000)
    omega, p1, pr, prod_r, prod_head = backend.top_factors(spf, 1000, 2)
    assert (omega[12], p1[12], pr[12], prod_r[12], prod_head[12]) == (3, 3, 2, 6, 3)
    assert omega[97] == 1 and p1[97] == 0
    assert (p1[999], pr[999], prod_r[999], prod_head[999]) == (37, 3, 111, 37)
    assert len(omega) == 1000


def test_smooth_count(backend):
    primes = np.array([2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31], dtype=np.int64)
    lo, hi, y = 500, 1000, 7
    ref = 0
    for n in range(lo, hi):
        x = n
        for p in (2, 3, 5, 7):
            while x % p == 0:
                x //= p
        ref += x == 1
    assert backend.smooth_count(lo, hi, primes, y, math.isqrt(hi - 1)) == ref
