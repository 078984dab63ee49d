import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from klab.errors import BadParameters, BudgetExceeded
from klab.residue import factorize, is_prime
from klab.sieve import (GSetParams, bt_ratio, debruijn_report, factor_profile, g_set,
                        largest_prime_factors, prime_count_ap, primes_up_to, psi, psi_cumulative)


def P(n):
    return factorize(n).primes[-1] if n > 1 else 1


def test_prime_table_examples():
    assert primes_up_to(10).primes.tolist() == [2, 3, 5, 7]
    assert primes_up_to(2).primes.tolist() == [2]
    assert primes_up_to(1).primes.tolist() == []
    assert len(primes_up_to(10**6)) == 78498
    t = primes_up_to(1000)
    assert 997 in t and 999 not in t
    assert all(is_prime(int(p)) for p in t.primes)
    assert t.count_upto(100) == 25
    with pytest.raises(BudgetExceeded):
        primes_up_to(10**9 + 1)


def test_segmented_sieve_agrees():
    from klab.sieve import _segmented_sieve, _simple_sieve
    n = 3 * (1 << 22) + 17
    assert np.array_equal(_segmented_sieve(n), _simple_sieve(n))


def test_prime_count_ap_examples():
    assert prime_count_ap(10, 4, 1) == 1
    assert prime_count_ap(100, 3, 1) == 11
    with pytest.raises(BadParameters):
        prime_count_ap(100, 6, 3)


def test_ap_partition_identity():
    x = 10**6
    pi = len(primes_up_to(x))
    for q in range(1, 51):
        total = sum(prime_count_ap(x, q, a) for a in range(q) if math.gcd(a, q) == 1)
        assert total == pi - sum(1 for p in factorize(q).primes if p <= x)


def test_bt_ratio():
    r = bt_ratio(10**6, 2, 1)
    assert r.params["count"] == 78498 - 1 and r.lhs < 2 and r.holds
    r = bt_ratio(10**6, 101, 1)
    assert r.params["theta"] == pytest.approx(math.log(101) / math.log(10**6))
    with pytest.raises(BadParameters):
        bt_ratio(100, 200, 1)


def test_psi_examples():
    assert psi(10, 2) == 4
    assert psi(1000, 10) == sum(1 for n in range(1, 1001) if P(n) <= 10) == 141
    assert psi(50, 50) == psi(50, 70) == 50
    assert psi(37.9, 1) == 1 and psi(0.5, 3) == 0
    with pytest.raises(BudgetExceeded):
        psi(10**8 + 1, 3)


def test_psi_bruteforce_small():
    big = [P(n) for n in range(0, 10**4 + 1)]
    for y in primes_up_to(100).primes.tolist():
        assert psi(10**4, y) == sum(1 for n in range(1, 10**4 + 1) if big[n] <= y)


def test_psi_segmented_path():
    # beyond the table: compare against the table-based count at the same x
    from klab import sieve
    x, y = sieve.TABLE_LIMIT + 12345, 300
    lpf = sieve.largest_prime_factors(x)
    assert psi(x, y) == int(np.count_nonzero(lpf[1:] <= y))


@given(st.integers(1, 5000), st.integers(1, 200), st.integers(0, 300), st.integers(0, 50))
@settings(max_examples=100, deadline=None)
def test_psi_monotone(x, y, dx, dy):
    assert psi(x, y) <= psi(x + dx, y) and psi(x, y) <= psi(x, y + dy)
    assert psi(x, 1) == 1


def test_buchstab_identity():
    x = 10**4
    n = np.arange(x + 1)
    prev = 1
    for p in primes_up_to(200).primes.tolist():
        c_p, c_prev = psi_cumulative(x, p), psi_cumulative(x, prev)
        assert np.array_equal(c_p, c_prev + c_p[n // p])
        prev = p


def test_debruijn():
    r = debruijn_report(10**6, 100)
    assert r.params["u"] == pytest.approx(3) and r.rhs == pytest.approx(1 / 27)
    assert r.lhs == psi(10**6, 100) / 10**6
    r = debruijn_report(100, 200)
    assert r.params["trivial_regime"] and r.lhs == 1 and r.rhs >= 1
    assert debruijn_report(10**7, 50).lhs > 0


def test_factor_profile_examples():
    f = factor_profile(12, 2)
    assert f.top == (3, 2) and f.cofactor == 2 and f.cofactor_P == 2 and f.P == 3
    f = factor_profile(97, 2)
    assert f.short and f.factors_desc == (97,)
    f = factor_profile(2**10, 3)
    assert f.top == (2, 2, 2) and f.cofactor == 2**7


def test_factor_profile_reconstructs():
    for x in range(2, 10**5 + 1, 7):
        for r in (1, 3):
            f = factor_profile(x, r)
            assert math.prod(f.top) * f.cofactor == x
            assert list(f.factors_desc) == sorted(f.factors_desc, reverse=True)
            assert f.cofactor_P <= f.top[-1]


def test_largest_prime_factor_table():
    lpf = largest_prime_factors(3000)
    assert all(lpf[n] == P(n) for n in range(1, 3001))


def test_gset_frozen_counts():
    params = GSetParams(10**4, 2, 0.1, 0.02)
    g = g_set(params)
    assert not params.in_window
    # frozen from an independent trial-division recount with exact integer thresholds
    assert (g.size, g.complement, g.few_factors, g.p1_small, g.pr_small, g.product_large) == \
        (8347, 1652, 1230, 14, 0, 410)
    assert g.size + g.complement == 10**4 - 1
    assert g.complement <= g.complement_terms and g.union_matches
    assert g.psi_N_alpha == psi(10**4, (10**4) ** 0.1)


def test_gset_directional_limit():
    sizes = [g_set(GSetParams(10**4, 1, a, a / 2)).size for a in (0.1, 0.05, 0.02)]
    assert sizes == sorted(sizes)
    assert sizes[-1] > 0.95 * (10**4 - 1)


def test_gset_params_validation():
    with pytest.raises(BadParameters):
        GSetParams(100, 2, 0.2, 0.01)
    with pytest.raises(BadParameters):
        GSetParams(100, 2, 0.05, 0.06)
    with pytest.raises(BudgetExceeded):
        g_set(GSetParams(10**7 + 1, 2, 0.1, 0.02))
    assert GSetParams(10**6, 2, 0.09, 0.08).in_window
