import cmath
import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from klab.errors import BadParameters, BudgetExceeded
from klab.expsums import (EPS, CoefficientVector, ExpSumValue, bilinear_kloosterman,
                          complete_kloosterman, e_m, fiber_condition_check, incomplete_kloosterman,
                          multilinear_decay_scan, multilinear_sum, mu_identity_check,
                          short_sum_max, theorem3_bound_check, theorem3_log_rhs, weil_bound_check)
from klab.residue import mobius, tau


def direct(terms, m):
    """High-precision reference for a sum of e_m(r) with weights."""
    mpmath.mp.dps = 40
    s = mpmath.mpc(0)
    for r, w in terms:
        s += mpmath.mpc(w) * mpmath.expjpi(mpmath.mpf(2 * (r % m)) / m)
    return complex(s)


def check_err_invariant(v: ExpSumValue):
    assert v.err <= v.n_terms * 16 * EPS * (1 + abs(v)) or v.n_terms == 0
    assert abs(v) <= v.n_terms + v.err


def test_single_terms():
    assert e_m(0, 8).value == 1
    assert e_m(4, 8).close_to(-1)
    assert e_m(1, 12).close_to(cmath.exp(1j * math.pi / 6))
    assert e_m(8 * 10**15 + 1, 8).close_to(e_m(1, 8))


def test_complete_examples():
    assert complete_kloosterman(1, 0, 4).close_to(0)
    assert complete_kloosterman(1, 0, 6).close_to(1)
    k = complete_kloosterman(1, 1, 5)
    assert abs(k) <= tau(5) * math.sqrt(5)
    assert k.close_to(direct([(pow(x, -1, 5) + x, 1) for x in range(1, 5)], 5), 1e-12)
    with pytest.raises(BadParameters):
        complete_kloosterman(2, 1, 4)


def test_incomplete_examples():
    z = incomplete_kloosterman(1, 0, 7, 0, 0)
    assert z.value == 0 and z.err == 0
    assert incomplete_kloosterman(1, 0, 7, 0, 7).close_to(-1, 1e-12)
    # frozen from a 40-digit evaluation of the 50-term sum
    ref = complex(6.677176574907232168, 2.671700413017028627)
    v = incomplete_kloosterman(3, 2, 101, 10, 50)
    assert v.close_to(ref)
    assert incomplete_kloosterman(1, 0, 6, 1, 1).value == 0  # only x = 2, not a unit
    check_err_invariant(v)


def test_large_modulus_argument_reduction():
    m = (1 << 61) - 1
    v = incomplete_kloosterman(5, 7, m, 0, 30)
    ref = direct([(5 * pow(x, -1, m) + 7 * x, 1) for x in range(1, 31)], m)
    assert v.close_to(ref, 1e-9)


@given(st.integers(2, 400), st.data())
@settings(max_examples=80, deadline=None)
def test_conjugation_and_completion(m, data):
    a = data.draw(st.integers(1, m - 1).filter(lambda x: math.gcd(x, m) == 1) if m > 2 else st.just(1))
    b = data.draw(st.integers(0, m - 1))
    K = complete_kloosterman(a, b, m)
    Kc = complete_kloosterman(-a, -b, m)
    assert K.close_to(Kc.conjugate())
    assert K.close_to(incomplete_kloosterman(a, b, m, 0, m))
    check_err_invariant(K)
    assert abs(K) <= tau(m) * math.sqrt(m) + K.err + 1e-6


def test_mu_identity_small():
    for m in range(2, 60):
        for a in range(1, m):
            if math.gcd(a, m) == 1:
                assert abs(incomplete_kloosterman(a, 0, m, 0, m).value - mobius(m)) < 1e-6
    rep = mu_identity_check(30)
    assert rep.holds and rep.params["mu"] == -1 and rep.params["units"] == 8


def test_bilinear_examples():
    one = CoefficientVector.ones(1)
    assert bilinear_kloosterman(1, 5, 1, 1, one, one).close_to(e_m(1, 5))
    rng = np.random.default_rng(11)
    a1 = CoefficientVector.random_signs(12, rng)
    a2 = CoefficientVector.random_signs(12, rng)
    S = bilinear_kloosterman(7, 101, 12, 12, a1, a2)
    ref = direct([(7 * pow(x, -1, 101) * pow(y, -1, 101), a1(x) * a2(y))
                  for x in range(1, 13) for y in range(1, 13)], 101)
    assert S.close_to(ref)
    assert abs(S) <= 144 + S.err
    with pytest.raises(BadParameters):
        bilinear_kloosterman(2, 10, 3, 3, CoefficientVector.ones(3), CoefficientVector.ones(3))


def test_bilinear_skips_non_units():
    c = CoefficientVector.ones(6)
    S = bilinear_kloosterman(1, 6, 6, 6, c, c)
    ref = direct([(pow(x, -1, 6) * pow(y, -1, 6), 1) for x in (1, 5) for y in (1, 5)], 6)
    assert S.close_to(ref)


def test_coefficients_bounded():
    with pytest.raises(BadParameters):
        CoefficientVector([1.0, 1.5])
    with pytest.raises(BadParameters):
        CoefficientVector.ones(3).at(np.array([4]))


def test_multilinear_examples():
    v = multilinear_sum([[0], [1, 2, 3], [4, 5]], 17, 31)
    assert v.close_to(6)
    assert multilinear_sum([[1, 2, 3]], 1, 4).close_to(-1)
    rng = np.random.default_rng(5)
    sets = [rng.integers(0, 211, 5).tolist() for _ in range(3)]
    ref = direct([(7 * x * y * z, 1) for x in sets[0] for y in sets[1] for z in sets[2]], 211)
    assert multilinear_sum(sets, 7, 211).close_to(ref)
    with pytest.raises(BadParameters):
        multilinear_sum([[1], []], 1, 7)


@given(st.sampled_from([31, 97, 100, 211]), st.data())
@settings(max_examples=40, deadline=None)
def test_multilinear_singleton_reduction(q, data):
    c = data.draw(st.integers(1, q - 1).filter(lambda x: math.gcd(x, q) == 1))
    xi = data.draw(st.integers(0, q - 1))
    A = data.draw(st.lists(st.integers(0, q - 1), min_size=1, max_size=8))
    B = data.draw(st.lists(st.integers(0, q - 1), min_size=1, max_size=8))
    full = multilinear_sum([A, [c], B], xi, q)
    reduced = multilinear_sum([A, B], xi * c % q, q)
    assert full.close_to(reduced)


def test_decay_scan_examples():
    q = 101
    rep = multilinear_decay_scan([list(range(1, q))], q)
    assert abs(rep.lhs - 1) < 1e-9 and rep.holds
    rep0 = multilinear_decay_scan([[0], [1, 2]], 13)
    assert rep0.ratio == pytest.approx(1.0)
    rng = np.random.default_rng(2)
    q = 10007
    sets = [sorted(rng.choice(np.arange(1, q), 100, replace=False).tolist()) for _ in range(2)]
    rep = multilinear_decay_scan(sets, q)
    assert rep.ratio < 1 and rep.holds
    # the scan's argmax really is a maximum over every unit xi (spot check a few hundred)
    for xi in range(1, 300):
        assert abs(multilinear_sum(sets, xi, q)) <= rep.lhs + 1e-6
    with pytest.raises(BudgetExceeded):
        multilinear_decay_scan([[1]], 10**5 + 3)


def test_fiber_examples():
    q = 12
    reps = fiber_condition_check(list(range(q)), q, 0.5, 0.3)
    for r in reps:
        q1 = r.params["q1"]
        assert r.lhs == q // q1
        assert r.holds == (q / q1 < q1 ** -0.5 * q)
    conc = fiber_condition_check([5, 17, 29, 41], 48, 0.1, 0.2)
    assert any(not r.holds and r.lhs == 4 for r in conc)
    rng = np.random.default_rng(0)
    q = 2**8 * 9
    A = rng.integers(0, q, 200).tolist()
    for r in fiber_condition_check(A, q, 0.1, 0.2):
        q1 = r.params["q1"]
        tally = {}
        for x in A:
            tally[x % q1] = tally.get(x % q1, 0) + 1
        assert r.lhs == max(tally.values()) and q1 > q**0.2


def test_weil_examples():
    r = weil_bound_check(1, 0, 6)
    assert r.lhs == pytest.approx(1) and r.rhs == pytest.approx(4 * math.sqrt(6)) and r.holds
    r = weil_bound_check(1, 1, 2)
    assert r.lhs == pytest.approx(1) and r.rhs == pytest.approx(2 * math.sqrt(2))


def test_theorem3_hand_expanded_k1():
    N1, N2, m = 30, 50, 1009
    lhs = theorem3_log_rhs(N1, N2, 1, 1, m)
    sm = math.sqrt(m)
    hand = (90 * math.log(2) + 4 * math.log(math.log(m))
            + 0.5 * (math.log(1 / sm + sm / N1) + math.log(1 / sm + sm / N2)) + math.log(N1 * N2))
    assert lhs == pytest.approx(hand, rel=1e-13)


def test_theorem3_reports():
    m = 101
    ones = CoefficientVector.ones(m)
    rep = theorem3_bound_check(m, m, 1, 1, 1, m, ones, ones)
    assert rep.holds
    rng = np.random.default_rng(9)
    a1 = CoefficientVector.random_unimodular(40, rng)
    a2 = CoefficientVector.random_unimodular(40, rng)
    rep = theorem3_bound_check(40, 40, 2, 2, 3, 10007, a1, a2, energy_chain=True)
    assert rep.holds and rep.params["chain_holds"]
    assert 0 <= rep.params["normalized"] <= 1


def test_short_sum_examples():
    for m in (30, 97, 100, 1009):
        assert short_sum_max(m, m).lhs == pytest.approx(abs(mobius(m)), abs=1e-9)
    assert short_sum_max(1, 1009).lhs == 1.0
    rep = short_sum_max(63, 1009)
    a = rep.params["a_star"]
    assert rep.lhs == pytest.approx(abs(incomplete_kloosterman(a, 0, 1009, 0, 63)))
    # exact maximum over all units by direct evaluation
    best = max(abs(incomplete_kloosterman(b, 0, 1009, 0, 63)) for b in range(1, 1009))
    assert rep.lhs == pytest.approx(best, abs=1e-9)
