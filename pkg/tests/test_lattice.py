from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from klab.errors import BadParameters, BudgetExceeded
from klab.lattice import (Box, LambdaClass, ReciprocalLattice, case1_bound_check,
                          case2_rational_witness, corollary2_check, embed_solution,
                          embedding_failures, lattice_points_in_box, lemma2_check, minkowski_check,
                          omega_partition, solution_box, successive_minima,
                          successive_minima_exhaustive)

boxes = st.builds(Box, st.fractions(min_value=Fraction(1, 8), max_value=40, max_denominator=9),
                  st.fractions(min_value=Fraction(1, 8), max_value=40, max_denominator=9))


def test_point_count_examples():
    assert lattice_points_in_box(ReciprocalLattice(0, 11), Box(3, 1)).count == 7
    res = lattice_points_in_box(ReciprocalLattice(3, 7), Box(2, 2), points=True)
    assert res.count == 3 and sorted(res.points) == [(-2, 1), (0, 0), (2, -1)]
    lat, box = ReciprocalLattice(5, 13), Box(20, 30)
    # each u has at least 2*floor(B/m) partners v in [-B, B]
    assert lattice_points_in_box(lat, box).count >= (2 * 20 + 1) * 2 * (30 // 13)
    for lam in range(13):
        for B in range(13, 80):
            c = lattice_points_in_box(ReciprocalLattice(lam, 13), Box(5, B)).count
            assert c >= 11 * 2 * (B // 13)
    with pytest.raises(BudgetExceeded):
        lattice_points_in_box(lat, Box(10**8, 1))


def test_basis_and_validation():
    lat = ReciprocalLattice(4, 9)
    assert all(lat.contains(*b) for b in lat.basis)
    with pytest.raises(BadParameters):
        ReciprocalLattice(9, 9)
    with pytest.raises(BadParameters):
        Box(0, 1)


@given(st.integers(2, 200), st.integers(0, 199), boxes)
@settings(max_examples=80, deadline=None)
def test_points_are_lattice_combinations(m, lam, box):
    lat = ReciprocalLattice(lam % m, m)
    res = lattice_points_in_box(lat, box.scaled(Fraction(1, 2)), points=True)
    for u, v in res.points:
        # (u, v) = u*(1, lam) + j*(0, m) with integer j
        assert (v - u * lat.lam) % m == 0
        assert box.scaled(Fraction(1, 2)).contains(u, v)
    assert len(set(res.points)) == res.count


def test_minima_examples():
    mp = successive_minima(ReciprocalLattice(3, 7), Box(2, 2))
    assert (mp.mu1, mp.mu2) == (1, Fraction(3, 2))
    assert mp.witness1 == (2, -1) and mp.witness2 in {(1, 3), (3, 2)}
    for m in (5, 97, 1000):
        mp = successive_minima(ReciprocalLattice(0, m), Box(1, 1))
        assert (mp.mu1, mp.mu2, mp.witness1, mp.witness2) == (1, m, (1, 0), (0, m))


@given(st.integers(2, 500), st.integers(0, 499), boxes)
@settings(max_examples=150, deadline=None)
def test_minima_match_exhaustive(m, lam, box):
    lat = ReciprocalLattice(lam % m, m)
    mp = successive_minima(lat, box)
    ex = successive_minima_exhaustive(lat, box)
    assert (mp.mu1, mp.mu2) == (ex.mu1, ex.mu2)
    assert 0 < mp.mu1 <= mp.mu2
    assert box.norm(*mp.witness1) == mp.mu1 and box.norm(*mp.witness2) == mp.mu2
    assert lat.contains(*mp.witness1) and lat.contains(*mp.witness2)
    assert mp.det % m == 0 and mp.det >= m
    assert 2 * m <= mp.mu1 * mp.mu2 * 4 * box.A * box.B <= 4 * m


@given(st.integers(2, 300), st.integers(0, 299), boxes,
       st.fractions(min_value=Fraction(1, 5), max_value=7, max_denominator=6))
@settings(max_examples=60, deadline=None)
def test_minima_scale_inversely(m, lam, box, t):
    lat = ReciprocalLattice(lam % m, m)
    a = successive_minima(lat, box)
    b = successive_minima(lat, box.scaled(t))
    assert (b.mu1, b.mu2) == (a.mu1 / t, a.mu2 / t)


def test_large_modulus_minima():
    m = (1 << 61) - 1
    lat = ReciprocalLattice(123456789123, m)
    side = Fraction(1 << 31)
    mp = successive_minima(lat, Box(side, side))
    assert 2 * m <= mp.mu1 * mp.mu2 * 4 * side * side <= 4 * m
    assert lat.contains(*mp.witness1) and lat.contains(*mp.witness2)


def test_lemma2_corollary2_examples():
    lat, box = ReciprocalLattice(3, 7), Box(2, 2)
    r = lemma2_check(lat, box)
    assert (r.lhs, r.rhs, r.holds) == (3, 11, True)
    lat0 = ReciprocalLattice(0, 5)
    r = lemma2_check(lat0, Box(1, 1))
    assert r.lhs == 3 and r.rhs == pytest.approx(3 * (Fraction(4, 5) + 1))
    c = corollary2_check(lat0, Box(1, 1))
    assert c.holds and c.lhs == 1 and c.rhs == 5
    assert minkowski_check(lat, box).holds


@given(st.integers(2, 400), st.integers(0, 399), boxes)
@settings(max_examples=80, deadline=None)
def test_counting_bounds_hold(m, lam, box):
    lat = ReciprocalLattice(lam % m, m)
    assert lemma2_check(lat, box).holds
    assert corollary2_check(lat, box).holds


def test_omega_singletons():
    m = 31
    part = omega_partition(1, m - 1, m)
    assert part.counts[LambdaClass.NOT_IN_OMEGA] == 0
    assert set(part.minima) == set(range(1, m))


def test_omega_partition_k2():
    k, N, m = 2, 8, 1009
    part = omega_partition(k, N, m)
    assert part.mu1_violations == [] and part.J0 == 0 and part.small_regime
    assert sum(part.counts.values()) == m - 1
    omega = set(part.minima)
    assert omega == {lam for lam in range(1, m) if part.classes[lam] is not LambdaClass.NOT_IN_OMEGA}
    # definition-level recomputation of the classes
    sums = {(pow(x, -1, m) + pow(y, -1, m)) % m for x in range(1, N + 1) for y in range(1, N + 1)}
    assert omega == sums - {0}
    box = solution_box(k, N)
    for lam in omega:
        mu2 = successive_minima_exhaustive(ReciprocalLattice(lam, m), box).mu2
        expected = LambdaClass.OMEGA_PRIME if mu2 <= 1 else LambdaClass.OMEGA_DOUBLE_PRIME
        assert part.classes[lam] is expected
    for lam in part.members(LambdaClass.OMEGA_PRIME):
        rep = case1_bound_check(lam, k, N, m)
        assert rep.holds and rep.params["det_holds"]
    for lam in part.members(LambdaClass.OMEGA_DOUBLE_PRIME):
        v = case2_rational_witness(lam, k, N, m)
        assert v is not None and v.numerator % 1 == 0
        with pytest.raises(BadParameters):
            case1_bound_check(lam, k, N, m)
    for lam in part.members(LambdaClass.OMEGA_PRIME):
        with pytest.raises(BadParameters):
            case2_rational_witness(lam, k, N, m)
    assert case2_rational_witness(part.members(LambdaClass.NOT_IN_OMEGA)[0], k, N, m) is None


def test_case2_k1():
    m, N = 101, 60
    part = omega_partition(1, N, m)
    second = part.members(LambdaClass.OMEGA_DOUBLE_PRIME)
    assert second
    for lam in second:
        x = pow(lam, -1, m)
        assert case2_rational_witness(lam, 1, N, m) == Fraction(1, x)


def test_embedding():
    assert embed_solution((2, 3, 5)) == (30, 15 + 10 + 6)
    for k, N, m in [(2, 8, 1009), (3, 4, 211)]:
        part = omega_partition(k, N, m)
        assert all(embedding_failures(lam, k, N, m) == [] for lam in part.minima)


def test_omega_budget():
    with pytest.raises(BudgetExceeded):
        omega_partition(2, 5000, 1009)
