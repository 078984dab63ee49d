"""Exact counts of solutions to reciprocal congruences and unit-fraction equations.

Every counter is meet-in-the-middle: tally the k-fold sums by exact key
(a residue, or a reduced fraction) and add up squared multiplicities. The
brute-force oracles in this module enumerate the 2k-tuples directly and share
no code with the tallies.
"""
from __future__ import annotations

import enum
import itertools
import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from . import kernels
from .errors import BadParameters, BudgetExceeded
from .report import BoundReport
from .residue import as_modulus, inverses_of
from .sieve import primes_up_to

MITM_BUDGET = 10**8
BRUTE_BUDGET = 10**9
DENSE_LIMIT = 1 << 24
_CHUNK_ROWS = 1 << 21


class Restriction(str, enum.Enum):
    ALL = "all"
    PRIMES = "primes"


@dataclass(frozen=True)
class EnergyQuery:
    k: int
    N: int
    m: int
    restriction: Restriction = Restriction.ALL

    def __post_init__(self):
        object.__setattr__(self, "m", as_modulus(self.m))
        object.__setattr__(self, "restriction", Restriction(self.restriction))
        if self.k < 1 or self.N < 1:
            raise BadParameters(f"need k >= 1 and N >= 1, got k={self.k}, N={self.N}")

    def admissible(self) -> np.ndarray:
        """The variable set: [1, N] (or its primes) restricted to gcd(x, m) = 1."""
        if self.restriction is Restriction.PRIMES:
            xs = primes_up_to(self.N).primes
        else:
            xs = np.arange(1, self.N + 1, dtype=np.int64)
        return xs[np.gcd(xs, self.m) == 1]


@dataclass(frozen=True)
class EnergyCount:
    query: EnergyQuery
    count: int
    lambda_profile: dict[int, int] | None = None


@dataclass(frozen=True)
class AlmostPrimeQuery:
    """Products p*q of primes with K/2 < p < K and q < L."""

    k: int
    K: int
    L: int
    m: int | None = None

    def __post_init__(self):
        if self.k < 1:
            raise BadParameters(f"k must be >= 1, got {self.k}")
        if self.K < 2 or self.L < 2:
            raise BadParameters("K and L must be >= 2")
        if 2 * self.L >= self.K:
            raise BadParameters(f"need 2L < K, got K={self.K}, L={self.L}")
        if self.m is not None:
            object.__setattr__(self, "m", as_modulus(self.m))

    def large_primes(self) -> list[int]:
        ps = primes_up_to(self.K - 1).primes.tolist()
        return [p for p in ps if 2 * p > self.K]

    def small_primes(self) -> list[int]:
        return primes_up_to(self.L - 1).primes.tolist()

    def products(self) -> list[int]:
        return [p * q for p in self.large_primes() for q in self.small_primes()]


# -- residue tallies ---------------------------------------------------------

def _check_budget(n: int, k: int, budget: int) -> None:
    if n**k > budget:
        raise BudgetExceeded(f"{n}^{k} = {n**k} exceeds the budget {budget}")


def _residue_tally(residues: np.ndarray, k: int, m: int):
    """Multiplicity of every k-fold sum of ``residues`` mod m (dense array or dict)."""
    if m <= DENSE_LIMIT and m <= kernels.KERNEL_MAX_MODULUS:
        shifts = np.asarray(residues, dtype=np.int64)
        hist = np.zeros(m, dtype=np.int64)
        hist[0] = 1
        for _ in range(k):
            hist = kernels.cyclic_tally_step(hist, shifts, m)
        return hist
    tally = Counter({0: 1})
    vals = [int(r) for r in residues]
    for _ in range(k):
        nxt: Counter = Counter()
        for r, c in tally.items():
            for s in vals:
                nxt[(r + s) % m] += c
        tally = nxt
    return dict(tally)


def _energy_of(tally) -> int:
    if isinstance(tally, dict):
        return sum(c * c for c in tally.values())
    nz = tally[tally > 0]
    return int(np.dot(nz, nz))


def _profile_of(tally) -> dict[int, int]:
    if isinstance(tally, dict):
        return {r: c for r, c in sorted(tally.items()) if c}
    nz = np.flatnonzero(tally)
    return dict(zip(nz.tolist(), tally[nz].tolist()))


@lru_cache(maxsize=128)
def _query_tally(query: EnergyQuery):
    xs = query.admissible()
    _check_budget(len(xs), query.k, MITM_BUDGET)
    tally = _residue_tally(inverses_of(xs, query.m), query.k, query.m)
    if isinstance(tally, np.ndarray):
        tally.flags.writeable = False
    return tally


def count_J_lambda(lam: int, query: EnergyQuery) -> int:
    """Number of ordered k-tuples of admissible x with x1^-1 + ... + xk^-1 = lam (mod m)."""
    if not 0 <= lam < query.m:
        raise BadParameters(f"lambda must lie in [0, {query.m}), got {lam}")
    tally = _query_tally(query)
    if isinstance(tally, dict):
        return tally.get(lam, 0)
    return int(tally[lam])


def inverse_sum_profile(query: EnergyQuery) -> dict[int, int]:
    """Map lambda -> J(lambda) over the residues that occur."""
    return _profile_of(_query_tally(query))


def count_J2k(query: EnergyQuery, profile: bool = False) -> EnergyCount:
    """J_2k: solutions of x1^-1+...+xk^-1 = x_{k+1}^-1+...+x_{2k}^-1 (mod m)."""
    tally = _query_tally(query)
    return EnergyCount(query, _energy_of(tally), _profile_of(tally) if profile else None)


def count_J2k_bruteforce(query: EnergyQuery) -> EnergyCount:
    """Reference count by direct enumeration of all 2k-tuples."""
    xs = [x for x in range(1, query.N + 1) if math.gcd(x, query.m) == 1]
    if query.restriction is Restriction.PRIMES:
        xs = [x for x in xs if x > 1 and all(x % d for d in range(2, math.isqrt(x) + 1))]
    _check_budget(len(xs), 2 * query.k, BRUTE_BUDGET)
    invs = [pow(x, -1, query.m) for x in xs]
    halves = [sum(t) % query.m for t in itertools.product(invs, repeat=query.k)]
    count = 0
    for left in halves:
        for right in halves:
            if left == right:
                count += 1
    return EnergyCount(query, count)


def solutions_J_lambda(lam: int, query: EnergyQuery) -> list[tuple[int, ...]]:
    """All ordered k-tuples counted by :func:`count_J_lambda`."""
    m = query.m
    xs = query.admissible().tolist()
    invs = inverses_of(xs, m).tolist()
    by_inverse: dict[int, list[int]] = {}
    for x, i in zip(xs, invs):
        by_inverse.setdefault(i, []).append(x)
    out = []
    for head in itertools.product(range(len(xs)), repeat=query.k - 1):
        need = (lam - sum(invs[j] for j in head)) % m
        for last in by_inverse.get(need, ()):
            out.append(tuple(xs[j] for j in head) + (last,))
    return out


# -- unit-fraction tallies ---------------------------------------------------

def _fraction_tally(dens: list[int], k: int) -> tuple[np.ndarray, np.ndarray] | Counter:
    """Multiplicity of each k-fold sum 1/d_1 + ... + 1/d_k, keyed by reduced fraction."""
    bound = max(dens) ** k
    if k * bound * (bound + 1) >= 1 << 62:
        return _fraction_tally_exact(dens, k)
    d = np.asarray(dens, dtype=np.int64)
    num = np.ones(1, dtype=np.int64)
    den = np.ones(1, dtype=np.int64)
    num[0] = 0
    for _ in range(k - 1):
        num, den = _add_unit(num, den, d)
    keys, counts = [], []
    rows = max(1, _CHUNK_ROWS // max(1, len(num)))
    for lo in range(0, len(d), rows):
        n2, d2 = _add_unit(num, den, d[lo:lo + rows])
        u, c = np.unique(n2 * (bound + 1) + d2, return_counts=True)
        keys.append(u)
        counts.append(c.astype(np.int64))
    allk = np.concatenate(keys)
    allc = np.concatenate(counts)
    u, inv = np.unique(allk, return_inverse=True)
    tot = np.zeros(len(u), dtype=np.int64)
    np.add.at(tot, inv, allc)
    return u, tot


def _add_unit(num: np.ndarray, den: np.ndarray, d: np.ndarray):
    # every (num/den) + 1/d_j, reduced
    n2 = (num[:, None] * d[None, :] + den[:, None]).ravel()
    d2 = (den[:, None] * d[None, :]).ravel()
    g = np.gcd(n2, d2)
    return n2 // g, d2 // g


def _fraction_tally_exact(dens: list[int], k: int) -> Counter:
    tally = Counter({(0, 1): 1})
    for _ in range(k):
        nxt: Counter = Counter()
        for (n, dd), c in tally.items():
            for d in dens:
                a, b = n * d + dd, dd * d
                g = math.gcd(a, b)
                nxt[(a // g, b // g)] += c
        tally = nxt
    return tally


def _unit_fraction_energy(dens: list[int], k: int) -> int:
    if not dens:
        return 0
    _check_budget(len(dens), k, MITM_BUDGET)
    tally = _fraction_tally(dens, k)
    if isinstance(tally, Counter):
        return sum(c * c for c in tally.values())
    counts = tally[1]
    return int(np.dot(counts, counts))


def unit_fraction_bruteforce(dens: list[int], k: int) -> int:
    """Reference count of 1/d_1+...+1/d_k = 1/d_{k+1}+...+1/d_{2k} by exact fractions."""
    _check_budget(len(dens), 2 * k, BRUTE_BUDGET)
    recips = [Fraction(1, d) for d in dens]
    halves = [sum(t, Fraction(0)) for t in itertools.product(recips, repeat=k)]
    count = 0
    for left in halves:
        for right in halves:
            if left == right:
                count += 1
    return count


def count_rational_energy(k: int, N: int) -> int:
    """Solutions of 1/x_1+...+1/x_k = 1/x_{k+1}+...+1/x_{2k} with x_i in [1, N]."""
    if k < 1 or N < 1:
        raise BadParameters("need k >= 1 and N >= 1")
    return _unit_fraction_energy(list(range(1, N + 1)), k)


def count_T2k(query: AlmostPrimeQuery) -> int:
    """T_2k(K, L): equal sums of k unit fractions 1/(p q) on each side."""
    return _unit_fraction_energy(query.products(), query.k)


def count_J2k_KL(query: AlmostPrimeQuery) -> int:
    """J_2k(K, L): the same equation read modulo m, skipping products not coprime to m."""
    if query.m is None:
        raise BadParameters("count_J2k_KL needs a modulus")
    prods = [d for d in query.products() if math.gcd(d, query.m) == 1]
    if not prods:
        return 0
    _check_budget(len(prods), query.k, MITM_BUDGET)
    return _energy_of(_residue_tally(inverses_of(prods, query.m), query.k, query.m))


def almost_prime_bruteforce(query: AlmostPrimeQuery, modular: bool) -> int:
    """Reference value for :func:`count_T2k` (``modular=False``) or :func:`count_J2k_KL`."""
    prods = query.products()
    if not modular:
        return unit_fraction_bruteforce(prods, query.k)
    m = query.m
    prods = [d for d in prods if math.gcd(d, m) == 1]
    _check_budget(len(prods), 2 * query.k, BRUTE_BUDGET)
    invs = [pow(d, -1, m) for d in prods]
    halves = [sum(t) % m for t in itertools.product(invs, repeat=query.k)]
    return sum(1 for left in halves for right in halves if left == right)


# -- bound reports -----------------------------------------------------------

def _structural(count: int, N: int, k: int, m: int) -> float:
    return float(Fraction(count) / ((Fraction(N ** (2 * k - 1), m) + 1) * N**k))


def theorem1_bound_report(query: EnergyQuery) -> BoundReport:
    k, N, m = query.k, query.N, query.m
    J = count_J2k(query).count
    log_rhs = (90 * k**3 * math.log(2 * k)
               + (4 * k**2 * math.log(math.log(N)) if N > 1 else -math.inf)
               + math.log(N ** (2 * k - 1) / m + 1) + k * math.log(N))
    return BoundReport.compare_log(
        "theorem1", J, log_rhs, strict=True, k=k, N=N, m=m,
        restriction=query.restriction.value, count=J,
        structural_ratio=_structural(J, N, k, m), regime_small=k * N ** (k - 1) < m)


def theorem2_bound_report(query: EnergyQuery) -> BoundReport:
    k, N, m = query.k, query.N, query.m
    J = count_J2k(query).count
    rhs = (2 * k) ** k * (Fraction(N ** (2 * k - 1), m) + 1) * N**k
    return BoundReport.compare(
        "theorem2", J, rhs, strict=True, k=k, N=N, m=m,
        restriction=query.restriction.value, count=J,
        structural_ratio=_structural(J, N, k, m))


def lemma3_bound_report(k: int, N: int) -> BoundReport:
    count = count_rational_energy(k, N)
    log_rhs = (80 * k**3 * math.log(2 * k)
               + (4 * k**2 * math.log(math.log(N)) if N > 1 else -math.inf)
               + k * math.log(N))
    return BoundReport.compare_log("lemma3", count, log_rhs, strict=True, k=k, N=N,
                                   count=count, normalized=count / N**k)


def lemma4_bound_report(query: AlmostPrimeQuery) -> BoundReport:
    k, K, L = query.k, query.K, query.L
    T = count_T2k(query)
    base = k * (math.log(K) - math.log(math.log(K))) + k * (math.log(L) - math.log(math.log(L)))
    return BoundReport.compare_log(
        "lemma4", T, 4 * k * math.log(k) + base, strict=True, k=k, K=K, L=L, count=T,
        structural_ratio=math.exp(math.log(T) - base) if T else 0.0)


def lemma5_bound_report(query: AlmostPrimeQuery) -> BoundReport:
    k, K, L, m = query.k, query.K, query.L, query.m
    J = count_J2k_KL(query)
    KL = K * L
    core = (Fraction(KL ** (2 * k - 1), m) + 1) * KL**k
    return BoundReport.compare(
        "lemma5", J, k ** (4 * k) * core, strict=True, k=k, K=K, L=L, m=m, count=J,
        structural_ratio=float(Fraction(J) / core))
