"""Prime tables, primes in progressions, smooth numbers and the set G of large-factor integers."""
from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath
import numpy as np

from . import kernels
from .errors import BadParameters, BudgetExceeded
from .report import BoundReport
from .residue import euler_phi, factorize

PRIME_LIMIT = 10**9
PSI_LIMIT = 10**8
TABLE_LIMIT = 1 << 24
GSET_LIMIT = 10**7
_SEGMENT = 1 << 22


@dataclass(frozen=True)
class PrimeTable:
    limit: int
    primes: np.ndarray

    def __len__(self) -> int:
        return len(self.primes)

    def __contains__(self, n: int) -> bool:
        i = np.searchsorted(self.primes, n)
        return bool(i < len(self.primes) and self.primes[i] == n)

    def count_upto(self, x: int) -> int:
        return int(np.searchsorted(self.primes, x, side="right"))


def _simple_sieve(n: int) -> np.ndarray:
    if n < 2:
        return np.zeros(0, dtype=np.int64)
    flags = np.ones(n + 1, dtype=bool)
    flags[:2] = False
    flags[4::2] = False
    for p in range(3, math.isqrt(n) + 1, 2):
        if flags[p]:
            flags[p * p::2 * p] = False
    return np.flatnonzero(flags).astype(np.int64)


def _segmented_sieve(n: int) -> np.ndarray:
    base = _simple_sieve(math.isqrt(n))
    chunks = [base]
    lo = len(base) and int(base[-1]) + 1
    lo = max(lo, 2)
    while lo <= n:
        hi = min(n + 1, lo + _SEGMENT)
        flags = np.ones(hi - lo, dtype=bool)
        for p in base.tolist():
            if p * p >= hi:
                break
            start = max(p * p, -(-lo // p) * p)
            flags[start - lo::p] = False
        chunks.append(np.flatnonzero(flags).astype(np.int64) + lo)
        lo = hi
    return np.concatenate(chunks)


_prime_cache: dict[str, np.ndarray] = {}


def primes_up_to(x: int) -> PrimeTable:
    """All primes <= x, sliced from a cached table that grows geometrically."""
    x = int(x)
    if x > PRIME_LIMIT:
        raise BudgetExceeded(f"prime table limit {PRIME_LIMIT} exceeded by {x}")
    table = _prime_cache.get("primes")
    limit = _prime_cache.get("limit", 0)
    if table is None or limit < x:
        target = min(PRIME_LIMIT, max(1 << 16, 1 << max(0, x - 1).bit_length()))
        table = _simple_sieve(target) if target <= 2 * 10**7 else _segmented_sieve(target)
        table.flags.writeable = False
        _prime_cache.update(primes=table, limit=target)
    return PrimeTable(x, table[: int(np.searchsorted(table, x, side="right"))])


def prime_count_ap(x: int, q: int, a: int) -> int:
    """pi(x; q, a): primes p <= x with p = a (mod q)."""
    if q < 1:
        raise BadParameters(f"q must be >= 1, got {q}")
    if math.gcd(a, q) != 1:
        raise BadParameters(f"gcd(a={a}, q={q}) must be 1")
    ps = primes_up_to(x).primes
    return int(np.count_nonzero(ps % q == a % q))


def bt_ratio(x: int, q: int, a: int) -> BoundReport:
    """Empirical Brun-Titchmarsh constant pi(x;q,a) phi(q) log(x/q) / x, against 2."""
    if not 1 <= q < x:
        raise BadParameters(f"need 1 <= q < x, got q={q}, x={x}")
    count = prime_count_ap(x, q, a)
    c = count * euler_phi(q) * math.log(x / q) / x
    return BoundReport.compare("bt_ratio", c, 2.0, strict=True, x=x, q=q, a=a,
                               count=count, theta=math.log(q) / math.log(x))


# -- smooth numbers ----------------------------------------------------------

_factor_cache: dict[str, np.ndarray] = {}


def _tables(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Smallest- and largest-prime-factor tables covering [0, n]."""
    spf = _factor_cache.get("spf")
    if spf is None or len(spf) <= n:
        size = min(max(1 << 16, 1 << n.bit_length()), max(TABLE_LIMIT, n + 1))
        spf = kernels.spf_sieve(size)
        lpf = kernels.lpf_from_spf(spf)
        spf.flags.writeable = False
        lpf.flags.writeable = False
        _factor_cache.update(spf=spf, lpf=lpf)
    return _factor_cache["spf"], _factor_cache["lpf"]


def largest_prime_factors(n: int) -> np.ndarray:
    """P(x) for x in [0, n] (P(1) = 1, P(0) = 0)."""
    return _tables(n)[1][: n + 1]


def psi(x: float, y: float) -> int:
    """Psi(x, y): positive integers <= x with no prime factor > y (1 included)."""
    X, Y = math.floor(x), math.floor(y)
    if X > PSI_LIMIT:
        raise BudgetExceeded(f"psi limited to x <= {PSI_LIMIT}, got {X}")
    if X < 1:
        return 0
    if Y >= X:
        return X
    if Y < 2:
        return 1
    if X < TABLE_LIMIT:
        lpf = _tables(X)[1]
        return int(np.count_nonzero(lpf[1:X + 1] <= Y))
    lim = math.isqrt(X)
    ps = primes_up_to(min(Y, lim)).primes
    total = 0
    for lo in range(1, X + 1, _SEGMENT):
        hi = min(X + 1, lo + _SEGMENT)
        total += kernels.smooth_count(lo, hi, ps, Y, math.isqrt(hi - 1))
    return total


def psi_cumulative(xmax: int, y: float) -> np.ndarray:
    """Array c with c[x] = Psi(x, y) for 0 <= x <= xmax."""
    lpf = largest_prime_factors(xmax).copy()
    smooth = (lpf <= math.floor(y)) & (np.arange(xmax + 1) >= 1)
    return np.cumsum(smooth)


def debruijn_report(x: float, y: float) -> BoundReport:
    """Psi(x, y)/x next to u^-u with u = log x / log y; informational only."""
    if x < 2 or y < 2:
        raise BadParameters("need x >= 2 and y >= 2")
    u = math.log(x) / math.log(y)
    lhs = psi(x, y) / x
    loglog = math.log(math.log(x))
    return BoundReport.compare(
        "debruijn", lhs, u ** (-u), x=x, y=y, u=u, trivial_regime=u <= 1,
        delta=(math.log(y) / loglog - 1) if loglog > 0 else math.inf)


@dataclass(frozen=True)
class FactorProfile:
    x: int
    r: int
    factors_desc: tuple[int, ...]
    top: tuple[int, ...]
    cofactor: int
    short: bool

    @property
    def P(self) -> int:
        return self.factors_desc[0] if self.factors_desc else 1

    @property
    def cofactor_P(self) -> int:
        rest = self.factors_desc[len(self.top):]
        return rest[0] if rest else 1


def factor_profile(x: int, r: int) -> FactorProfile:
    """x = p_1 ... p_r * y with p_1 >= ... >= p_r (multiplicity counted) and P(y) <= p_r."""
    if x < 2 or r < 1:
        raise BadParameters("need x >= 2 and r >= 1")
    desc = tuple(p for p, e in reversed(factorize(x).prime_powers) for _ in range(e))
    top = desc[:r]
    return FactorProfile(x, r, desc, top, x // math.prod(top), len(desc) < r)


# -- the set G ---------------------------------------------------------------

@dataclass(frozen=True)
class GSetParams:
    N: int
    r: int
    alpha: float
    beta: float
    beta1: float | None = None

    def __post_init__(self):
        if self.N < 3 or self.r < 1:
            raise BadParameters("need N >= 3 and r >= 1")
        if not 0 < self.alpha <= 0.1:
            raise BadParameters(f"alpha must lie in (0, 0.1], got {self.alpha}")
        if not 0 < self.beta < self.alpha:
            raise BadParameters(f"beta must lie in (0, alpha), got {self.beta}")
        if self.beta1 is None:
            b1 = self.beta * math.log(math.log(self.N))
            if not self.beta < b1 < 0.1:
                b1 = (self.beta + 0.1) / 2
            object.__setattr__(self, "beta1", b1)
        elif not self.beta < self.beta1 < 0.1:
            raise BadParameters(f"beta1 must lie in (beta, 0.1), got {self.beta1}")

    @property
    def in_window(self) -> bool:
        return 0.1 > self.alpha > self.beta > 1 / math.log(self.N)


@dataclass(frozen=True)
class GSetResult:
    params: GSetParams
    size: int
    complement: int
    few_factors: int
    p1_small: int
    pr_small: int
    product_large: int
    head_large: int
    pr_small_head_small: int
    psi_N_alpha: int
    union_matches: bool

    @property
    def complement_terms(self) -> int:
        return self.few_factors + self.p1_small + self.pr_small + self.product_large


def _power_bounds(N: int, e: float) -> tuple[int, int]:
    """(ceil(N^e), floor(N^e)), exact unless N^e lies within 1e-40 of an integer."""
    with mpmath.workdps(60):
        t = mpmath.power(N, mpmath.mpf(e))
        near = mpmath.nint(t)
        if abs(t - near) < mpmath.mpf("1e-40"):
            return int(near), int(near)
        return int(mpmath.ceil(t)), int(mpmath.floor(t))


def g_set(params: GSetParams) -> GSetResult:
    """Count G = {x < N : p_1 >= N^a, p_r >= N^b, p_1...p_r < N^(1-b)} and its complement pieces."""
    N, r = params.N, params.r
    if N > GSET_LIMIT:
        raise BudgetExceeded(f"g_set limited to N <= {GSET_LIMIT}")
    spf, lpf = _tables(N)
    omega, p1, pr, prod_r, prod_head = kernels.top_factors(spf, N, r)
    sl = slice(1, N)
    omega, p1, pr, prod_r, prod_head = (a[sl] for a in (omega, p1, pr, prod_r, prod_head))
    big = lpf[sl]
    t_alpha, _ = _power_bounds(N, params.alpha)
    t_beta, _ = _power_bounds(N, params.beta)
    t_prod, _ = _power_bounds(N, 1 - params.beta)
    _, f_head = _power_bounds(N, 1 - params.beta1)

    enough = omega >= r
    few = ~enough
    p1_small = big < t_alpha
    pr_small = enough & (pr < t_beta)
    product_large = enough & (prod_r >= t_prod)
    member = enough & (p1 >= t_alpha) & (pr >= t_beta) & (prod_r < t_prod)
    size = int(np.count_nonzero(member))
    union = few | p1_small | pr_small | product_large
    return GSetResult(
        params=params,
        size=size,
        complement=(N - 1) - size,
        few_factors=int(np.count_nonzero(few)),
        p1_small=int(np.count_nonzero(p1_small)),
        pr_small=int(np.count_nonzero(pr_small)),
        product_large=int(np.count_nonzero(product_large)),
        head_large=int(np.count_nonzero(enough & (prod_head > f_head))),
        pr_small_head_small=int(np.count_nonzero(pr_small & (prod_head <= f_head))),
        psi_N_alpha=psi(N, N**params.alpha),
        union_matches=bool(np.array_equal(union, ~member)),
    )
