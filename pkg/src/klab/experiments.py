"""Experiment registry: each experiment maps one parameter point to a list of bound reports.

Every report label an experiment can emit is declared up front as either a
hard check (a failure means a bug or a false statement) or a measurement
(an empirical ratio for an asymptotic statement, never a failure).
"""
from __future__ import annotations

import itertools
import json
import math
import time
import zlib
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Any, Callable

import numpy as np

from . import energy, expsums, lattice, sieve
from .errors import BadParameters, WitnessViolation
from .report import BoundReport
from .reporting import make_row
from .residue import factorize, is_prime

HARD, MEASUREMENT = "hard", "measurement"
REQUIRED = object()


class ConfigError(ValueError):
    """A malformed or inconsistent experiment configuration (exit status 2)."""


@dataclass(frozen=True)
class Param:
    kind: type
    default: Any = REQUIRED
    help: str = ""


@dataclass(frozen=True)
class Experiment:
    name: str
    params: dict[str, Param]
    run: Callable[[dict, np.random.Generator], list[BoundReport]]
    hard: frozenset[str] = frozenset()
    measurements: frozenset[str] = frozenset()
    description: str = ""

    def kind_of(self, label: str) -> str:
        if label in self.hard:
            return HARD
        if label in self.measurements:
            return MEASUREMENT
        raise KeyError(f"experiment {self.name!r} emitted undeclared check {label!r}")


REGISTRY: dict[str, Experiment] = {}


def register(name: str, params: dict[str, Param], hard=(), measurements=(), description=""):
    def wrap(fn):
        REGISTRY[name] = Experiment(name, params, fn, frozenset(hard), frozenset(measurements),
                                    description or (fn.__doc__ or "").strip().splitlines()[0])
        return fn
    return wrap


def equality(label: str, lhs, rhs, **params) -> BoundReport:
    """A report whose verdict is exact equality of two counts."""
    ratio = float(Fraction(lhs) / Fraction(rhs)) if rhs else (1.0 if lhs == rhs else math.inf)
    return BoundReport(label, float(lhs), float(rhs), ratio, lhs == rhs,
                       {**params, "tolerance": 0.0, "strict": False, "relation": "=="})


def _units(m: int) -> np.ndarray:
    r = np.arange(1, m, dtype=np.int64) if m > 1 else np.zeros(0, dtype=np.int64)
    return r[np.gcd(r, m) == 1] if m > 2 else np.ones(1, dtype=np.int64)


# -- exponential sums --------------------------------------------------------

@register("mu-identity", {"m": Param(int, help="modulus")}, hard=["mu_identity"])
def _mu_identity(p, rng):
    """Complete Ramanujan-type sum of e_m(a n^-1) equals mu(m) for every unit a."""
    return [expsums.mu_identity_check(p["m"])]


@register("weil", {"m": Param(int), "pairs": Param(int, 20, "seeded (a, b) unit pairs per m")},
          hard=["weil"])
def _weil(p, rng):
    """Complete Kloosterman sums against tau(m) sqrt(m)."""
    m = p["m"]
    units = _units(m)
    a = rng.choice(units, size=p["pairs"])
    b = rng.choice(units, size=p["pairs"])
    return [expsums.weil_bound_check(int(x), int(y), m) for x, y in zip(a, b)]


@register("bilinear", {"N1": Param(int), "N2": Param(int), "k1": Param(int, 1), "k2": Param(int, 1),
                       "a": Param(int, 1), "m": Param(int),
                       "coeffs": Param(str, "ones", "ones, signs or unimodular"),
                       "chain": Param(bool, False, "also check the energy inequality chain")},
          measurements=["theorem3"])
def _bilinear(p, rng):
    """Bilinear Kloosterman sums against the explicit bilinear bound."""
    def coeffs(n):
        kind = p["coeffs"]
        if kind == "ones":
            return expsums.CoefficientVector.ones(n)
        if kind == "signs":
            return expsums.CoefficientVector.random_signs(n, rng)
        if kind == "unimodular":
            return expsums.CoefficientVector.random_unimodular(n, rng)
        raise BadParameters(f"unknown coefficient family {kind!r}")
    return [expsums.theorem3_bound_check(p["N1"], p["N2"], p["k1"], p["k2"], p["a"], p["m"],
                                         coeffs(p["N1"]), coeffs(p["N2"]), energy_chain=p["chain"])]


def _random_subset(rng, q: int, size: int) -> list[int]:
    units = _units(q)
    return sorted(rng.choice(units, size=min(size, len(units)), replace=False).tolist())


@register("multilinear", {"q": Param(int), "k": Param(int, 3), "size": Param(int, 20)},
          measurements=["multilinear_decay"])
def _multilinear(p, rng):
    """Largest multilinear sum over random unit sets, against the trivial bound."""
    sets = [_random_subset(rng, p["q"], p["size"]) for _ in range(p["k"])]
    return [expsums.multilinear_decay_scan(sets, p["q"])]


@register("fiber", {"q": Param(int), "size": Param(int, 100), "gamma": Param(float, 0.5),
                    "eps": Param(float, 0.25)},
          measurements=["fiber_condition"])
def _fiber(p, rng):
    """Largest residue-class fiber of a random unit set modulo the large divisors of q."""
    A = _random_subset(rng, p["q"], p["size"])
    return expsums.fiber_condition_check(A, p["q"], p["gamma"], p["eps"])


@register("short-sum", {"m": Param(int), "N": Param(int, 0, "sum length; 0 means floor(m^Nexp)"),
                        "Nexp": Param(float, 0.6)},
          measurements=["short_sum"])
def _short_sum(p, rng):
    """Maximal short sum of e_m(a n^-1) over units a, against N / sqrt(log m)."""
    return [short_sum_scan(p["N"] or math.floor(p["m"] ** p["Nexp"]), [p["m"]])[0]]


def short_sum_scan(N: int, m_range) -> list[BoundReport]:
    """One short-sum report per modulus in ``m_range``."""
    return [expsums.short_sum_max(N, m) for m in m_range]


# -- energies ----------------------------------------------------------------

@register("energy", {"k": Param(int), "N": Param(int), "m": Param(int),
                     "restriction": Param(str, "all", "all or primes"),
                     "oracle": Param(bool, False, "add brute-force columns")},
          hard=["theorem1", "theorem2", "parseval", "energy_oracle"])
def _energy(p, rng):
    """Reciprocal energy J_2k with its bounds, Parseval identity and optional brute force."""
    q = energy.EnergyQuery(p["k"], p["N"], p["m"], p["restriction"])
    J = energy.count_J2k(q, profile=True)
    out = [energy.theorem1_bound_report(q), energy.theorem2_bound_report(q),
           equality("parseval", sum(c * c for c in J.lambda_profile.values()), J.count)]
    if p["oracle"]:
        brute = energy.count_J2k_bruteforce(q).count
        out.append(equality("energy_oracle", J.count, brute, J_mitm=J.count, J_bruteforce=brute))
    return out


@register("rational-energy", {"k": Param(int), "N": Param(int), "oracle": Param(bool, False)},
          hard=["lemma3", "rational_oracle"])
def _rational(p, rng):
    """Energy of unit fractions 1/x, x <= N, over the rationals."""
    out = [energy.lemma3_bound_report(p["k"], p["N"])]
    if p["oracle"]:
        fast = energy.count_rational_energy(p["k"], p["N"])
        brute = energy.unit_fraction_bruteforce(list(range(1, p["N"] + 1)), p["k"])
        out.append(equality("rational_oracle", fast, brute, fast=fast, bruteforce=brute))
    return out


@register("almost-prime", {"k": Param(int), "K": Param(int), "L": Param(int),
                           "m": Param(int, 101), "oracle": Param(bool, False)},
          hard=["T2k_oracle", "J2k_KL_oracle"], measurements=["lemma4", "lemma5"])
def _almost_prime(p, rng):
    """Energies of the products p*q (K/2 < p < K, q < L), rational and modular."""
    q = energy.AlmostPrimeQuery(p["k"], p["K"], p["L"], p["m"])
    out = [energy.lemma4_bound_report(q), energy.lemma5_bound_report(q)]
    if p["oracle"]:
        T, J = energy.count_T2k(q), energy.count_J2k_KL(q)
        Tb = energy.almost_prime_bruteforce(q, modular=False)
        Jb = energy.almost_prime_bruteforce(q, modular=True)
        out += [equality("T2k_oracle", T, Tb, fast=T, bruteforce=Tb),
                equality("J2k_KL_oracle", J, Jb, fast=J, bruteforce=Jb)]
    return out


# -- lattices ----------------------------------------------------------------

def _fraction(text: str, default: Fraction) -> Fraction:
    if text in ("", "auto"):
        return default
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise BadParameters(f"not a rational number: {text!r}") from None


@register("lattice", {"m": Param(int), "lam": Param(int, -1, "-1 means every lambda in [0, m)"),
                      "A": Param(str, "auto", "rational; auto means ceil(sqrt(m))"),
                      "B": Param(str, "auto"),
                      "oracle": Param(bool, True, "compare with exhaustive minima (m <= 500)")},
          hard=["lemma2", "corollary2", "minkowski", "minima_oracle"])
def _lattice(p, rng):
    """Point counts and successive minima of the reciprocal lattices in a box."""
    m = p["m"]
    side = Fraction(math.isqrt(m - 1) + 1)
    box = lattice.Box(_fraction(p["A"], side), _fraction(p["B"], side))
    lams = range(m) if p["lam"] < 0 else [p["lam"]]
    out = []
    for lam in lams:
        lat = lattice.ReciprocalLattice(lam, m)
        mp = lattice.successive_minima(lat, box)
        out += [lattice.lemma2_check(lat, box, mp), lattice.corollary2_check(lat, box, mp),
                lattice.minkowski_check(lat, box, mp)]
        if p["oracle"] and m <= 500:
            ex = lattice.successive_minima_exhaustive(lat, box)
            same = (mp.mu1, mp.mu2) == (ex.mu1, ex.mu2)
            out.append(BoundReport("minima_oracle", float(mp.mu2), float(ex.mu2),
                                   float(mp.mu2 / ex.mu2), same,
                                   {"lam": lam, "mu1": mp.mu1, "mu2": mp.mu2,
                                    "mu1_exhaustive": ex.mu1, "mu2_exhaustive": ex.mu2,
                                    "tolerance": 0.0, "strict": False, "relation": "=="}))
    return out


@register("omega", {"k": Param(int), "N": Param(int), "m": Param(int)},
          hard=["omega_mu1", "case1", "case1_det", "case2", "embedding"])
def _omega(p, rng):
    """Partition of lambda by the second minimum and the two structural cases."""
    k, N, m = p["k"], p["N"], p["m"]
    part = lattice.omega_partition(k, N, m)
    omega = sorted(part.minima)
    worst = max((part.minima[lam].mu1 for lam in omega), default=Fraction(0))
    counts = {c.value: n for c, n in part.counts.items()}
    out = [BoundReport.compare("omega_mu1", worst, 1, violations=len(part.mu1_violations),
                               omega=len(omega), J0=part.J0, small_regime=part.small_regime,
                               **counts)]
    for lam in part.members(lattice.LambdaClass.OMEGA_PRIME):
        rep = lattice.case1_bound_check(lam, k, N, m)
        out.append(rep)
        det = rep.params["det"]
        out.append(BoundReport("case1_det", float(det), float(m), det / m, det >= m,
                               {"lam": lam, "tolerance": 0.0, "strict": False, "relation": ">="}))
    for lam in part.members(lattice.LambdaClass.OMEGA_DOUBLE_PRIME):
        try:
            value = lattice.case2_rational_witness(lam, k, N, m)
            out.append(equality("case2", 1, 1, lam=lam, lam_hat=value))
        except WitnessViolation as exc:
            out.append(equality("case2", 2, 1, lam=lam, lam_hat=str(exc)))
    failures = sum(len(lattice.embedding_failures(lam, k, N, m)) for lam in omega)
    out.append(equality("embedding", failures, 0, omega=len(omega)))
    return out


# -- sieve side --------------------------------------------------------------

@lru_cache(maxsize=4)
def _largest_factor_bruteforce(x: int) -> tuple[int, ...]:
    """P(n) for 0 <= n <= x by individual factorization (P(0) = 0, P(1) = 1)."""
    if x > 10**5:
        raise BadParameters(f"brute-force psi limited to x <= 10^5, got {x}")
    return (0, 1) + tuple(factorize(n).primes[-1] for n in range(2, x + 1))


def _previous_prime(p: int) -> int:
    return max((q for q in range(2, p) if is_prime(q)), default=1)


@register("psi", {"x": Param(int), "y": Param(int), "oracle": Param(bool, False)},
          hard=["psi_oracle", "buchstab"], measurements=["debruijn"])
def _psi(p, rng):
    """Smooth-number counts against u^-u, with brute-force and Buchstab cross-checks."""
    x, y = p["x"], p["y"]
    out = [sieve.debruijn_report(x, y)]
    if p["oracle"]:
        P = _largest_factor_bruteforce(x)
        brute = sum(1 for n in range(1, x + 1) if P[n] <= y)
        fast = sieve.psi(x, y)
        out.append(equality("psi_oracle", fast, brute, psi=fast, bruteforce=brute))
        if is_prime(y):
            q = _previous_prime(y)
            c_y = sieve.psi_cumulative(x, y)
            c_q = sieve.psi_cumulative(x, q)
            n = np.arange(x + 1)
            bad = int(np.count_nonzero(c_y != c_q + c_y[n // y]))
            out.append(equality("buchstab", bad, 0, previous_prime=q))
    return out


@register("bt", {"x": Param(int), "q": Param(int), "a": Param(int, 1), "oracle": Param(bool, False)},
          hard=["ap_partition"], measurements=["bt_ratio"])
def _bt(p, rng):
    """Empirical Brun-Titchmarsh constant, with the residue-class partition of primes."""
    x, q = p["x"], p["q"]
    out = [sieve.bt_ratio(x, q, p["a"])]
    if p["oracle"]:
        total = sum(sieve.prime_count_ap(x, q, a) for a in range(q) if math.gcd(a, q) == 1)
        table = sieve.primes_up_to(x)
        dividing = sum(1 for r in factorize(q).primes if r <= x)
        out.append(equality("ap_partition", total, len(table) - dividing, q=q))
    return out


@register("gset", {"N": Param(int), "r": Param(int, 2), "alpha": Param(float, 0.1),
                   "beta": Param(float, 0.02), "beta1": Param(float, 0.0, "0 means default"),
                   "oracle": Param(bool, False, "recount every piece by per-x factorization")},
          hard=["gset_partition", "gset_union", "gset_recount"])
def _gset(p, rng):
    """Size of the large-factor set G and the pieces of its complement."""
    params = sieve.GSetParams(p["N"], p["r"], p["alpha"], p["beta"], p["beta1"] or None)
    g = sieve.g_set(params)
    info = dict(size=g.size, complement=g.complement, few_factors=g.few_factors,
                p1_small=g.p1_small, pr_small=g.pr_small, product_large=g.product_large,
                head_large=g.head_large, pr_small_head_small=g.pr_small_head_small,
                psi_N_alpha=g.psi_N_alpha, beta1=params.beta1,
                in_window=params.in_window)
    out = [equality("gset_partition", g.size + g.complement, params.N - 1, **info),
           BoundReport("gset_union", float(g.complement), float(g.complement_terms),
                       g.complement / g.complement_terms if g.complement_terms else 0.0,
                       g.complement <= g.complement_terms and g.union_matches,
                       {"union_matches": g.union_matches, "tolerance": 0.0, "strict": False})]
    if p["oracle"]:
        ref = gset_bruteforce(params)
        mism = [k for k, v in ref.items() if getattr(g, k) != v]
        out.append(equality("gset_recount", len(mism), 0, mismatched=",".join(mism)))
    return out


def gset_bruteforce(params: sieve.GSetParams) -> dict[str, int]:
    """The G-set counts recomputed from individual factor profiles."""
    N, r = params.N, params.r
    if N > 10**5:
        raise BadParameters("brute-force G recount limited to N <= 10^5")
    counts = dict(size=0, few_factors=0, p1_small=0, pr_small=0, product_large=0)
    for x in range(1, N):
        if x == 1:
            counts["few_factors"] += 1
            counts["p1_small"] += 1
            continue
        prof = sieve.factor_profile(x, r)
        few = prof.short
        p1_small = _below_power(prof.P, N, params.alpha)
        pr_small = not few and _below_power(prof.top[-1], N, params.beta)
        prod_large = not few and not _below_power(math.prod(prof.top), N, 1 - params.beta)
        counts["few_factors"] += few
        counts["p1_small"] += p1_small
        counts["pr_small"] += pr_small
        counts["product_large"] += prod_large
        counts["size"] += not (few or p1_small or pr_small or prod_large)
    counts["complement"] = (N - 1) - counts["size"]
    return counts


def _below_power(n: int, N: int, e: float) -> bool:
    """n < N^e decided with exact integer powers: n^q < N^p for e = p/q read as a decimal."""
    f = Fraction(repr(e))
    return n**f.denominator < N**f.numerator


# -- sweeps ------------------------------------------------------------------

SECTIONS: dict[str, list[tuple[str, dict[str, list]]]] = {
    "mu": [("mu-identity", {"m": list(range(2, 301))})],
    "weil": [("weil", {"m": list(range(2, 1001)), "pairs": [20]})],
    "energy": [("energy", {"k": [1, 2], "N": [10, 20, 25], "m": [97, 100, 101, 194],
                           "restriction": ["all", "primes"], "oracle": [True]})],
    "rational": [("rational-energy", {"k": [2], "N": [30], "oracle": [True]}),
                 ("almost-prime", {"k": [1, 2], "K": [21, 25, 30], "L": [4, 8, 10],
                                   "m": [101, 10007], "oracle": [True]}),
                 ("almost-prime", {"k": [2], "K": [20], "L": [8], "m": [101], "oracle": [True]})],
    "lattice": [("lattice", {"m": [97, 360], "oracle": [True]})],
    "omega": [("omega", {"k": [2], "N": [8], "m": [1009]})],
    "sieve": [("psi", {"x": [10**4], "y": [int(v) for v in sieve.primes_up_to(100).primes],
                       "oracle": [True]}),
              ("psi", {"x": [10], "y": [2], "oracle": [True]}),
              ("bt", {"x": [10**6], "q": list(range(1, 51)), "oracle": [True]})],
    "gset": [("gset", {"N": [10**4], "r": [2], "alpha": [0.1], "beta": [0.02], "oracle": [True]})],
}


@dataclass(frozen=True)
class Job:
    experiment: str
    point: dict
    seed: int
    section: str | None = None


def expand(name: str, values: dict[str, list], seed: int = 0, section: str | None = None) -> list[Job]:
    """Cartesian product of the given value lists, in declared parameter order."""
    exp = REGISTRY.get(name)
    if exp is None:
        raise ConfigError(f"unknown experiment {name!r}; choose from {', '.join(sorted(REGISTRY))}")
    unknown = set(values) - set(exp.params)
    if unknown:
        raise ConfigError(f"experiment {name!r} has no parameter(s) {', '.join(sorted(unknown))}")
    axes = []
    for key, param in exp.params.items():
        if key in values:
            vals = list(values[key])
            if not vals:
                raise ConfigError(f"--{key}: empty value list")
        elif param.default is REQUIRED:
            raise ConfigError(f"experiment {name!r} needs --{key}")
        else:
            vals = [param.default]
        axes.append([(key, v) for v in vals])
    return [Job(name, dict(combo), seed, section) for combo in itertools.product(*axes)]


def verify_all_jobs(seed: int = 0, only: list[str] | None = None) -> list[Job]:
    names = only or list(SECTIONS)
    bad = [n for n in names if n not in SECTIONS]
    if bad:
        raise ConfigError(f"unknown verify-all section(s) {', '.join(bad)}; choose from {', '.join(SECTIONS)}")
    jobs = []
    for sec in names:
        for exp, values in SECTIONS[sec]:
            jobs += expand(exp, values, seed, sec)
    return jobs


def point_rng(seed: int, point: dict) -> np.random.Generator:
    """Generator determined by the seed and the parameter point alone (not by job order)."""
    key = zlib.crc32(json.dumps(point, sort_keys=True, default=str).encode())
    return np.random.default_rng([seed, key])


def run_job(job: Job) -> list[dict]:
    exp = REGISTRY[job.experiment]
    start = time.perf_counter()
    reports = exp.run(job.point, point_rng(job.seed, job.point))
    ms = 1000.0 * (time.perf_counter() - start)
    point = {**job.point, "seed": job.seed}
    if job.section is not None:
        point["section"] = job.section
    return [make_row(job.experiment, rep, point, exp.kind_of(rep.label), ms) for rep in reports]


def failing_hard_rows(rows: list[dict]) -> list[dict]:
    return [r for r in rows if r["param_kind"] == HARD and not r["holds"]]


def verify_all(seed: int = 0, only: list[str] | None = None) -> int:
    """Run the acceptance sweeps serially; 0 if every hard check holds, else 1."""
    rows = [row for job in verify_all_jobs(seed, only) for row in run_job(job)]
    return 1 if failing_hard_rows(rows) else 0


__all__ = ["REGISTRY", "SECTIONS", "ConfigError", "Experiment", "Job", "Param", "expand",
           "failing_hard_rows", "run_job", "short_sum_scan", "verify_all", "verify_all_jobs"]
