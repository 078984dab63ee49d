"""Exact modular arithmetic and the classical arithmetic functions.

Everything here works on Python integers, so products of residues are exact
for any modulus up to the supported cap of 2**62. Bulk inversion hands off to
the kernels when the modulus is small enough for 64-bit products.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable

import numpy as np

from . import kernels
from .errors import BadParameters, NotInvertible

MAX_MODULUS = 1 << 62
TRIAL_LIMIT = 10**7
_SMALL_TRIAL = 1000


@dataclass(frozen=True)
class Modulus:
    m: int

    def __post_init__(self):
        if isinstance(self.m, bool) or not isinstance(self.m, (int, np.integer)):
            raise BadParameters(f"modulus must be an integer, got {self.m!r}")
        object.__setattr__(self, "m", int(self.m))
        if self.m < 2:
            raise BadParameters(f"modulus must be >= 2, got {self.m}")
        if self.m > MAX_MODULUS:
            raise BadParameters(f"modulus {self.m} exceeds the supported cap 2**62")

    def __int__(self) -> int:
        return self.m

    def __index__(self) -> int:
        return self.m


def as_modulus(m: int | Modulus) -> int:
    """Validate ``m`` and return it as a plain int."""
    if isinstance(m, Modulus):
        return m.m
    return Modulus(m).m


class UnitResidue(int):
    """An invertible residue in [1, m-1]; behaves as the int it wraps."""

    modulus: int

    def __new__(cls, value: int, modulus: int | Modulus):
        m = as_modulus(modulus)
        value = int(value) % m
        if math.gcd(value, m) != 1:
            raise NotInvertible(f"{value} is not a unit modulo {m}")
        obj = super().__new__(cls, value)
        obj.modulus = m
        return obj

    def __repr__(self) -> str:
        return f"UnitResidue({int(self)}, m={self.modulus})"

    def inverse(self) -> "UnitResidue":
        return mod_inv(int(self), self.modulus)


@dataclass(frozen=True)
class Factorization:
    n: int
    prime_powers: tuple[tuple[int, int], ...]

    def __iter__(self):
        return iter(self.prime_powers)

    def __len__(self) -> int:
        return len(self.prime_powers)

    @property
    def primes(self) -> list[int]:
        return [p for p, _ in self.prime_powers]

    def value(self) -> int:
        out = 1
        for p, e in self.prime_powers:
            out *= p**e
        return out

    def divisors(self) -> list[int]:
        divs = [1]
        for p, e in self.prime_powers:
            divs = [d * p**j for d in divs for j in range(e + 1)]
        return sorted(divs)


def mod_inv(x: int, m: int | Modulus) -> UnitResidue:
    """Multiplicative inverse of ``x`` modulo ``m`` by the extended Euclidean algorithm."""
    mm = as_modulus(m)
    r0, r1 = mm, int(x) % mm
    t0, t1 = 0, 1
    while r1:
        q = r0 // r1
        r0, r1 = r1, r0 - q * r1
        t0, t1 = t1, t0 - q * t1
    if r0 != 1:
        raise NotInvertible(f"gcd({x}, {mm}) = {r0}; no inverse")
    return UnitResidue(t0, mm)


def batch_inverses(M: int, N: int, m: int | Modulus) -> list[tuple[int, int]]:
    """Pairs ``(x, x*)`` for every x in [M+1, M+N] coprime to ``m``, in increasing x."""
    xs, invs = batch_inverse_arrays(M, N, m)
    return list(zip(xs.tolist(), invs.tolist()))


def batch_inverse_arrays(M: int, N: int, m: int | Modulus) -> tuple[np.ndarray, np.ndarray]:
    """Array form of :func:`batch_inverses`: (coprime x values, their inverses)."""
    mm = as_modulus(m)
    if N < 0:
        raise BadParameters(f"interval length must be >= 0, got {N}")
    if N == 0:
        empty = np.zeros(0, dtype=np.int64)
        return empty, empty.copy()
    if mm > kernels.KERNEL_MAX_MODULUS or abs(M) + N >= 1 << 62:
        xs = [x for x in range(M + 1, M + N + 1) if math.gcd(x, mm) == 1]
        return _as_int_array(xs), _as_int_array(_inverse_list([x % mm for x in xs], mm))
    xs = np.arange(M + 1, M + N + 1, dtype=np.int64)
    xs = xs[np.gcd(xs, mm) == 1]
    invs = kernels.batch_inverse(xs % mm, mm)
    return xs, invs


def inverses_of(values: Iterable[int], m: int | Modulus) -> np.ndarray:
    """Inverses of already-coprime values; raises NotInvertible on the first non-unit."""
    mm = as_modulus(m)
    vals = [int(v) % mm for v in values]
    if mm > kernels.KERNEL_MAX_MODULUS:
        return _as_int_array(_inverse_list(vals, mm))
    out = kernels.batch_inverse(np.asarray(vals, dtype=np.int64), mm)
    if (out < 0).any():
        bad = vals[int(np.flatnonzero(out < 0)[0])]
        raise NotInvertible(f"{bad} is not a unit modulo {mm}")
    return out


def _inverse_list(vals: list[int], m: int) -> list[int]:
    # Montgomery's trick on Python ints
    if not vals:
        return []
    prefix = []
    acc = 1
    for v in vals:
        acc = acc * v % m
        prefix.append(acc)
    try:
        inv = pow(acc, -1, m)
    except ValueError:
        return [int(mod_inv(v, m)) for v in vals]
    out = [0] * len(vals)
    for i in range(len(vals) - 1, 0, -1):
        out[i] = inv * prefix[i - 1] % m
        inv = inv * vals[i] % m
    out[0] = inv
    return out


def _as_int_array(values: list[int]) -> np.ndarray:
    if values and max(values) >= 1 << 63:
        return np.array(values, dtype=object)
    return np.array(values, dtype=np.int64)


# -- primality and factoring -------------------------------------------------

_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, exact for every n < 3.3e24."""
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _pollard_brent(n: int) -> int:
    if n % 2 == 0:
        return 2
    for c in range(1, 200):
        y, r, q, g = 2, 1, 1, 1
        x = ys = 2
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(128, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = math.gcd(q, n)
                k += 128
            r *= 2
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = math.gcd(abs(x - ys), n)
        if g != n:
            return g
    raise ArithmeticError(f"Pollard rho failed on {n}")


def _split(n: int, out: dict[int, int]) -> None:
    if n == 1:
        return
    if is_prime(n):
        out[n] = out.get(n, 0) + 1
        return
    d = _pollard_brent(n)
    _split(d, out)
    _split(n // d, out)


@lru_cache(maxsize=65536)
def factorize(n: int) -> Factorization:
    """Exact prime factorization of ``1 <= n <= 2**62``."""
    n = int(n)
    if n < 1:
        raise BadParameters(f"factorize needs n >= 1, got {n}")
    if n > MAX_MODULUS:
        raise BadParameters(f"{n} exceeds the supported cap 2**62")
    found: dict[int, int] = {}
    rest = n
    p = 2
    while p <= _SMALL_TRIAL and p * p <= rest:
        while rest % p == 0:
            found[p] = found.get(p, 0) + 1
            rest //= p
        p += 1 if p == 2 else 2
    if rest > 1:
        _split(rest, found)
    return Factorization(n, tuple(sorted(found.items())))


def mobius(n: int) -> int:
    f = factorize(n)
    if any(e > 1 for _, e in f):
        return 0
    return -1 if len(f) % 2 else 1


def tau(n: int) -> int:
    return math.prod(e + 1 for _, e in factorize(n))


def euler_phi(n: int) -> int:
    return math.prod((p - 1) * p ** (e - 1) for p, e in factorize(n))


def divisors(n: int) -> list[int]:
    return factorize(n).divisors()
