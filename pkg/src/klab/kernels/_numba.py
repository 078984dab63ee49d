"""Compiled inner loops. Signatures mirror :mod:`klab.kernels._numpy` exactly."""
import math

import numpy as np
from numba import njit

TWO_PI = 2.0 * math.pi


@njit(cache=True)
def _inv_or_minus_one(a, m):
    t0, t1 = 0, 1
    r0, r1 = m, a
    while r1 != 0:
        q = r0 // r1
        t0, t1 = t1, t0 - q * t1
        r0, r1 = r1, r0 - q * r1
    if r0 != 1:
        return -1
    return t0 % m


@njit(cache=True)
def batch_inverse(xs, m):
    """Inverses of ``xs`` (reduced mod ``m``) by prefix products; -1 marks non-units."""
    n = xs.shape[0]
    out = np.empty(n, np.int64)
    if n == 0:
        return out
    pre = np.empty(n, np.int64)
    acc = 1
    for i in range(n):
        acc = (acc * xs[i]) % m
        pre[i] = acc
    inv = _inv_or_minus_one(acc, m)
    if inv < 0:
        # some prefix is a non-unit: invert one at a time
        for i in range(n):
            out[i] = _inv_or_minus_one(xs[i], m)
        return out
    for i in range(n - 1, 0, -1):
        out[i] = (inv * pre[i - 1]) % m
        inv = (inv * xs[i]) % m
    out[0] = inv
    return out


@njit(cache=True)
def _angle(r, m):
    s = r if 2 * r <= m else r - m
    return TWO_PI * (s / m)


@njit(cache=True)
def _neumaier(total, comp, x):
    t = total + x
    if abs(total) >= abs(x):
        comp += (total - t) + x
    else:
        comp += (x - t) + total
    return t, comp


@njit(cache=True)
def expsum(res, m):
    sr, cr, si, ci = 0.0, 0.0, 0.0, 0.0
    for k in range(res.shape[0]):
        t = _angle(res[k], m)
        sr, cr = _neumaier(sr, cr, math.cos(t))
        si, ci = _neumaier(si, ci, math.sin(t))
    return sr + cr, si + ci


@njit(cache=True)
def expsum_weighted(res, wre, wim, m):
    sr, cr, si, ci = 0.0, 0.0, 0.0, 0.0
    for k in range(res.shape[0]):
        t = _angle(res[k], m)
        c = math.cos(t)
        s = math.sin(t)
        sr, cr = _neumaier(sr, cr, wre[k] * c - wim[k] * s)
        si, ci = _neumaier(si, ci, wre[k] * s + wim[k] * c)
    return sr + cr, si + ci


@njit(cache=True)
def bilinear_expsum(r1, w1re, w1im, r2, w2re, w2im, m):
    sr, cr, si, ci = 0.0, 0.0, 0.0, 0.0
    for i in range(r1.shape[0]):
        a = r1[i]
        for j in range(r2.shape[0]):
            t = _angle((a * r2[j]) % m, m)
            c = math.cos(t)
            s = math.sin(t)
            wr = w1re[i] * w2re[j] - w1im[i] * w2im[j]
            wi = w1re[i] * w2im[j] + w1im[i] * w2re[j]
            sr, cr = _neumaier(sr, cr, wr * c - wi * s)
            si, ci = _neumaier(si, ci, wr * s + wi * c)
    return sr + cr, si + ci


@njit(cache=True)
def cyclic_tally_step(hist, shifts, m):
    out = np.zeros(m, np.int64)
    nz = np.nonzero(hist)[0]
    for s in shifts:
        for r in nz:
            j = r + s
            if j >= m:
                j -= m
            out[j] += hist[r]
    return out


@njit(cache=True)
def product_tally_step(hist, factors, q):
    out = np.zeros(q, np.int64)
    nz = np.nonzero(hist)[0]
    for x in factors:
        for r in nz:
            out[(r * x) % q] += hist[r]
    return out


@njit(cache=True)
def lattice_count(lam, m, U, V):
    """Points (u, v) with |u| <= U, |v| <= V and v = lam*u (mod m)."""
    total = 2 * (V // m) + 1
    for u in range(1, U + 1):
        r = (lam * u) % m
        total += 2 * ((V - r) // m + (V + r) // m + 1)
    return total


@njit(cache=True)
def spf_sieve(n):
    spf = np.zeros(n + 1, np.int32)
    for i in range(2, n + 1):
        if spf[i] == 0:
            spf[i] = i
            if i * i <= n:
                for j in range(i * i, n + 1, i):
                    if spf[j] == 0:
                        spf[j] = i
    if n >= 1:
        spf[1] = 1
    return spf


@njit(cache=True)
def lpf_from_spf(spf):
    n = spf.shape[0]
    lpf = np.zeros(n, np.int32)
    if n > 1:
        lpf[1] = 1
    for x in range(2, n):
        p = spf[x]
        q = lpf[x // p]
        lpf[x] = p if p > q else q
    return lpf


@njit(cache=True)
def top_factors(spf, n, r):
    omega = np.zeros(n, np.int64)
    p1 = np.zeros(n, np.int64)
    pr = np.zeros(n, np.int64)
    prod_r = np.zeros(n, np.int64)
    prod_head = np.zeros(n, np.int64)
    buf = np.empty(64, np.int64)
    for x in range(2, n):
        k = 0
        y = x
        while y > 1:
            p = spf[y]
            buf[k] = p
            k += 1
            y //= p
        omega[x] = k
        if k >= r:
            p1[x] = buf[k - 1]
            pr[x] = buf[k - r]
            prod = 1
            for j in range(k - r + 1, k):
                prod *= buf[j]
            prod_head[x] = prod
            prod_r[x] = prod * buf[k - r]
    return omega, p1, pr, prod_r, prod_head


@njit(cache=True)
def smooth_count(lo, hi, primes, y, lim):
    """Count n in [lo, hi) with every prime factor <= y; ``lim`` = isqrt(hi - 1)."""
    n = hi - lo
    rem = np.arange(lo, hi)
    for p in primes:
        if p > y or p > lim:
            break
        start = ((lo + p - 1) // p) * p - lo
        for j in range(start, n, p):
            while rem[j] % p == 0:
                rem[j] //= p
    count = 0
    for j in range(n):
        if rem[j] <= y:
            count += 1
    return count
