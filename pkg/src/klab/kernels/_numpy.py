"""Pure-numpy versions of the compiled kernels (same signatures, same results)."""
import itertools
import math

import numpy as np

TWO_PI = 2.0 * math.pi
_CHUNK = 1 << 20


def batch_inverse(xs, m):
    # extended Euclid run in lockstep over the whole array
    xs = np.asarray(xs, dtype=np.int64)
    r0 = np.full(xs.shape, m, dtype=np.int64)
    r1 = xs.copy()
    t0 = np.zeros(xs.shape, dtype=np.int64)
    t1 = np.ones(xs.shape, dtype=np.int64)
    live = r1 != 0
    while live.any():
        q = np.zeros_like(r0)
        q[live] = r0[live] // r1[live]
        r0, r1 = np.where(live, r1, r0), np.where(live, r0 - q * r1, r1)
        t0, t1 = np.where(live, t1, t0), np.where(live, t0 - q * t1, t1)
        live = r1 != 0
    return np.where(r0 == 1, t0 % m, -1).astype(np.int64)


def _angles(res, m):
    res = np.asarray(res, dtype=np.int64)
    s = np.where(2 * res <= m, res, res - m)
    return TWO_PI * (s / m)


def expsum(res, m):
    t = _angles(res, m)
    return math.fsum(np.cos(t)), math.fsum(np.sin(t))


def expsum_weighted(res, wre, wim, m):
    t = _angles(res, m)
    c, s = np.cos(t), np.sin(t)
    return math.fsum(wre * c - wim * s), math.fsum(wre * s + wim * c)


def bilinear_expsum(r1, w1re, w1im, r2, w2re, w2im, m):
    rows = max(1, _CHUNK // max(1, len(r2)))
    re_parts, im_parts = [], []
    for lo in range(0, len(r1), rows):
        a = r1[lo:lo + rows, None]
        t = _angles((a * r2[None, :]) % m, m)
        c, s = np.cos(t), np.sin(t)
        ar, ai = w1re[lo:lo + rows, None], w1im[lo:lo + rows, None]
        wr = ar * w2re[None, :] - ai * w2im[None, :]
        wi = ar * w2im[None, :] + ai * w2re[None, :]
        re_parts.append((wr * c - wi * s).ravel())
        im_parts.append((wr * s + wi * c).ravel())
    return (math.fsum(itertools.chain.from_iterable(re_parts)),
            math.fsum(itertools.chain.from_iterable(im_parts)))


def cyclic_tally_step(hist, shifts, m):
    out = np.zeros(m, dtype=np.int64)
    nz = np.flatnonzero(hist)
    vals = hist[nz]
    for s in shifts:
        out[(nz + s) % m] += vals
    return out


def product_tally_step(hist, factors, q):
    out = np.zeros(q, dtype=np.int64)
    nz = np.flatnonzero(hist)
    vals = hist[nz]
    for x in factors:
        np.add.at(out, (nz * x) % q, vals)
    return out


def lattice_count(lam, m, U, V):
    total = 2 * (V // m) + 1
    for lo in range(1, U + 1, _CHUNK):
        u = np.arange(lo, min(U, lo + _CHUNK - 1) + 1, dtype=np.int64)
        r = (lam * u) % m
        total += 2 * int(((V - r) // m + (V + r) // m + 1).sum())
    return total


def spf_sieve(n):
    spf = np.zeros(n + 1, dtype=np.int32)
    for p in range(2, math.isqrt(n) + 1):
        if spf[p] == 0:
            sl = spf[p * p::p]
            sl[sl == 0] = p
    idx = np.flatnonzero(spf == 0)
    spf[idx] = idx
    if n >= 0:
        spf[0] = 0
    return spf


def lpf_from_spf(spf):
    n = spf.shape[0]
    lpf = np.zeros(n, dtype=np.int32)
    if n > 1:
        lpf[1] = 1
    idx = np.arange(n)
    primes = np.flatnonzero((spf == idx) & (idx >= 2))
    for p in primes:
        lpf[p::p] = p
    return lpf


def top_factors(spf, n, r):
    rem = np.arange(n, dtype=np.int64)
    rem[:2] = 1
    cols = []
    while True:
        f = np.where(rem > 1, spf[rem], 0).astype(np.int64)
        if not f.any():
            break
        cols.append(f)
        rem = np.where(f > 0, rem // np.maximum(f, 1), rem)
    F = np.stack(cols, axis=1) if cols else np.zeros((n, 1), dtype=np.int64)
    omega = np.count_nonzero(F, axis=1).astype(np.int64)
    ok = omega >= r
    rows = np.flatnonzero(ok)
    top = omega[rows]
    p1 = np.zeros(n, dtype=np.int64)
    pr = np.zeros(n, dtype=np.int64)
    prod_r = np.zeros(n, dtype=np.int64)
    prod_head = np.zeros(n, dtype=np.int64)
    p1[rows] = F[rows, top - 1]
    pr[rows] = F[rows, top - r]
    head = np.ones(len(rows), dtype=np.int64)
    for t in range(1, r):
        head *= F[rows, top - t]
    prod_head[rows] = head
    prod_r[rows] = head * pr[rows]
    return omega, p1, pr, prod_r, prod_head


def smooth_count(lo, hi, primes, y, lim):
    rem = np.arange(lo, hi, dtype=np.int64)
    for p in primes:
        if p > y or p > lim:
            break
        start = ((lo + p - 1) // p) * p - lo
        sub = rem[start::p]
        mask = sub % p == 0
        while mask.any():
            sub[mask] //= p
            mask = sub % p == 0
        rem[start::p] = sub
    return int(np.count_nonzero(rem <= y))
