"""The lattices {(u, v) : lam*u = v (mod m)}, box minima and point counts.

All norms are sup-norms relative to a box |u| <= A, |v| <= B and are carried as
exact fractions. Internally a vector (u, v) is measured by the integer
max(|u|*wa, |v|*wb) with a common denominator ``scale``, where A = a_n/a_d,
B = b_n/b_d, wa = a_d*b_n, wb = b_d*a_n and scale = a_n*b_n.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import kernels
from .energy import EnergyQuery, count_J_lambda, inverse_sum_profile, solutions_J_lambda
from .errors import BadParameters, BudgetExceeded, WitnessViolation
from .report import BoundReport
from .residue import as_modulus

COUNT_LIMIT = 10**7
OMEGA_M_LIMIT = 10**5
OMEGA_NK_LIMIT = 10**7
_POINT_LIMIT = 10**6

Vector = tuple[int, int]


@dataclass(frozen=True)
class ReciprocalLattice:
    lam: int
    m: int

    def __post_init__(self):
        object.__setattr__(self, "m", as_modulus(self.m))
        if not 0 <= self.lam < self.m:
            raise BadParameters(f"lambda must lie in [0, {self.m}), got {self.lam}")

    @property
    def basis(self) -> tuple[Vector, Vector]:
        return (1, self.lam), (0, self.m)

    def contains(self, u: int, v: int) -> bool:
        return (self.lam * u - v) % self.m == 0


@dataclass(frozen=True)
class Box:
    A: Fraction
    B: Fraction

    def __post_init__(self):
        A, B = Fraction(self.A), Fraction(self.B)
        if A <= 0 or B <= 0:
            raise BadParameters(f"box half-widths must be positive, got A={A}, B={B}")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)

    def scaled(self, t) -> "Box":
        t = Fraction(t)
        return Box(self.A * t, self.B * t)

    def contains(self, u: int, v: int) -> bool:
        return abs(u) <= self.A and abs(v) <= self.B

    def on_boundary(self, u: int, v: int) -> bool:
        return self.contains(u, v) and (abs(u) == self.A or abs(v) == self.B)

    def _weights(self) -> tuple[int, int, int]:
        A, B = self.A, self.B
        return A.denominator * B.numerator, B.denominator * A.numerator, A.numerator * B.numerator

    def norm(self, u: int, v: int) -> Fraction:
        """Sup-norm of (u, v) relative to this box: the least t with (u, v) in t*box."""
        wa, wb, scale = self._weights()
        return Fraction(max(abs(u) * wa, abs(v) * wb), scale)


@dataclass(frozen=True)
class LatticeCount:
    count: int
    points: list[Vector] | None = None


@dataclass(frozen=True)
class MinimaPair:
    mu1: Fraction
    mu2: Fraction
    witness1: Vector
    witness2: Vector

    @property
    def det(self) -> int:
        (u1, v1), (u2, v2) = self.witness1, self.witness2
        return abs(u1 * v2 - v1 * u2)


def _row_counts(lat: ReciprocalLattice, U: int, V: int) -> int:
    if lat.m <= kernels.KERNEL_MAX_MODULUS and lat.m * U < 1 << 62:
        return int(kernels.lattice_count(lat.lam, lat.m, U, V))
    m, total = lat.m, 0
    for u in range(-U, U + 1):
        r = lat.lam * u % m
        total += (V - r) // m + (V + r) // m + 1
    return total


def lattice_points_in_box(lat: ReciprocalLattice, box: Box, points: bool = False) -> LatticeCount:
    """Exact number of lattice points (origin included) with |u| <= A and |v| <= B."""
    U, V = math.floor(box.A), math.floor(box.B)
    if U > COUNT_LIMIT:
        raise BudgetExceeded(f"box half-width {U} exceeds the scan limit {COUNT_LIMIT}")
    count = _row_counts(lat, U, V)
    if not points:
        return LatticeCount(count)
    if count > _POINT_LIMIT:
        raise BudgetExceeded(f"{count} points is too many to list")
    m, out = lat.m, []
    for u in range(-U, U + 1):
        r = lat.lam * u % m
        lo = -((V + r) // m)
        hi = (V - r) // m
        out.extend((u, r + j * m) for j in range(lo, hi + 1))
    return LatticeCount(count, out)


# -- successive minima -------------------------------------------------------

def _round_div(p: int, q: int) -> int:
    """Nearest integer to p/q for q > 0 (halves rounded up)."""
    return (2 * p + q) // (2 * q)


def _normalize(w: Vector) -> Vector:
    u, v = w
    return (u, v) if u > 0 or (u == 0 and v > 0) else (-u, -v)


def _gauss_reduce(b1: Vector, b2: Vector, wa: int, wb: int):
    """Lagrange-Gauss reduction for the form Q(u, v) = (wa*u)^2 + (wb*v)^2."""

    def dot(x, y):
        return wa * wa * x[0] * y[0] + wb * wb * x[1] * y[1]

    q1, q2 = dot(b1, b1), dot(b2, b2)
    while True:
        if q1 > q2:
            b1, b2, q1, q2 = b2, b1, q2, q1
        t = _round_div(dot(b1, b2), q1)
        if t == 0:
            return b1, b2, q1, q2, dot(b1, b2)
        b2 = (b2[0] - t * b1[0], b2[1] - t * b1[1])
        q2 = dot(b2, b2)


def _floor_div(p: int, q: int) -> int:
    return p // q if q > 0 else (-p) // (-q)


def _line_candidates(b1: Vector, b2: Vector, c2: int, wa: int, wb: int) -> set[int]:
    """Integer c1 that can minimize the sup-norm of c1*b1 + c2*b2 (a convex function of c1)."""
    fracs = []
    if b1[0]:
        fracs.append((-c2 * b2[0], b1[0]))
    if b1[1]:
        fracs.append((-c2 * b2[1], b1[1]))
    for s in (1, -1):
        den = wa * b1[0] - s * wb * b1[1]
        if den:
            fracs.append((-c2 * (wa * b2[0] - s * wb * b2[1]), den))
    out = set()
    for p, q in fracs:
        f = _floor_div(p, q)
        out.update((f, f + 1))
    return out


def successive_minima(lat: ReciprocalLattice, box: Box) -> MinimaPair:
    """Exact first and second successive minima of the lattice relative to the box.

    The basis is Gauss-reduced in the Euclidean norm of the rescaled plane
    (where the box becomes a square), which bounds the second coefficient of
    any vector inside the candidate radius. Each line of fixed second
    coefficient is then minimized exactly, since the sup-norm is convex along it.
    """
    wa, wb, scale = box._weights()

    def sup(w: Vector) -> int:
        return max(abs(w[0]) * wa, abs(w[1]) * wb)

    b1, b2, q1, q2, cross = _gauss_reduce(*lat.basis, wa, wb)
    radius = max(sup(b1), sup(b2))
    gram = q1 * q2 - cross * cross
    # Euclidean norm <= sqrt(2) * sup-norm, and |c2| * |b2*| <= Euclidean norm
    c2_max = math.isqrt(2 * radius * radius * q1 // gram) + 1

    def vec(c1: int, c2: int) -> Vector:
        return (c1 * b1[0] + c2 * b2[0], c1 * b1[1] + c2 * b2[1])

    def key(w: Vector):
        n = _normalize(w)
        return (sup(w), n)

    lines = []
    for c2 in range(1, c2_max + 1):
        cands = sorted(_line_candidates(b1, b2, c2, wa, wb))
        best = min(cands, key=lambda c1: key(vec(c1, c2)))
        lines.append((c2, best))

    w1 = min([b1] + [vec(c1, c2) for c2, c1 in lines], key=key)

    def parallel(w: Vector) -> bool:
        return w[0] * w1[1] - w[1] * w1[0] == 0

    options = []
    if not parallel(b1):
        options.append(b1)
    for c2, c1 in lines:
        for c in (c1, c1 - 1, c1 + 1):
            w = vec(c, c2)
            if not parallel(w):
                options.append(w)
                if c == c1:
                    break
    w2 = min(options, key=key)
    return MinimaPair(Fraction(sup(w1), scale), Fraction(sup(w2), scale),
                      _normalize(w1), _normalize(w2))


def successive_minima_exhaustive(lat: ReciprocalLattice, box: Box) -> MinimaPair:
    """Reference minima by listing every lattice point of a dilated box, no reduction involved.

    The dilation doubles until it holds two independent points; every point of
    smaller norm than those is then inside, so the minima are exact.
    """
    r = Fraction(math.isqrt(max(1, math.floor(lat.m / (4 * box.A * box.B)))) or 1)
    r = min(r, max(box.norm(*b) for b in lat.basis))
    while True:
        pts = lattice_points_in_box(lat, box.scaled(r), points=True).points
        ranked = sorted((p for p in pts if p != (0, 0)), key=lambda p: (box.norm(*p), _normalize(p)))
        if ranked:
            w1 = ranked[0]
            w2 = next((p for p in ranked if p[0] * w1[1] - p[1] * w1[0] != 0), None)
            if w2 is not None:
                return MinimaPair(box.norm(*w1), box.norm(*w2), _normalize(w1), _normalize(w2))
        r *= 2


def lemma2_check(lat: ReciprocalLattice, box: Box, minima: MinimaPair | None = None) -> BoundReport:
    """|lattice in box| <= (2/mu1 + 1)(4/mu2 + 1)."""
    mp = minima or successive_minima(lat, box)
    count = lattice_points_in_box(lat, box).count
    rhs = (2 / mp.mu1 + 1) * (4 / mp.mu2 + 1)
    return BoundReport.compare("lemma2", count, rhs, lam=lat.lam, m=lat.m,
                               A=box.A, B=box.B, mu1=mp.mu1, mu2=mp.mu2)


def corollary2_check(lat: ReciprocalLattice, box: Box, minima: MinimaPair | None = None) -> BoundReport:
    """min(mu1, 1) * min(mu2, 1) <= 15 / |lattice in box|."""
    mp = minima or successive_minima(lat, box)
    count = lattice_points_in_box(lat, box).count
    lhs = min(mp.mu1, Fraction(1)) * min(mp.mu2, Fraction(1))
    return BoundReport.compare("corollary2", lhs, Fraction(15, count), lam=lat.lam, m=lat.m,
                               A=box.A, B=box.B, count=count)


def minkowski_check(lat: ReciprocalLattice, box: Box, minima: MinimaPair | None = None) -> BoundReport:
    """2m <= mu1 * mu2 * vol(box) <= 4m for the determinant-m lattice."""
    mp = minima or successive_minima(lat, box)
    val = mp.mu1 * mp.mu2 * 4 * box.A * box.B
    holds = 2 * lat.m <= val <= 4 * lat.m
    return BoundReport("minkowski", float(val), float(4 * lat.m), float(val / (4 * lat.m)), holds,
                       {"lam": lat.lam, "m": lat.m, "A": box.A, "B": box.B,
                        "lower": 2 * lat.m, "tolerance": 0.0, "strict": False})


# -- the partition of lambda by the second minimum ---------------------------

class LambdaClass(enum.Enum):
    NOT_IN_OMEGA = "not_in_omega"
    OMEGA_PRIME = "omega_prime"
    OMEGA_DOUBLE_PRIME = "omega_double_prime"


def solution_box(k: int, N: int) -> Box:
    """|u| <= N^k, |v| <= k N^(k-1)."""
    return Box(Fraction(N**k), Fraction(k * N ** (k - 1)))


def classify(minima: MinimaPair) -> LambdaClass:
    return LambdaClass.OMEGA_PRIME if minima.mu2 <= 1 else LambdaClass.OMEGA_DOUBLE_PRIME


@dataclass
class OmegaPartition:
    k: int
    N: int
    m: int
    box: Box
    classes: dict[int, LambdaClass]
    minima: dict[int, MinimaPair]
    mu1_violations: list[int]
    J0: int
    small_regime: bool
    counts: dict[LambdaClass, int] = field(default_factory=dict)

    def members(self, cls: LambdaClass) -> list[int]:
        return sorted(lam for lam, c in self.classes.items() if c is cls)


def _check_omega_budget(k: int, N: int, m: int) -> None:
    if m > OMEGA_M_LIMIT or N**k > OMEGA_NK_LIMIT:
        raise BudgetExceeded(f"omega sweep needs m <= {OMEGA_M_LIMIT} and N^k <= {OMEGA_NK_LIMIT}")


def omega_partition(k: int, N: int, m: int) -> OmegaPartition:
    """Split lam in [1, m-1] into non-members of Omega = {J(lam) >= 1}, mu2 <= 1 and mu2 > 1."""
    m = as_modulus(m)
    _check_omega_budget(k, N, m)
    query = EnergyQuery(k, N, m)
    profile = inverse_sum_profile(query)
    box = solution_box(k, N)
    classes = {lam: LambdaClass.NOT_IN_OMEGA for lam in range(1, m)}
    minima, bad = {}, []
    for lam in sorted(profile):
        if lam == 0 or profile[lam] == 0:
            continue
        mp = successive_minima(ReciprocalLattice(lam, m), box)
        minima[lam] = mp
        classes[lam] = classify(mp)
        if mp.mu1 > 1:
            bad.append(lam)
    counts = {c: 0 for c in LambdaClass}
    for c in classes.values():
        counts[c] += 1
    return OmegaPartition(k, N, m, box, classes, minima, bad, profile.get(0, 0),
                          k * N ** (k - 1) < m, counts)


def case1_bound_check(lam: int, k: int, N: int, m: int) -> BoundReport:
    """For lam with mu2 <= 1: |lattice in box| <= 30 k N^(2k-1) / m, plus |det(witnesses)| >= m."""
    m = as_modulus(m)
    lat, box = ReciprocalLattice(lam, m), solution_box(k, N)
    mp = successive_minima(lat, box)
    if mp.mu2 > 1:
        raise BadParameters(f"lambda={lam} has mu2={mp.mu2} > 1")
    res = lattice_points_in_box(lat, box, points=True)
    boundary = sum(box.on_boundary(u, v) for u, v in res.points)
    return BoundReport.compare(
        "case1", res.count, Fraction(30 * k * N ** (2 * k - 1), m), lam=lam, k=k, N=N, m=m,
        mu1=mp.mu1, mu2=mp.mu2, det=mp.det, det_holds=mp.det >= m, boundary_points=boundary)


def case2_rational_witness(lam: int, k: int, N: int, m: int) -> Fraction | None:
    """The common value of 1/x1 + ... + 1/xk over all solutions for lam, or None if there are none.

    Raises WitnessViolation if two solutions give different rationals.
    """
    m = as_modulus(m)
    sols = solutions_J_lambda(lam, EnergyQuery(k, N, m))
    if not sols:
        return None
    mp = successive_minima(ReciprocalLattice(lam, m), solution_box(k, N))
    if mp.mu2 <= 1:
        raise BadParameters(f"lambda={lam} has mu2={mp.mu2} <= 1")
    values = {sum((Fraction(1, x) for x in s), Fraction(0)) for s in sols}
    if len(values) > 1:
        raise WitnessViolation(f"lambda={lam}: solutions give {len(values)} distinct sums")
    return values.pop()


def embed_solution(xs: tuple[int, ...]) -> Vector:
    """(x1...xk, sum_i prod_{j != i} xj)."""
    u = math.prod(xs)
    v = sum(math.prod(xs[:i] + xs[i + 1:]) for i in range(len(xs)))
    return u, v


def embedding_failures(lam: int, k: int, N: int, m: int) -> list[tuple[int, ...]]:
    """Solutions whose embedded vector misses the lattice or the box (expected: none)."""
    m = as_modulus(m)
    lat, box = ReciprocalLattice(lam, m), solution_box(k, N)
    return [s for s in solutions_J_lambda(lam, EnergyQuery(k, N, m))
            if not (lat.contains(*embed_solution(s)) and box.contains(*embed_solution(s)))]


def lambda_count(lam: int, k: int, N: int, m: int) -> int:
    return count_J_lambda(lam, EnergyQuery(k, N, m))
