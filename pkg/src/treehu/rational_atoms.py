"""Rational spherical parameters and the sine equation

    sin((r+1) a pi / b) + q^{-1/2} sin(r a pi / b) = 0,   0 <= r <= b-1.

A rational angle a/b encodes the principal parameter lambda = (a/b) * tau/2,
i.e. the angle a pi / b. The equation has solutions only for four exceptional
pairs; removing them from the rationals gives the set ``Lambda_q^Rat``.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

import mpmath
import numpy as np

from .errors import NotCoprime
from .spectral import Branch, SpectralParam

DEFAULT_ZERO_TOL = 1e-9
# Extended-precision confirmation: working digits and the zero threshold there.
CONFIRM_DPS = 50
CONFIRM_ZERO = mpmath.mpf(10) ** -40
# Relation search bounds for the quadratic scan.
RELATION_COEFF_BOUND = 200
RELATION_RESIDUAL = 1e-10
NIVEN_TOL = 1e-12

EXCEPTIONAL = {
    2: frozenset({(3, 4), (5, 12), (11, 12)}),
    3: frozenset({(5, 6)}),
}


@dataclass(frozen=True, order=True)
class RationalAngle:
    """The angle a*pi/b with gcd(a, b) = 1 and 0 < a < b. Sorts by (b, a)."""

    b: int
    a: int

    def __init__(self, a: int, b: int):
        a, b = int(a), int(b)
        if not 0 < a < b:
            raise ValueError(f"need 0 < a < b, got a={a}, b={b}")
        if math.gcd(a, b) != 1:
            raise NotCoprime(f"gcd({a}, {b}) = {math.gcd(a, b)}")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    def __repr__(self):
        return f"RationalAngle({self.a}/{self.b})"

    def to_param(self, q: int) -> SpectralParam:
        return SpectralParam.principal(self.a / self.b * math.pi / math.log(q), q)


def coprime_numerators(b: int):
    return [a for a in range(1, b) if math.gcd(a, b) == 1]


def _sin_pi_frac(k, b):
    """sin(pi k / b) for integer k (arrays allowed), reduced to [0, pi/2] first.

    Multiples of pi come out as exact zeros.
    """
    k = np.mod(np.asarray(k, dtype=np.int64), 2 * b)
    sign = np.where(k >= b, -1.0, 1.0)
    k = np.where(k >= b, k - b, k)
    k = np.where(2 * k > b, b - k, k)
    return sign * np.sin(np.pi * k / b)


def sine_equation_lhs(q: int, angle: RationalAngle, r):
    """sin((r+1) a pi/b) + q^{-1/2} sin(r a pi/b), arguments reduced mod 2b exactly."""
    r = np.asarray(r, dtype=np.int64)
    if np.any(r < 0):
        raise ValueError("r must be non-negative")
    a, b = angle.a, angle.b
    out = _sin_pi_frac(a * (r + 1), b) + q**-0.5 * _sin_pi_frac(a * r, b)
    return float(out) if out.ndim == 0 else out


def sine_equation_lhs_mp(q: int, angle: RationalAngle, r: int, dps: int = CONFIRM_DPS):
    a, b = angle.a, angle.b
    with mpmath.workdps(dps):
        k1 = (a * (r + 1)) % (2 * b)
        k2 = (a * r) % (2 * b)
        return mpmath.sinpi(mpmath.mpf(k1) / b) + mpmath.sinpi(mpmath.mpf(k2) / b) / mpmath.sqrt(q)


def lambda_rat_member(q: int, angle: RationalAngle) -> bool:
    return (angle.a, angle.b) not in EXCEPTIONAL.get(q, frozenset())


def rational_angle_of(param: SpectralParam, den_max: int = 1000, tol: float = 1e-9) -> RationalAngle | None:
    """Recognise a principal parameter as (a/b) * tau/2 with b <= den_max."""
    if param.branch is not Branch.PRINCIPAL:
        return None
    x = param.angle / math.pi
    frac = Fraction(x).limit_denominator(den_max)
    if abs(x - float(frac)) > tol or not 0 < frac < 1:
        return None
    return RationalAngle(frac.numerator, frac.denominator)


# ---------------------------------------------------------------------------
# the exhaustive solution scan


@dataclass(frozen=True)
class Solution:
    q: int
    a: int
    b: int
    r: int
    lhs: float
    explained: bool

    def row(self) -> tuple:
        return (self.q, self.a, self.b, self.r, self.lhs)


def _scan_denominator(q: int, b: int, tol: float) -> list[Solution]:
    hits = []
    r = np.arange(b)
    for a in coprime_numerators(b):
        angle = RationalAngle(a, b)
        lhs = sine_equation_lhs(q, angle, r)
        for ri in np.flatnonzero(np.abs(lhs) < tol):
            ri = int(ri)
            if abs(sine_equation_lhs_mp(q, angle, ri)) >= CONFIRM_ZERO:
                continue
            hits.append(Solution(q, a, b, ri, float(lhs[ri]), _explained(q, angle)))
    return hits


def _explained(q: int, angle: RationalAngle) -> bool:
    """A confirmed zero must be one of the listed identities.

    The other route to a zero, cos(a pi/b) = -sqrt(q)/(q+1), would make the
    cosine a quadratic irrational that is not one of the b in {4, 5, 6} values;
    it is checked numerically here as well.
    """
    with mpmath.workdps(CONFIRM_DPS):
        c = mpmath.cospi(mpmath.mpf(angle.a) / angle.b)
        cosine_route = abs(c + mpmath.sqrt(q) / (q + 1)) < CONFIRM_ZERO
    return not cosine_route and not lambda_rat_member(q, angle)


def find_solutions(q: int, b_max: int, tol: float = DEFAULT_ZERO_TOL, b_min: int = 2, jobs: int = 1) -> list[Solution]:
    """All (a, b, r) with 0 < a < b in [b_min, b_max], 0 <= r < b solving the sine equation.

    Candidates below ``tol`` in double precision are re-evaluated at 50 digits
    and kept only if they vanish there. Output is sorted by (b, a, r).
    """
    if b_max < 2:
        raise ValueError("b_max must be >= 2")
    if q < 2:
        raise ValueError("q must be >= 2")
    denominators = range(max(b_min, 2), b_max + 1)
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            parts = list(pool.map(lambda b: _scan_denominator(q, b, tol), denominators))
    else:
        parts = [_scan_denominator(q, b, tol) for b in denominators]
    hits = [s for part in parts for s in part]
    return sorted(hits, key=lambda s: (s.b, s.a, s.r))


# ---------------------------------------------------------------------------
# Niven / quadratic-irrational scans


@dataclass(frozen=True)
class NivenHit:
    a: int
    b: int
    cosine: Fraction


def niven_scan(b_max: int, tol: float = NIVEN_TOL) -> list[NivenHit]:
    """Angles a pi / b (0 <= a <= b, coprime) whose cosine is numerically rational.

    A hit needs a fraction with denominator <= b_max**2 within ``tol`` of the
    cosine; the endpoints a/b = 0/1 and 1/1 are included.
    """
    if b_max < 1:
        raise ValueError("b_max must be >= 1")
    hits = []
    for b in range(1, b_max + 1):
        for a in range(0, b + 1):
            if math.gcd(a, b) != 1:
                continue
            c = math.cos(math.pi * a / b)
            frac = Fraction(c).limit_denominator(b_max * b_max)
            if abs(c - float(frac)) < tol:
                hits.append(NivenHit(a, b, frac))
    return hits


@dataclass(frozen=True)
class QuadraticHit:
    angle: RationalAngle
    relation: tuple[int, int, int]  # (x2, x1, x0): x2 c^2 + x1 c + x0 = 0
    residual: float


def quadratic_relation(c: float, bound: int = RELATION_COEFF_BOUND, tol: float = RELATION_RESIDUAL):
    """Smallest primitive (x2 > 0, x1, x0) with |x2 c^2 + x1 c + x0| < tol, or None."""
    x2 = np.arange(1, bound + 1, dtype=np.int64)[:, None]
    x1 = np.arange(-bound, bound + 1, dtype=np.int64)[None, :]
    partial = x2 * (c * c) + x1 * c
    x0 = -np.rint(partial).astype(np.int64)
    resid = np.abs(partial + x0)
    ok = (resid < tol) & (np.abs(x0) <= bound)
    if not ok.any():
        return None
    i, j = np.nonzero(ok)
    x2v = np.broadcast_to(x2, ok.shape)[i, j]
    x1v = np.broadcast_to(x1, ok.shape)[i, j]
    x0v = x0[i, j]
    height = np.maximum(np.maximum(np.abs(x1v), np.abs(x0v)), x2v)
    k = np.lexsort((x1v, x2v, height))[0]
    rel = (int(x2v[k]), int(x1v[k]), int(x0v[k]))
    g = math.gcd(math.gcd(*rel[:2]), rel[2])
    rel = tuple(x // g for x in rel)
    return rel, float(resid[i[k], j[k]])


def quadratic_scan(b_max: int, bound: int = RELATION_COEFF_BOUND, tol: float = RELATION_RESIDUAL) -> list[QuadraticHit]:
    """Angles a pi/b, b <= b_max, whose cosine is a quadratic irrational.

    Rational cosines (relations with x2 c^2 dividing out, i.e. linear ones) are
    excluded first.
    """
    if b_max < 4:
        raise ValueError("b_max must be >= 4")
    hits = []
    for b in range(2, b_max + 1):
        for a in coprime_numerators(b):
            c = math.cos(math.pi * a / b)
            frac = Fraction(c).limit_denominator(bound)
            if abs(c - float(frac)) < tol:
                continue
            found = quadratic_relation(c, bound, tol)
            if found is not None:
                hits.append(QuadraticHit(RationalAngle(a, b), *found))
    return hits
