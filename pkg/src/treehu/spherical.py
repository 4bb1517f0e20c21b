"""Spherical functions, ball transforms and Plancherel data of the (q+1)-regular tree.

Conventions: ``h = log(q)/2`` and ``theta = t log q`` for a principal parameter
t, ``sigma = s log q`` for a complementary one. Everything radial is written in
exponent form so large radii do not overflow; ``scale`` divides a ball
transform by ``q**(scale*r)``, and ``scale=0.5`` yields ``chi_hat / q**(r/2)``,
the natural quantity for number variances.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import mpmath
import numpy as np

from .errors import OutOfSupport, WrongBranch
from .spectral import Branch, SpectralParam

# Radii above this use compensated phase reduction.
PLAIN_PHASE_LIMIT = 10**6


@dataclass(frozen=True)
class TreeGeometry:
    q: int

    def __post_init__(self):
        if self.q < 2:
            raise ValueError(f"q must be >= 2, got {self.q}")

    @property
    def log_q(self) -> float:
        return math.log(self.q)

    @property
    def tau(self) -> float:
        return 2.0 * math.pi / math.log(self.q)

    @property
    def spectral_radius(self) -> float:
        return 2.0 * math.sqrt(self.q)


def ball_volume(r: int, q: int) -> int:
    if r < 0:
        raise ValueError("radius must be non-negative")
    return ((q + 1) * q**r - 2) // (q - 1)


def sphere_size(n: int, q: int) -> int:
    if n < 0:
        raise ValueError("radius must be non-negative")
    return 1 if n == 0 else (q + 1) * q ** (n - 1)


def scaled_ball_volume(r, q: int):
    """|B_r| / q^r, finite for every radius."""
    r = np.asarray(r, dtype=float)
    return ((q + 1) - 2.0 * np.power(float(q), -r)) / (q - 1)


# ---------------------------------------------------------------------------
# accurate sin / cos of r * theta


@lru_cache(maxsize=4096)
def _turn_split(t: float, q: int) -> tuple[float, float]:
    """t / tau as an unevaluated sum hi + lo (about 32 significant digits)."""
    with mpmath.workdps(40):
        x = mpmath.mpf(t) * mpmath.log(q) / (2 * mpmath.pi)
        hi = float(x)
        lo = float(x - hi)
    return hi, lo


def _two_prod(a, b):
    """Exact product a*b = p + e (Dekker split, numpy arrays)."""
    p = a * b
    split = 134217729.0
    ca = split * a
    a_hi = ca - (ca - a)
    a_lo = a - a_hi
    cb = split * b
    b_hi = cb - (cb - b)
    b_lo = b - b_hi
    e = ((a_hi * b_hi - p) + a_hi * b_lo + a_lo * b_hi) + a_lo * b_lo
    return p, e


def phase(param: SpectralParam, r) -> np.ndarray:
    """r * theta reduced into [0, 2 pi), with compensated reduction for big r."""
    r = np.asarray(r, dtype=float)
    hi, lo = _turn_split(param.value, param.q)
    if r.size and float(np.max(np.abs(r))) > PLAIN_PHASE_LIMIT:
        p, e = _two_prod(r, np.full_like(r, hi))
        frac = np.mod(p, 1.0)
        frac = np.mod(frac + (e + r * lo), 1.0)
    else:
        frac = np.mod(r * hi + r * lo, 1.0)
    return 2.0 * math.pi * frac


def _sin_multiple(param, r):
    return np.sin(phase(param, r))


def _cos_multiple(param, r):
    return np.cos(phase(param, r))


# ---------------------------------------------------------------------------
# spherical functions


def spherical_function(param: SpectralParam, n):
    """omega_lambda(n): the radial spherical function at distance n."""
    n_arr = np.asarray(n)
    if np.any(n_arr < 0):
        raise ValueError("distance must be non-negative")
    nf = n_arr.astype(float)
    q = param.q
    h = 0.5 * math.log(q)
    k = (q - 1) / (q + 1)
    if param.branch is Branch.PRINCIPAL:
        theta = param.angle
        out = np.exp(-h * nf) * (_cos_multiple(param, nf) + k / math.tan(theta) * _sin_multiple(param, nf))
    else:
        sign = np.where(n_arr % 2 == 0, 1.0, -1.0) if param.branch is Branch.SIGNED_COMPLEMENTARY else 1.0
        if param.value == 0.5:
            out = sign * np.ones_like(nf)
        elif param.value == 0.0:
            out = sign * (1.0 + k * nf) * np.exp(-h * nf)
        else:
            sig = param.angle
            kc = k / math.tanh(sig)
            out = sign * 0.5 * ((1 + kc) * np.exp(nf * (sig - h)) + (1 - kc) * np.exp(-nf * (sig + h)))
    return float(out) if np.ndim(out) == 0 else out


def spherical_function_recursive(alpha: float, n: int, q: int) -> float:
    """omega(n) from the three-term recursion q w(k+1) = alpha w(k) - w(k-1)."""
    if n < 0:
        raise ValueError("distance must be non-negative")
    prev, cur = 1.0, alpha / (q + 1)
    if n == 0:
        return prev
    for _ in range(n - 1):
        prev, cur = cur, (alpha * cur - prev) / q
    return cur


def c_function_sq(param: SpectralParam) -> float:
    """|c_q(lambda)|^2 for a principal parameter."""
    if param.branch is not Branch.PRINCIPAL:
        raise WrongBranch("the c-function is only evaluated on the principal branch")
    return float(c_function_sq_array(param.value, param.q))


def c_function_sq_array(t, q: int):
    h = 0.5 * math.log(q)
    s2 = np.sin(np.asarray(t, dtype=float) * math.log(q)) ** 2
    return (math.sinh(h) ** 2 + s2) / (4.0 * math.cosh(h) ** 2 * s2)


def plancherel_density(param, q: int | None = None):
    """Density of the Plancherel measure in the principal variable t.

    Accepts a principal :class:`SpectralParam` or an array of t values with q.
    """
    if isinstance(param, SpectralParam):
        if param.branch is not Branch.PRINCIPAL:
            raise WrongBranch("the Plancherel measure lives on the principal branch")
        return float(plancherel_density(param.value, param.q))
    if q is None:
        raise ValueError("q is required when passing raw t values")
    h = 0.5 * math.log(q)
    tau = 2.0 * math.pi / math.log(q)
    s2 = np.sin(np.asarray(param, dtype=float) * math.log(q)) ** 2
    inv_c = 4.0 * math.cosh(h) ** 2 * s2 / (math.sinh(h) ** 2 + s2)
    return math.sqrt(q) / (2.0 * math.cosh(h)) / tau * inv_c


def kesten_mckay_density(alpha, q: int):
    """Kesten-McKay density on [-2 sqrt q, 2 sqrt q]; zero at the endpoints."""
    a = np.asarray(alpha, dtype=float)
    edge = 2.0 * math.sqrt(q)
    if np.any(np.abs(a) > edge * (1 + 1e-15)):
        raise OutOfSupport(f"alpha outside [-{edge}, {edge}]")
    out = (q + 1) / (2.0 * math.pi) * np.sqrt(np.maximum(4.0 * q - a * a, 0.0)) / ((q + 1) ** 2 - a * a)
    return float(out) if np.ndim(out) == 0 else out


def spherical_transform_radial(values, param: SpectralParam) -> float:
    """Sum over spheres of |dB_n| * f(n) * omega(n) for a finitely supported radial f."""
    q = param.q
    total = 0.0
    for n, v in enumerate(values):
        if v:
            total += sphere_size(n, q) * v * spherical_function(param, n)
    return total


# ---------------------------------------------------------------------------
# ball transforms


def ball_transform(param: SpectralParam, r, scale: float = 0.0):
    """Spherical transform of the ball indicator, divided by q**(scale*r).

    Vectorised over r. With ``scale=0`` this is the plain transform.
    """
    r_arr = np.asarray(r)
    if np.any(r_arr < 0):
        raise ValueError("radius must be non-negative")
    rf = r_arr.astype(float)
    q = param.q
    lq = math.log(q)
    rq = q**-0.5
    growth = rf * lq * (0.5 - scale)
    if param.branch is Branch.PRINCIPAL:
        theta = param.angle
        num = _sin_multiple(param, rf + 1.0) + rq * _sin_multiple(param, rf)
        out = np.exp(growth) * num / math.sin(theta)
    else:
        signed = param.branch is Branch.SIGNED_COMPLEMENTARY
        sign = np.where(r_arr % 2 == 0, 1.0, -1.0) if signed else 1.0
        c2 = -rq if signed else rq
        s = param.value
        if s == 0.0:
            out = sign * (1.0 + (1.0 + c2) * rf) * np.exp(growth)
        else:
            sig = s * lq
            # sinh(x) = (e^x - e^-x)/2, every exponential merged with the growth
            # factor; the growing part overflows to +inf, never to nan
            with np.errstate(over="ignore"):
                pos = np.exp(growth + sig * rf) * (math.exp(sig) + c2)
            neg = np.exp(growth - sig * rf) * (math.exp(-sig) + c2)
            out = sign * 0.5 * (pos - neg) / math.sinh(sig)
    return float(out) if np.ndim(out) == 0 else out
