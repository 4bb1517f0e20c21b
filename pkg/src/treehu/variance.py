"""Number variance of balls, its Cesaro averages and finite-horizon liminf scans.

For a diffraction measure sigma the number variance of B_r is the integral of
|chi_hat_{B_r}|^2 against sigma minus the trivial atom; NV* also drops the sign
atom. Internally everything is carried divided by q^r (``scale=0.5`` ball
transforms), which stays O(1) for stealthy processes at any radius.
"""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import mpmath
import numpy as np

from .diffraction import DiffractionMeasure, classify
from .errors import NotCoprime, NotStealthy, WrongBranch
from .quadrature import integrate
from .rational_atoms import RationalAngle, sine_equation_lhs, sine_equation_lhs_mp
from .spectral import Branch, SpectralParam
from .spherical import (
    ball_transform,
    ball_volume,
    c_function_sq_array,
    plancherel_density,
    scaled_ball_volume,
)

QUAD_TOL = 1e-10
SCAN_BLOCK = 1 << 16
MAX_TRACE = 256
BECK_SLACK = 1e-6


def _principal_ball_sq_scaled(t, q: int, r: int):
    """chi_hat_{B_r}(t)^2 / q^r for an array of principal t (plain phases)."""
    theta = np.asarray(t, dtype=float) * math.log(q)
    num = np.sin((r + 1) * theta) + q**-0.5 * np.sin(r * theta)
    return (num / np.sin(theta)) ** 2


def _plancherel_part_scaled(q: int, r: int, tol: float = QUAD_TOL) -> float:
    """integral of chi_hat_{B_r}^2 / q^r against the Plancherel measure."""
    tau = 2.0 * math.pi / math.log(q)
    f = lambda t: _principal_ball_sq_scaled(t, q, r) * plancherel_density(t, q)
    # at least ~one panel per oscillation
    return integrate(f, 0.0, tau / 2, tol=tol * 1e-2, n_init_panels=max(1, r // 8))


def _atoms_scaled(atoms, r) -> np.ndarray:
    """sum over atoms of mass * chi_hat_{B_r}^2 / q^r, vectorised in r."""
    r = np.asarray(r)
    total = np.zeros(r.shape, dtype=float)
    for a in atoms:
        total += a.mass * ball_transform(a.param, r, scale=0.5) ** 2
    return total


@dataclass(frozen=True)
class NVRow:
    r: int
    volume: float
    nv: float
    nv_star: float
    ratio_star: float


@dataclass(frozen=True)
class NVCurve:
    rows: tuple[NVRow, ...]

    @property
    def nv(self) -> list[float]:
        return [row.nv for row in self.rows]

    @property
    def nv_star(self) -> list[float]:
        return [row.nv_star for row in self.rows]

    def to_csv(self, extra: dict[str, list] | None = None) -> str:
        extra = extra or {}
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["r", "volume", "nv", "nv_star", "ratio_star", *extra])
        for i, row in enumerate(self.rows):
            cells = [row.r, *(format(x, ".17g") for x in (row.volume, row.nv, row.nv_star, row.ratio_star))]
            cells += [format(col[i], ".17g") for col in extra.values()]
            w.writerow(cells)
        return buf.getvalue()


def nv_curve(measure: DiffractionMeasure, r_max: int, tol: float = QUAD_TOL) -> NVCurve:
    if r_max < 0:
        raise ValueError("r_max must be >= 0")
    q = measure.q
    radii = np.arange(r_max + 1)
    star = _atoms_scaled(measure.sub_oscillatory_atoms, radii)
    sign = measure.sign_atom
    sign_part = _atoms_scaled([sign], radii) if sign else np.zeros(len(radii))
    if measure.plancherel_coefficient:
        star = star + measure.plancherel_coefficient * np.array([_plancherel_part_scaled(q, int(r), tol) for r in radii])
    rows = []
    for r in radii:
        r = int(r)
        qr = float(q) ** r
        nv_star = float(star[r] * qr)
        nv = float(nv_star + sign_part[r] * qr)
        volume = float(ball_volume(r, q)) if r < 1000 else math.inf
        rows.append(NVRow(r, volume, nv, nv_star, float(star[r] / scaled_ball_volume(r, q))))
    return NVCurve(tuple(rows))


# ---------------------------------------------------------------------------
# Cesaro means


def _require_principal(param: SpectralParam):
    if param.branch is not Branch.PRINCIPAL:
        raise WrongBranch("expected a principal parameter")


def asymptotic_mean(param: SpectralParam) -> float:
    """Limit of (1/R) sum_{r<=R} chi_hat_{B_r}(lambda)^2 / q^r."""
    _require_principal(param)
    q = param.q
    theta = param.angle
    return (1 + 2 * q**-0.5 * math.cos(theta) + 1 / q) / (2 * math.sin(theta) ** 2)


def cesaro_mean(param: SpectralParam, R: int, block: int = 1 << 20) -> float:
    """(1/R) sum_{r=0}^{R} chi_hat_{B_r}(lambda)^2 / q^r, summed directly."""
    _require_principal(param)
    if R < 1:
        raise ValueError("R must be >= 1")
    total = 0.0
    for lo in range(0, R + 1, block):
        r = np.arange(lo, min(lo + block, R + 1))
        total += math.fsum(ball_transform(param, r, scale=0.5) ** 2)
    return total / R


def cesaro_kernel(t, q: int, R: int):
    """Closed form of (1/R) sum_{r=0}^{R} chi_hat_{B_r}(t)^2 / q^r for principal t arrays.

    Uses the geometric sums of cos(2 r theta); the remainder is O(1/R) uniformly
    on compact subsets of the principal interval.
    """
    x = np.asarray(t, dtype=float) * math.log(q)
    a = q**-0.5
    n = R + 1
    big_a = 1 + 2 * a * np.cos(x) + a * a
    d = np.sin(n * x) / np.sin(x)
    k = n * big_a / 2 - d * (a * np.cos(n * x) + 0.5 * np.cos((n + 1) * x) + 0.5 * a * a * np.cos(R * x))
    return k / (R * np.sin(x) ** 2)


def stealthy_average(measure: DiffractionMeasure) -> float:
    """Cesaro limit of NV*(r)/q^r for a stealthy atomic measure."""
    if not classify(measure, rational_probe=None).stealthy:
        raise NotStealthy("measure is not stealthy")
    # asymptotic_mean already carries the factor 1/2
    return math.fsum(a.mass * asymptotic_mean(a.param) for a in measure.atoms if a.param.branch is Branch.PRINCIPAL)


def cesaro_nv_star(measure: DiffractionMeasure, R: int) -> float:
    """(1/R) sum_{r=0}^{R} NV*(r)/q^r, summed directly from the atoms."""
    if not measure.is_atomic:
        raise ValueError("direct Cesaro sums need an atomic measure")
    return math.fsum(a.mass * _cesaro_atom(a.param, R) for a in measure.sub_oscillatory_atoms)


def _cesaro_atom(param: SpectralParam, R: int) -> float:
    if param.branch is Branch.PRINCIPAL:
        return cesaro_mean(param, R)
    # complementary atoms grow geometrically and may overflow to inf
    r = np.arange(R + 1)
    with np.errstate(over="ignore"):
        terms = ball_transform(param, r, scale=0.5) ** 2
    if not np.all(np.isfinite(terms)):
        return math.inf
    return math.fsum(terms) / R


# ---------------------------------------------------------------------------
# liminf scans


@dataclass(frozen=True)
class ScanResult:
    min_ratio: float
    argmin: int
    trace: tuple[tuple[int, float], ...]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["r", "ratio_star"])
        for r, v in self.trace:
            w.writerow([r, format(v, ".17g")])
        return buf.getvalue()


def _scan_block(atoms, q, lo, hi, modulus, residue):
    if modulus:
        start = lo + ((residue - lo) % modulus)
        r = np.arange(start, hi, modulus)
    else:
        r = np.arange(lo, hi)
    if r.size == 0:
        return r, np.empty(0)
    ratio = _atoms_scaled(atoms, r) / scaled_ball_volume(r, q)
    # positions that beat every earlier value in the block
    prefix = np.minimum.accumulate(ratio)
    is_record = np.empty(r.size, dtype=bool)
    is_record[0] = True
    is_record[1:] = ratio[1:] < prefix[:-1]
    return r[is_record], ratio[is_record]


def liminf_scan(
    measure: DiffractionMeasure,
    r_max: int,
    residue_filter: tuple[int, int] | None = None,
    r_min: int = 1,
    jobs: int = 1,
    block: int = SCAN_BLOCK,
) -> ScanResult:
    """Running minimum of NV*(r)/|B_r| over r_min <= r <= r_max.

    The range is cut into fixed blocks evaluated independently (optionally in
    threads) and merged in order, so the result does not depend on ``jobs``.
    Ties go to the smallest radius.
    """
    if r_max < 1:
        raise ValueError("r_max must be >= 1")
    if not measure.is_atomic:
        raise ValueError("liminf scans need an atomic measure")
    modulus, residue = residue_filter if residue_filter else (0, 0)
    if residue_filter and modulus < 1:
        raise ValueError("modulus must be positive")
    atoms = measure.sub_oscillatory_atoms
    q = measure.q
    bounds = [(lo, min(lo + block, r_max + 1)) for lo in range(r_min, r_max + 1, block)]
    work = lambda b: _scan_block(atoms, q, b[0], b[1], modulus, residue % modulus if modulus else 0)
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            parts = list(pool.map(work, bounds))
    else:
        parts = [work(b) for b in bounds]
    best, arg = math.inf, -1
    records = []
    for radii, values in parts:
        for r, v in zip(radii.tolist(), values.tolist()):
            if v < best:
                best, arg = v, r
                records.append((r, v))
    if arg < 0:
        raise ValueError("no radius in range satisfies the residue filter")
    return ScanResult(best, arg, _decimate(records))


def _decimate(records, limit=MAX_TRACE):
    if len(records) <= limit:
        return tuple(records)
    step = math.ceil(len(records) / (limit - 1))
    kept = records[::step]
    if kept[-1] != records[-1]:
        kept.append(records[-1])
    return tuple(kept)


def ordinary_nv_over_volume_sq(measure: DiffractionMeasure, radii) -> np.ndarray:
    """NV(r) / |B_r|^2, in scaled form (finite for large r)."""
    radii = np.asarray(radii)
    q = measure.q
    scaled = _atoms_scaled(measure.nontrivial_atoms, radii)
    # NV/|B_r|^2 = (NV/q^r) / ((|B_r|/q^r)^2 q^r)
    return scaled / (scaled_ball_volume(radii, q) ** 2 * np.power(float(q), radii.astype(float)))


# ---------------------------------------------------------------------------
# periodic minima and the Beck-type lower bound


def periodic_min(a: int, b: int, q: int) -> tuple[float, int]:
    """min over r in [0, b-1] of F(r) = (sin((r+1)a pi/b) + q^{-1/2} sin(r a pi/b))^2.

    Values that vanish in 50-digit arithmetic are reported as exact zeros.
    """
    if math.gcd(a, b) != 1:
        raise NotCoprime(f"gcd({a}, {b}) = {math.gcd(a, b)}")
    angle = RationalAngle(a, b)
    r = np.arange(b)
    f = sine_equation_lhs(q, angle, r) ** 2
    for i in np.flatnonzero(f < 1e-18):
        if abs(sine_equation_lhs_mp(q, angle, int(i))) < mpmath.mpf(10) ** -40:
            f[i] = 0.0
    k = int(np.argmin(f))
    return float(f[k]), k


@dataclass(frozen=True)
class BeckCheck:
    lhs: float
    rhs: float
    holds: bool


def beck_constant(q: int) -> float:
    return 2 * (q + 1) ** 2 / (q * (math.sqrt(q) + 1) ** 2)


def beck_bound_check(measure: DiffractionMeasure, R: int, eps: float, tol: float = QUAD_TOL) -> BeckCheck:
    """Compare (1/R) sum_{r<=R} NV*(r)/q^r with the constant times the c-function integral.

    ``eps`` trims [eps, tau/2 - eps] from the principal interval (in units of t).
    """
    if R < 1000:
        raise ValueError("the bound is asymptotic; use R >= 1000")
    q = measure.q
    tau = 2 * math.pi / math.log(q)
    if not 0 < eps < tau / 4:
        raise ValueError(f"eps must lie in (0, tau/4) = (0, {tau / 4})")
    lhs = math.fsum(a.mass * _cesaro_atom(a.param, R) for a in measure.sub_oscillatory_atoms)
    rhs_mass = math.fsum(
        a.mass * float(c_function_sq_array(a.param.value, q))
        for a in measure.atoms
        if a.param.branch is Branch.PRINCIPAL and eps <= a.param.value <= tau / 2 - eps
    )
    coef = measure.plancherel_coefficient
    if coef:
        kernel = lambda t: cesaro_kernel(t, q, R) * plancherel_density(t, q)
        # the Cesaro kernel oscillates with frequency ~R near the endpoints
        lhs += coef * integrate(kernel, 0.0, tau / 2, tol=tol, n_init_panels=max(1, R // 16))
        dens = lambda t: c_function_sq_array(t, q) * plancherel_density(t, q)
        rhs_mass += coef * integrate(dens, eps, tau / 2 - eps, tol=tol)
    rhs = beck_constant(q) * rhs_mass
    return BeckCheck(lhs, rhs, lhs >= rhs * (1 - BECK_SLACK))
