import math

import numpy as np
import pytest

from conftest import tau
from treehu.covering_oracle import oracle_nv
from treehu.diffraction import poisson_diffraction
from treehu.errors import NotCoprime, NotStealthy, WrongBranch
from treehu.rational_atoms import find_solutions
from treehu.spectral import SpectralParam, alpha_to_lambda
from treehu.spherical import ball_transform
from treehu.variance import (
    asymptotic_mean,
    beck_bound_check,
    cesaro_kernel,
    cesaro_mean,
    cesaro_nv_star,
    liminf_scan,
    nv_curve,
    ordinary_nv_over_volume_sq,
    periodic_min,
    stealthy_average,
)


def test_nv_examples(measures):
    assert nv_curve(measures["K4"], 3).nv == pytest.approx([0.1875, 0, 0.75, 0.75], abs=1e-12)
    row = nv_curve(measures["K33"], 1).rows[1]
    assert row.nv == pytest.approx(2 / 9, abs=1e-12)
    assert row.nv_star == pytest.approx(1 / 9, abs=1e-12)
    assert nv_curve(poisson_diffraction(2), 2).rows[2].nv == pytest.approx(10, rel=1e-6)


@pytest.mark.parametrize("key", ["K4", "K33", "petersen", "ladder24"])
def test_oracle_equivalence(graphs, measures, key):
    nv = nv_curve(measures[key], 20).nv
    for a, b in zip(nv, oracle_nv(graphs[key], 0, 20)):
        assert abs(a - b) <= 1e-6 * max(1, abs(b))


@pytest.mark.parametrize("key", ["K4", "K33", "petersen", "ladder24"])
def test_nv_rows(measures, key):
    m = measures[key]
    sign = m.sign_atom
    for row in nv_curve(m, 30).rows:
        assert row.nv >= row.nv_star >= 0
        expected = sign.mass * ball_transform(sign.param, row.r) ** 2 if sign else 0.0
        assert row.nv - row.nv_star == pytest.approx(expected, rel=1e-9, abs=1e-9)
        assert row.ratio_star == pytest.approx(row.nv_star / row.volume, rel=1e-12, abs=1e-300)


@pytest.mark.parametrize("q", [2, 3])
def test_poisson_nv_is_volume(q):
    for row in nv_curve(poisson_diffraction(q), 10).rows:
        assert row.nv == pytest.approx(row.volume, rel=1e-6)


def test_nv_csv(measures):
    lines = nv_curve(measures["K4"], 2).to_csv().splitlines()
    assert lines[0] == "r,volume,nv,nv_star,ratio_star"
    assert lines[1].startswith("0,1,0.1875,0.1875,")


def test_asymptotic_mean_examples():
    assert asymptotic_mean(SpectralParam.principal(tau(2) / 4, 2)) == pytest.approx(0.75, abs=1e-15)
    assert asymptotic_mean(SpectralParam.principal(tau(4) / 4, 4)) == pytest.approx(0.625, abs=1e-15)
    with pytest.raises(WrongBranch):
        asymptotic_mean(SpectralParam.trivial(2))


@pytest.mark.parametrize(
    "param",
    [SpectralParam.principal(tau(2) / 4, 2), SpectralParam.principal(tau(2) / 6, 2), alpha_to_lambda(-1.0, 2)],
)
def test_cesaro_converges(param):
    assert cesaro_mean(param, 10**5) == pytest.approx(asymptotic_mean(param), abs=1e-3)


def test_cesaro_small_horizon_nonnegative():
    p = SpectralParam.principal(0.9, 3)
    direct = sum(ball_transform(p, r) ** 2 / 3**r for r in range(2))
    assert cesaro_mean(p, 1) == pytest.approx(direct, rel=1e-13) and direct >= 0


@pytest.mark.parametrize("q", [2, 3])
@pytest.mark.parametrize("R", [1, 7, 1000])
def test_cesaro_kernel_closed_form(q, R):
    ts = np.linspace(0.03, 0.97, 9) * tau(q) / 2
    closed = cesaro_kernel(ts, q, R)
    direct = [cesaro_mean(SpectralParam.principal(t, q), R) for t in ts]
    assert np.allclose(closed, direct, rtol=1e-9)


def test_stealthy_average(measures):
    assert stealthy_average(measures["K4"]) == pytest.approx(3 / 28, abs=1e-14)
    assert stealthy_average(measures["K33"]) == pytest.approx(1 / 12, abs=1e-14)
    for key in ("K4", "K33", "petersen"):
        assert stealthy_average(measures[key]) == pytest.approx(cesaro_nv_star(measures[key], 10**5), abs=1e-3)
    with pytest.raises(NotStealthy):
        stealthy_average(measures["ladder24"])
    with pytest.raises(NotStealthy):
        stealthy_average(poisson_diffraction(2))


def test_scan_examples(measures):
    assert liminf_scan(measures["K4"], 10**5, r_min=10).min_ratio < 1e-4
    assert liminf_scan(measures["K33"], 10**4, r_min=10).min_ratio > 1e-2


def test_k33_scan_values(measures):
    # the tau/4 atom makes NV*(r)/q^r two-periodic: (1/9)*1 and (1/9)*(1/2)
    res = liminf_scan(measures["K33"], 1000, r_min=10)
    assert res.min_ratio == pytest.approx((1 / 9) * 0.5 / 3, rel=1e-6)


def test_scan_record_monotone_and_prefix(measures):
    m = measures["petersen"]
    full = liminf_scan(m, 20000, r_min=5, block=1000)
    values = [v for _, v in full.trace]
    radii = [r for r, _ in full.trace]
    assert values == sorted(values, reverse=True)
    assert radii == sorted(radii)
    shorter = liminf_scan(m, 5000, r_min=5, block=777)
    assert full.min_ratio <= shorter.min_ratio
    assert set(shorter.trace) <= set(full.trace) or shorter.trace[-1] in full.trace


def test_scan_brute_force(measures):
    m = measures["petersen"]
    radii = np.arange(3, 400)
    ratio = np.array([nv_curve(m, 399).rows[r].ratio_star for r in radii])
    res = liminf_scan(m, 399, r_min=3, block=50)
    assert res.argmin == radii[np.argmin(ratio)]
    assert res.min_ratio == pytest.approx(ratio.min(), rel=1e-9)


def test_scan_job_independent(measures):
    a = liminf_scan(measures["K4"], 300000, r_min=10, jobs=1)
    b = liminf_scan(measures["K4"], 300000, r_min=10, jobs=8)
    assert a == b


def test_scan_residue_filter(measures):
    res = liminf_scan(measures["petersen"], 5000, (4, 2), r_min=10)
    assert all(r % 4 == 2 for r, _ in res.trace)


def test_k33_ordinary_nv_quadratic(measures):
    x = ordinary_nv_over_volume_sq(measures["K33"], np.arange(10, 1001))
    assert x.min() > 1e-3
    # and it agrees with the unscaled ratio where that is representable
    row = nv_curve(measures["K33"], 40).rows[40]
    assert ordinary_nv_over_volume_sq(measures["K33"], np.array([40]))[0] == pytest.approx(row.nv / row.volume**2, rel=1e-10)


def test_periodic_min_examples():
    assert periodic_min(1, 2, 2) == (pytest.approx(0.5, abs=1e-15), 1)
    assert periodic_min(3, 4, 2) == (0.0, 2)
    assert periodic_min(5, 6, 3) == (0.0, 4)
    with pytest.raises(NotCoprime):
        periodic_min(2, 6, 2)


@pytest.mark.parametrize("q", [2, 3, 4, 5])
def test_periodic_min_zero_iff_solution(q):
    hits = {(s.a, s.b) for s in find_solutions(q, 12)}
    for b in range(2, 13):
        for a in range(1, b):
            if math.gcd(a, b) != 1:
                continue
            value, _ = periodic_min(a, b, q)
            assert (value == 0.0) == ((a, b) in hits)
            if (a, b) not in hits:
                assert value > 1e-6


@pytest.mark.parametrize("key", ["K4", "petersen"])
def test_beck_examples(measures, key):
    assert beck_bound_check(measures[key], 10**4, 0.1).holds


def test_beck_poisson():
    res = beck_bound_check(poisson_diffraction(2), 10**3, 0.2)
    assert res.holds
    # Poisson: NV/q^r -> (q+1)/(q-1), so the Cesaro mean tends to 3 for q = 2
    assert res.lhs == pytest.approx(3.0, rel=2e-3)


def test_beck_requires_long_horizon(measures):
    with pytest.raises(ValueError):
        beck_bound_check(measures["K4"], 100, 0.1)
