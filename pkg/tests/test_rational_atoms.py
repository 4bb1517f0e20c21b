import math

import mpmath
import pytest

from treehu.errors import NotCoprime
from treehu.rational_atoms import (
    RationalAngle,
    find_solutions,
    lambda_rat_member,
    niven_scan,
    quadratic_relation,
    quadratic_scan,
    rational_angle_of,
    sine_equation_lhs,
)
from treehu.spectral import SpectralParam

KNOWN_SOLUTIONS = {2: {(3, 4, 2), (5, 12, 9), (11, 12, 9)}, 3: {(5, 6, 4)}}


def triples(sols):
    return {(s.a, s.b, s.r) for s in sols}


def test_angle_validation():
    with pytest.raises(NotCoprime):
        RationalAngle(2, 4)
    with pytest.raises(ValueError):
        RationalAngle(4, 4)
    assert sorted([RationalAngle(1, 3), RationalAngle(1, 2), RationalAngle(2, 3)]) == [
        RationalAngle(1, 2),
        RationalAngle(1, 3),
        RationalAngle(2, 3),
    ]


def test_lhs_examples():
    assert abs(sine_equation_lhs(2, RationalAngle(3, 4), 2)) < 1e-14
    assert abs(sine_equation_lhs(3, RationalAngle(5, 6), 4)) < 1e-14
    for q in (2, 5, 11):
        assert sine_equation_lhs(q, RationalAngle(1, 2), 0) == 1.0


@pytest.mark.parametrize("q, a, b", [(2, 3, 7), (3, 5, 11), (5, 1, 9)])
def test_lhs_periodicity(q, a, b):
    angle = RationalAngle(a, b)
    sign = (-1) ** a
    for r in range(3 * b):
        v = sine_equation_lhs(q, angle, r)
        assert sine_equation_lhs(q, angle, r + 2 * b) == pytest.approx(v, abs=1e-14)
        assert sine_equation_lhs(q, angle, r + b) == pytest.approx(sign * v, abs=1e-14)


def test_lhs_against_mpmath():
    for q, a, b in [(2, 5, 12), (7, 3, 10), (4, 1, 13)]:
        for r in range(b):
            with mpmath.workdps(30):
                ref = mpmath.sin((r + 1) * a * mpmath.pi / b) + mpmath.sin(r * a * mpmath.pi / b) / mpmath.sqrt(q)
            assert sine_equation_lhs(q, RationalAngle(a, b), r) == pytest.approx(float(ref), abs=1e-15)


@pytest.mark.parametrize("q", [2, 3])
def test_exceptional_solutions(q):
    sols = find_solutions(q, 12)
    assert triples(sols) == KNOWN_SOLUTIONS[q]
    assert all(s.explained for s in sols)


@pytest.mark.parametrize("q", range(4, 21))
def test_no_solutions_for_larger_q(q):
    assert find_solutions(q, 12) == []


def test_output_sorted_and_job_independent():
    one = find_solutions(2, 30, jobs=1)
    many = find_solutions(2, 30, jobs=8)
    assert one == many
    keys = [(s.b, s.a, s.r) for s in one]
    assert keys == sorted(keys)


def test_membership():
    assert not lambda_rat_member(2, RationalAngle(3, 4))
    assert lambda_rat_member(2, RationalAngle(1, 2))
    assert lambda_rat_member(4, RationalAngle(5, 12))
    assert not lambda_rat_member(3, RationalAngle(5, 6))
    assert lambda_rat_member(3, RationalAngle(3, 4))


def test_rational_angle_of():
    q = 2
    assert rational_angle_of(RationalAngle(3, 8).to_param(q)) == RationalAngle(3, 8)
    assert rational_angle_of(SpectralParam.principal(math.acos(-1 / (2 * math.sqrt(2))) / math.log(2), 2)) is None
    assert rational_angle_of(SpectralParam.trivial(2)) is None


def test_niven():
    hits = niven_scan(50)
    assert {h.b for h in hits} <= {1, 2, 3}
    assert {(h.a, h.b) for h in hits} == {(0, 1), (1, 1), (1, 2), (1, 3), (2, 3)}
    assert {h.cosine for h in hits} <= {0, 1, -1, 0.5, -0.5}


def test_cos_pi_over_7_not_rational():
    from fractions import Fraction

    c = math.cos(math.pi / 7)
    f = Fraction(c).limit_denominator(2500)
    assert abs(c - float(f)) > 1e-12


def test_quadratic_scan():
    hits = quadratic_scan(12)
    assert {h.angle.b for h in hits} == {4, 5, 6}
    rel = {(h.angle.a, h.angle.b): h.relation for h in hits}
    assert rel[(1, 4)] == (2, 0, -1)
    assert rel[(1, 5)] == (4, -2, -1)
    # every coprime angle with b in {4, 5, 6} is found
    assert len(hits) == 2 + 4 + 2


def test_quadratic_relation_rejects_cubic():
    assert quadratic_relation(math.cos(math.pi / 7)) is None
    assert quadratic_relation(math.cos(math.pi / 9)) is None
