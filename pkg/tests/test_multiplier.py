import cmath
import math
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings, strategies as st

from uedalab.multiplier import (
    ArcBox,
    Multiplier,
    arc_partition,
    circle_distance,
    convergent_denominators,
    diophantine_check,
    divisor_profile,
    epsilon_constant,
    multiplier_from_json,
    unit_root,
    verify_epsilon,
)


def test_circle_distance_examples():
    assert circle_distance(0, 0.25) == 0.25
    assert circle_distance(0, 1.0) == 0
    assert circle_distance(0.9, 0.05) == pytest.approx(0.15, abs=1e-15)


@given(st.floats(-50, 50), st.floats(-50, 50))
def test_circle_distance_range_and_symmetry(a, b):
    d = circle_distance(a, b)
    assert 0 <= d <= 0.5
    assert d == pytest.approx(circle_distance(b, a), abs=1e-12)


def test_profile_torsion_examples():
    assert divisor_profile(Multiplier.rational(1, 3), 3).values == (1 / 3, 1 / 3, 0)
    assert divisor_profile(Multiplier.rational(1, 2), 4).values == (0.5, 0, 0.5, 0)


def test_profile_golden_values():
    prof = divisor_profile(Multiplier.golden_mean(), 5)
    expected = [0.381966, 0.236067, 0.145898, 0.472135, 0.090169]
    for m, v in enumerate(expected, start=1):
        assert prof[m] == pytest.approx(v, abs=1e-6)
    with pytest.raises(IndexError):
        prof[6]


@settings(max_examples=50)
@given(st.integers(-40, 40), st.integers(1, 40), st.integers(1, 120))
def test_profile_zero_iff_torsion(p, q, M):
    mult = Multiplier.rational(p, q)
    prof = divisor_profile(mult, M)
    for m in range(1, M + 1):
        assert 0 <= prof[m] <= 0.5
        assert (prof[m] == 0) == (m % mult.q == 0)


def _brute_profile(theta: mpmath.mpf, M: int):
    return [abs(m * theta - mpmath.nint(m * theta)) for m in range(1, M + 1)]


def test_golden_profile_matches_mpmath_brute_force():
    mpmath.mp.dps = 60
    theta = (mpmath.sqrt(5) - 1) / 2
    ref = _brute_profile(theta, 2000)
    prof = divisor_profile(Multiplier.golden_mean(), 2000)
    for m in range(1, 2001):
        assert prof[m] == pytest.approx(float(ref[m - 1]), rel=1e-12)


def test_golden_mean_is_diophantine():
    res = diophantine_check(Multiplier.golden_mean(), 0.25, 1, 100_000)
    assert res.passed and res.violating_m is None
    # the extremal value sits at m = 1, d = 1 - theta
    assert res.min_scaled == pytest.approx(0.381966, abs=1e-6)


def test_torsion_violates_at_denominator():
    for A, alpha in [(0.01, 1), (1e-9, 3), (0.3, 0.5)]:
        res = diophantine_check(Multiplier.rational(1, 3), A, alpha, 10)
        assert not res.passed
        if A < 1 / 3:
            assert res.violating_m == 3


def test_liouville_collapses():
    res = diophantine_check(Multiplier.liouville(4), 0.25, 1, 10_000)
    assert not res.passed and res.violating_m <= 10_000


def test_liouville_deep_approximant():
    # at m = 10^6 the fourth term dominates: d < 10^{-17}, far below A/m
    mult = Multiplier.liouville(4)
    assert mult.divisor(10**6) < 1e-17
    assert mult.theta == Fraction(1, 10) + Fraction(1, 100) + Fraction(1, 10**6) + Fraction(1, 10**24)


def test_diophantine_rejects_bad_parameters():
    with pytest.raises(ValueError):
        diophantine_check(Multiplier.golden_mean(), 0, 1, 10)
    with pytest.raises(ValueError):
        diophantine_check(Multiplier.golden_mean(), 0.1, 1, 0)


def test_arc_partition_examples():
    (box,) = arc_partition(1, 1)
    assert box.center == 0 and box.re_half_width == 0.5 and box.im_half_width == 0.25
    boxes = arc_partition(2, 1)
    assert [b.center for b in boxes] == [0, Fraction(1, 2)]
    assert all(b.re_half_width == 0.25 for b in boxes)
    six = arc_partition(2, 3)
    assert len(six) == 6
    for nu, b in enumerate(six):
        assert abs(b.torsion_point - cmath.exp(2j * math.pi * nu / 6)) < 1e-15
        assert abs(b.torsion_point ** 6 - 1) < 1e-14


@settings(max_examples=60)
@given(st.integers(1, 30), st.integers(1, 3), st.floats(0, 1, exclude_max=True))
def test_arcs_cover_the_circle(m, M0, x):
    hits = [b for b in arc_partition(m, M0) if b.contains_xi(complex(x, 0))]
    assert 1 <= len(hits) <= 2


def test_box_contains_only_its_torsion_point():
    box = ArcBox(5, 2)
    assert box.contains(box.torsion_point)
    assert not box.contains(unit_root(3, 5))
    assert not box.contains(0)


def test_box_rejects_bad_nu():
    with pytest.raises(ValueError):
        ArcBox(3, 3)


def test_epsilon_examples():
    eps = epsilon_constant()
    assert eps == 4
    assert abs(1 - (-1)) == pytest.approx(eps * 0.5)
    assert abs(1 - 1j) >= eps * 0.25
    assert verify_epsilon(20_000) == pytest.approx(4.0)


def test_sigma_power_uses_exact_reduction():
    mult = Multiplier.rational(1, 7)
    assert mult.sigma_power(7) == 1
    assert abs(mult.sigma_power(3) - cmath.exp(6j * math.pi / 7)) < 1e-15


def test_continued_fraction_builder():
    mult = Multiplier.from_continued_fraction([0, 2, 3])
    assert mult.theta == Fraction(3, 7)
    assert convergent_denominators([0, 2, 3]) == [1, 2, 7]


def test_multiplier_json_forms():
    assert multiplier_from_json({"rational": [2, 6]}).theta == Fraction(1, 3)
    assert multiplier_from_json({"real": "0.125"}).theta == Fraction(1, 8)
    assert multiplier_from_json({"liouville": 2}).theta == Fraction(11, 100)
    assert multiplier_from_json({"cf": [0, 1, 1]}).theta == Fraction(1, 2)
    assert multiplier_from_json({"golden": 30}).theta == Multiplier.golden_mean(30).theta
    with pytest.raises(ValueError):
        multiplier_from_json({"pi": 1})
