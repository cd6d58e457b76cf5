import cmath
import math
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from uedalab import cech
from uedalab.exact import GaussianRational as GR
from uedalab.linearize import (
    TransitionSystem,
    compute_h,
    linearize,
    order_constants,
    order_weights,
    random_system,
    residual_scale,
    system_from_json,
    ueda_class,
    verify_residual,
)
from uedalab.multiplier import Multiplier
from uedalab.series import MultiSeries

I = GR(0, 1)
PYTH = GR(Fraction(3, 5), Fraction(4, 5))  # |sigma| = 1, not a root of unity


def zero_F(N, order):
    return tuple((MultiSeries.zero(1, order),) for _ in range(N))


def test_h2_is_f2():
    f = {0: {2: 3}, 1: {2: GR(1, 2)}, 2: {2: -1}}
    sysm = TransitionSystem.univariate(3, PYTH, f, 4)
    h = compute_h(sysm, zero_F(3, 1), 2)
    assert h[(0, (2,))] == (3, GR(1, 2), -1)


def test_h3_recursion():
    c2, c3 = Fraction(2, 3), Fraction(-5, 7)
    f = {e: {2: c2, 3: c3} for e in range(3)}
    sysm = TransitionSystem.univariate(3, PYTH, f, 4)
    phis = (Fraction(1, 2), Fraction(-3), Fraction(4, 9))
    F = tuple((MultiSeries(1, 2, {(2,): p}),) for p in phis)
    h = compute_h(sysm, F, 3)[(0, (3,))]
    assert h == tuple(c3 + 2 * c2 * p for p in phis)


def test_h_vanishes_without_nonlinearity():
    sysm = TransitionSystem.univariate(3, PYTH, {}, 6)
    for m in range(2, 7):
        assert all(v == 0 for hs in compute_h(sysm, zero_F(3, m - 1), m).values() for v in hs)


def test_order_weights_examples():
    s_i = TransitionSystem.univariate(3, I, {}, 6)
    assert order_weights(s_i, 0, (2,))[-1] == I
    assert order_weights(s_i, 0, (5,))[-1] == 1
    triv = TransitionSystem.univariate(3, 1, {}, 6)
    assert all(w == 1 for m in range(2, 7) for w in order_weights(triv, 0, (m,)))


def test_sigma_i_order_two_matches_cocycle_solver():
    sysm = TransitionSystem.univariate(3, I, {0: {2: 1}}, 2)
    res = linearize(sysm)
    assert res.status_label == "linearized-to-order-2"
    beta = cech.solve(cech.CycleCover.twisted(3, I), (1, 0, 0)).beta
    assert tuple(res.coefficient(j, 0, (2,)) for j in (1, 2, 3)) == beta
    assert set(verify_residual(sysm, res).values()) == {0}


def test_sigma_i_float_residual():
    sysm = TransitionSystem.univariate(3, 1j, {0: {2: 1.0}}, 2)
    res = linearize(sysm)
    assert max(verify_residual(sysm, res).values()) <= 1e-12


def test_trivial_system():
    sysm = TransitionSystem.univariate(3, PYTH, {}, 8)
    res = linearize(sysm)
    assert res.status == "linearized"
    assert all(s.coeffs == {} for row in res.F for s in row)
    assert all(v == 0 for v in verify_residual(sysm, res).values())
    assert all(v == 0 for m in range(2, 9) for v in ueda_class(sysm, m).values())


def test_finite_type_detection():
    sysm = TransitionSystem.univariate(3, 1, {0: {2: 1}}, 5)
    res = linearize(sysm)
    assert res.status_label == "finite-type-at-order-2"
    assert res.obstructions[2][(0, (2,))] == 1
    assert res.order_reached == 1
    assert ueda_class(sysm, 2)[(0, (2,))] == 1


def test_cancelling_cycle_sum_is_unobstructed():
    sysm = TransitionSystem.univariate(3, 1, {0: {2: 2}, 1: {2: -5}, 2: {2: 3}}, 2)
    assert ueda_class(sysm, 2)[(0, (2,))] == 0
    assert linearize(sysm).status == "linearized"


def test_exact_residual_vanishes():
    sysm = random_system(3, [PYTH], 12, seed=3, exact=True)
    res = linearize(sysm)
    assert res.status == "linearized"
    assert all(v == 0 for v in verify_residual(sysm, res).values())


def test_float_residual_golden_order_20():
    sigma = Multiplier.golden_mean().sigma
    sysm = random_system(3, [sigma], 20, seed=11)
    res = linearize(sysm)
    assert max(verify_residual(sysm, res).values()) <= 1e-9 * residual_scale(sysm, res)


def test_growth_bounded_for_diophantine_sigma():
    sysm = random_system(3, [Multiplier.golden_mean().sigma], 20, seed=5)
    res = linearize(sysm, check_residual=False)
    roots = [res.max_abs_order(m) ** (1 / m) for m in range(2, 21) if res.max_abs_order(m) > 0]
    assert max(roots) < 10


def test_gauge_changes_F_but_not_residual():
    f = {0: {2: 1, 3: 0}, 1: {2: -1, 3: 2}, 2: {3: 1}}
    probe = TransitionSystem.univariate(3, 1, f, 3)
    A3 = ueda_class(probe, 3)[(0, (3,))]
    f[0][3] = -A3 + f[0][3] - 3  # absorb the order-3 cycle sum, keep edge 0 nonzero
    f[1][3] = f[1][3] + 3
    sysm = TransitionSystem.univariate(3, 1, f, 3)
    r0 = linearize(sysm, gauge=0)
    r1 = linearize(sysm, gauge=1)
    assert r0.status == r1.status == "linearized"
    assert r0.coefficient(1, 0, (2,)) == 0 and r1.coefficient(1, 0, (2,)) == 1
    assert any(r0.coefficient(j, 0, (3,)) != r1.coefficient(j, 0, (3,)) for j in (1, 2, 3))
    assert all(v == 0 for v in verify_residual(sysm, r0).values())
    assert all(v == 0 for v in verify_residual(sysm, r1).values())


def test_torsion_multiplier_hits_resonance():
    sysm = random_system(3, [Multiplier.rational(1, 4).sigma], 8, seed=2)
    res = linearize(sysm)
    assert res.status_label == "finite-type-at-order-5"


def test_multivariate_exact_residual():
    sysm = random_system(3, [PYTH, GR(Fraction(5, 13), Fraction(12, 13))], 6, seed=1, exact=True)
    res = linearize(sysm)
    assert res.status == "linearized" and res.r == 2
    assert all(v == 0 for v in verify_residual(sysm, res).values())


def test_order_constants_are_primitive_bounds():
    sysm = TransitionSystem.univariate(3, -1, {}, 4)
    K = order_constants(sysm, 4)
    assert K[2] == pytest.approx(3.5)  # weight -1 at m = 2
    assert K[3] == 2  # trivial weight at m = 3


def test_system_json_rejects_nonidentity_linear_part():
    bad = {"N": 3, "sigma": 1, "edges": [{"from": 2, "to": 1, "components": [
        {"vars": 1, "order": 2, "coeffs": [{"index": [1], "re": 2}]}]}]}
    with pytest.raises(ValueError):
        system_from_json(bad)


def test_system_json_round_trip():
    sysm = random_system(3, [PYTH], 5, seed=9, exact=True)
    again = system_from_json(sysm.to_json(), exact=True)
    assert again.maps == sysm.maps and again.weights == sysm.weights


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 2**32), st.integers(2, 5))
def test_order_locality(seed, d):
    sysm = random_system(3, [PYTH], 6, seed=seed, exact=True)
    base = linearize(sysm, check_residual=False)
    # perturb every f-coefficient of degree > d
    nonlin = [
        [s + MultiSeries(1, 6, {(k,): GR(k, 1) for k in range(d + 1, 7)}) for s in row]
        for row in sysm.nonlinear
    ]
    other = TransitionSystem.from_nonlinear(3, 1, sysm.weights, nonlin, 6)
    pert = linearize(other, check_residual=False)
    for j in (1, 2, 3):
        for m in range(2, d + 1):
            assert base.coefficient(j, 0, (m,)) == pert.coefficient(j, 0, (m,))


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 2**32), st.floats(0.05, 0.45))
def test_float_residual_property(seed, theta):
    sysm = random_system(3, [cmath.exp(2j * math.pi * theta)], 8, seed=seed)
    res = linearize(sysm)
    if res.status == "linearized":
        assert max(verify_residual(sysm, res).values()) <= 1e-9 * residual_scale(sysm, res)
