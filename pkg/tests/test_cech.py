import cmath
import math

import pytest
from hypothesis import assume, given, settings, strategies as st

from uedalab.cech import (
    CycleCover,
    ObstructedError,
    coboundary,
    cover_from_json,
    holonomy_gap,
    nodal_bound_constant,
    nodal_ell,
    obstruction,
    primitive_bound,
    solve,
    ueda_bound_check,
)
from uedalab.exact import GaussianRational as GR
from uedalab.multiplier import Multiplier, circle_distance

I = GR(0, 1)


def test_constants_are_cocycles_for_trivial_bundle():
    cover = CycleCover(3, (1, 1, 1))
    assert coboundary(cover, (5, 5, 5)) == (0, 0, 0)
    assert coboundary(cover, (0, 0, 0)) == (0, 0, 0)


def test_coboundary_direct_substitution():
    sigma = cmath.exp(0.7j)
    assert coboundary(CycleCover.twisted(3, sigma), (1, 0, 0)) == (-1, 0, sigma)


def test_solve_twisted_by_i_exact():
    cover = CycleCover.twisted(3, I)
    rep = solve(cover, (1, 0, 0))
    assert rep.obstruction == 1
    assert rep.beta == (GR(-1, -1) / 2, GR(1, -1) / 2, GR(1, -1) / 2)
    assert coboundary(cover, rep.beta) == (1, 0, 0)
    assert not rep.resonant


def test_solve_trivial_holonomy_normalized():
    rep = solve(CycleCover(3, (1, 1, 1)), (1, -1, 0))
    assert rep.obstruction == 0
    assert rep.beta == (0, 1, 0)
    assert rep.used_normalization


def test_solve_zero_cochain():
    rep = solve(CycleCover.twisted(3, cmath.exp(1j)), (0, 0, 0))
    assert rep.beta == (0, 0, 0)


def test_obstruction_examples():
    triv = CycleCover(3, (1, 1, 1))
    assert obstruction(triv, (1, -1, 0)) == 0
    assert obstruction(triv, (1, 0, 0)) == 1
    cover = CycleCover.twisted(3, I)
    A = obstruction(cover, (1, 1, 1))
    rep = solve(cover, (1, 1, 1))
    assert rep.beta[0] == -A / (1 - I)
    assert coboundary(cover, rep.beta) == (1, 1, 1)


def test_obstructed_raises_with_value():
    with pytest.raises(ObstructedError, match="obstructed: nonzero class") as exc:
        solve(CycleCover(3, (1, 1, 1)), (1, 0, 0))
    assert exc.value.obstruction == 1


def test_float_resonance_tolerance():
    cover = CycleCover(3, (1, 1, 1))
    solve(cover, (1, -1, 1e-13))
    with pytest.raises(ObstructedError):
        solve(cover, (1, -1, 1e-6))


def test_near_resonant_flag():
    resonant, near = holonomy_gap(CycleCover.twisted(3, cmath.exp(2j * math.pi * 1e-10)))
    assert not resonant and near
    rep = solve(CycleCover.twisted(3, cmath.exp(2j * math.pi * 1e-10)), (1, 0, 0))
    assert rep.near_resonant


def test_bound_for_antipodal_holonomy():
    assert ueda_bound_check(CycleCover.twisted(3, -1), 2000, 7) <= 2


def test_bound_closed_form_single_edge():
    # alpha supported on edge (1,2): |beta| = |alpha_12| / |1 - sigma| on every chart
    for theta in (0.5, 0.3, 0.01, 1e-5):
        sigma = cmath.exp(2j * math.pi * theta)
        rep = solve(CycleCover.twisted(3, sigma), (2.0, 0, 0))
        expected = circle_distance(0, theta) * 2.0 / abs(1 - sigma) / 2.0
        assert rep.bound_ratio == pytest.approx(expected, rel=1e-12)


def test_bound_along_diophantine_approach_to_one():
    gold = Multiplier.golden_mean()
    for m in (1, 3, 8, 21, 55, 144):
        sigma = gold.sigma_power(m)
        assert ueda_bound_check(CycleCover.twisted(3, sigma), 200, m) <= 2


def test_primitive_bound_values():
    assert primitive_bound(CycleCover(3, (1, 1, 1))) == 2
    assert primitive_bound(CycleCover.twisted(3, -1)) == pytest.approx(3 / 2 + 2)


def test_nodal_examples():
    ell = nodal_ell(1, 0, I, 1)
    assert ell == GR(-1, 1) / 2
    assert 1 + ell == (0 + ell) / I
    assert nodal_ell(0, 0, 1j, 3) == 0
    c = 2 - 3j
    assert nodal_ell(c, c, cmath.exp(1j * math.pi / 5), 5) == pytest.approx(-c)


def test_nodal_torsion_rejected():
    with pytest.raises(ValueError, match="torsion"):
        nodal_ell(1, 0, I, 4)


def test_nodal_bound_constant():
    assert nodal_bound_constant(1) == pytest.approx(8.607e5, rel=1e-3)
    assert nodal_bound_constant(0) == 0
    assert nodal_bound_constant(2) == pytest.approx(2 * nodal_bound_constant(1))


def test_cover_validation():
    with pytest.raises(ValueError):
        CycleCover(2, (1, 1))
    with pytest.raises(ValueError):
        CycleCover(3, (1, 0, 1))
    with pytest.raises(ValueError):
        CycleCover.twisted(3, 1).edge_index(2, 1)


def test_cover_json():
    c = cover_from_json({"N": 4, "twist_edge": [2, 3], "sigma": {"re": "3/5", "im": "4/5"}}, exact=True)
    assert c.weights == (1, GR("3/5", "4/5"), 1, 1)
    assert c.holonomy == GR("3/5", "4/5")


# properties
unit = st.floats(0, 1, exclude_max=True).map(lambda t: cmath.exp(2j * math.pi * t))
cplx = st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False)


@settings(max_examples=200)
@given(st.integers(3, 8), unit, st.data())
def test_solve_inverts_coboundary(N, sigma, data):
    cover = CycleCover.twisted(N, sigma)
    assume(abs(1 - sigma) > 1e-3)
    alpha = data.draw(st.lists(cplx, min_size=N, max_size=N))
    rep = solve(cover, alpha)
    back = coboundary(cover, rep.beta)
    scale = max([1.0] + [abs(a) for a in alpha])
    assert max(abs(x - y) for x, y in zip(back, alpha)) <= 1e-9 * scale / abs(1 - sigma)


@settings(max_examples=100)
@given(st.integers(3, 6), st.data())
def test_coboundaries_have_zero_obstruction_at_trivial_holonomy(N, data):
    cover = CycleCover(N, (1,) * N)
    beta = data.draw(st.lists(st.fractions(-9, 9, max_denominator=9), min_size=N, max_size=N))
    assert obstruction(cover, coboundary(cover, beta)) == 0


@settings(max_examples=100)
@given(unit, st.lists(cplx, min_size=3, max_size=3))
def test_primitive_bound_dominates(sigma, alpha):
    assume(abs(1 - sigma) > 1e-6 and max(abs(a) for a in alpha) > 0)
    cover = CycleCover.twisted(3, sigma)
    rep = solve(cover, alpha)
    assert max(abs(b) for b in rep.beta) <= primitive_bound(cover) * max(abs(a) for a in alpha) * (1 + 1e-9)
