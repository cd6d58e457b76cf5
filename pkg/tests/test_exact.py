from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from uedalab.exact import GaussianRational as GR, dump_scalar, is_exact, parse_scalar, to_exact

fr = st.fractions(min_value=-20, max_value=20, max_denominator=30)
gr = st.builds(GR, fr, fr)


@given(gr, gr, gr)
def test_field_laws(a, b, c):
    assert a * (b + c) == a * b + a * c
    assert (a * b) * c == a * (b * c)
    if b != 0:
        assert (a / b) * b == a


@given(gr)
def test_conjugate_and_modulus(a):
    assert a * a.conjugate() == a.abs2()
    assert abs(complex(a)) == pytest.approx(abs(a))


@given(gr, st.integers(-4, 4))
def test_integer_powers(a, k):
    if a != 0:
        assert a**k * a ** (-k) == 1
        assert a**k == (a ** abs(k) if k >= 0 else 1 / a ** abs(k))


def test_equality_with_numbers():
    assert GR(0) == 0 and GR(3, 0) == Fraction(3)
    assert GR(0, 1) == 1j
    assert hash(GR(2)) == hash(2)


def test_float_mixing_falls_back_to_complex():
    out = GR(1, 1) * 0.5
    assert isinstance(out, complex) and out == 0.5 + 0.5j


def test_to_exact_refuses_floats():
    with pytest.raises(TypeError):
        to_exact(0.1)
    assert is_exact(GR(1)) and is_exact(Fraction(1, 3)) and not is_exact(1.0)


def test_json_round_trip():
    for x in (GR(Fraction(1, 3), -2), GR(5), GR(0, Fraction(-7, 9))):
        assert parse_scalar(dump_scalar(x), exact=True) == x
    assert parse_scalar({"re": "1/2"}, exact=True) == Fraction(1, 2)
    assert parse_scalar([1, 2], exact=False) == 1 + 2j
    assert parse_scalar(0.1, exact=True) == Fraction(1, 10)
