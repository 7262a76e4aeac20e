from fractions import Fraction

import pytest

from sphemb.laurent import LaurentPoly, NegativeExponentError, T


def test_arithmetic_and_order():
    p = 2 * T + T * T
    q = LaurentPoly.constant(3) - T
    assert (p + q).order() == 0
    assert (p * q).order() == 1
    assert (p - p).is_zero
    assert (p - p).order() is None
    assert (T**3).order() == 3
    assert (p / 2) * 2 == p


def test_laurent_exponents_and_limits():
    inv = LaurentPoly.t_power(-1)
    assert inv.has_negative_exponents
    with pytest.raises(NegativeExponentError):
        inv.value_at_zero()
    assert (inv * T).value_at_zero() == 1
    p = LaurentPoly({0: Fraction(5), 2: Fraction(1, 3)})
    assert p.value_at_zero() == 5


def test_coercion_with_numbers():
    p = 1 + T
    assert p == T + 1
    assert Fraction(1, 2) * p == p / 2
    assert (p - 1) == T
    assert (1 - p) == -T
    assert LaurentPoly.constant(0).is_zero
    assert p != 1
