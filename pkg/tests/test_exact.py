from fractions import Fraction

import pytest

from cherndirac.exact import ExactScalar, ONE, I, SQRT2, INV_SQRT2, exact_rank


def test_sqrt2_squares_to_two():
    assert SQRT2 * SQRT2 == ExactScalar(2)
    assert INV_SQRT2 * SQRT2 == ONE


def test_i_squares_to_minus_one():
    assert I * I == -ONE


def test_field_operations():
    x = ExactScalar(Fraction(1, 3), 2, Fraction(-1, 2), 0)
    y = ExactScalar(5, Fraction(1, 7), 1, 1)
    assert x + y - y == x
    assert (x * y) * x == x * (y * x)
    assert x * (y + y) == x * y + x * y


def test_inverse_random_elements():
    vals = [ExactScalar(1, 1, 0, 0), ExactScalar(0, 0, 1, 0),
            ExactScalar(Fraction(2, 3), -1, 4, Fraction(1, 5)),
            ExactScalar(0, 1, 0, -1)]
    for v in vals:
        assert v * v.inverse() == ONE
    with pytest.raises(ZeroDivisionError):
        ExactScalar().inverse()


def test_conjugation_negates_imaginary_pair_only():
    v = ExactScalar(1, 2, 3, 4)
    c = v.conjugate()
    assert (c.a, c.b, c.c, c.d) == (1, 2, -3, -4)
    assert (v * v.conjugate()).is_real()


def test_sqrt2_power():
    assert ExactScalar.sqrt2_power(2) == ExactScalar(2)
    assert ExactScalar.sqrt2_power(-1) == INV_SQRT2
    assert ExactScalar.sqrt2_power(3) * ExactScalar.sqrt2_power(-3) == ONE


def test_to_complex():
    v = ExactScalar(1, 1, 0, -1)
    z = v.to_complex()
    assert abs(z.real - (1 + 2 ** 0.5)) < 1e-15
    assert abs(z.imag + 2 ** 0.5) < 1e-15


def test_exact_rank():
    O, l = ExactScalar(), ONE
    assert exact_rank([[l, O], [O, l]]) == 2
    assert exact_rank([[l, l], [l, l]]) == 1
    assert exact_rank([[SQRT2, ONE], [ExactScalar(2), SQRT2]]) == 1
    assert exact_rank([[O, O], [O, O]]) == 0
