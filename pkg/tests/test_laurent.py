import pytest

from exactwkb.laurent import XA, XB, I, LaurentXY, NonLaurentResult


def test_substitution_cancels_exactly():
    p = I * (XA ** -1 - XA ** -1 * XB)
    one = LaurentXY.const(1)
    assert p.substitute(XA=XA * (one - XB)) == I * XA ** -1


def test_non_laurent_result_raises():
    one = LaurentXY.const(1)
    with pytest.raises(NonLaurentResult):
        (XA ** -1).substitute(XA=one - XB)


def test_i_squared():
    assert I * I == LaurentXY.const(-1)
    assert (XA * XA ** -1 - LaurentXY.const(1)).is_zero()
