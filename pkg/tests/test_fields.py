from fractions import Fraction

import pytest

from exactwkb.fields import DivisionByZeroNorm, GaussianRational, ParamField, SqrtExtElem, field_sqrt
from exactwkb.series import HbarSeries, LogOfZeroConstantTerm


def test_gaussian_rational_arithmetic():
    g = GaussianRational(1, 2)
    assert g * g == GaussianRational(-3, 4)
    assert g.inverse() * g == GaussianRational(1)
    assert g / GaussianRational(0, 1) == GaussianRational(2, -1)
    assert GaussianRational(Fraction(1, 3)).to_mpc() == pytest.approx(1 / 3)


def test_gaussian_zero_inverse():
    with pytest.raises((DivisionByZeroNorm, ZeroDivisionError)):
        GaussianRational(0).inverse()


def test_param_field_derivatives():
    pf = ParamField(("nu",))
    f = pf("x**2/4-nu")
    assert pf.ddx(f) == pf("x/2")
    assert pf.dparam(f, "nu") == pf("-1")
    assert pf.evaluate(f, x=2, nu=1) == 0


def test_sqrt_extension_squares_back():
    pf = ParamField(("nu",))
    Q = pf("x**2/4-nu")
    r = SqrtExtElem.sqrt(Q)
    assert (r * r).even == Q
    assert not (r * r).odd
    assert field_sqrt(pf("x**2")) == pf("x")


def test_series_exp_log_roundtrip_exact():
    s = HbarSeries([Fraction(0), Fraction(1), Fraction(-2, 3)], 0, 6)
    assert s.exp().log() == s


def test_series_log_of_zero():
    with pytest.raises(LogOfZeroConstantTerm):
        HbarSeries([Fraction(0), Fraction(1)], 0, 3).log()
