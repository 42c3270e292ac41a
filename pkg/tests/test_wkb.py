import sympy

from exactwkb.wkb import (NotRegularSingular, SchrodingerInput, characteristic_exponents,
                          exact_odd_primitive, wkb_recursion)

import pytest


def test_airy_recursion_residuals_vanish():
    c = wkb_recursion(SchrodingerInput.from_strings("x"), 6)
    for m in range(-1, 5):
        for s in (1, -1):
            r = c.residual(m, s)
            assert not r.even and not r.odd


def test_airy_p2_even():
    x = sympy.Symbol("x")
    c = wkb_recursion(SchrodingerInput.from_strings("x"), 2)
    assert sympy.simplify(c.p(2).even.as_expr() + sympy.Rational(15, 64) / x ** 4) == 0


def test_odd_parts_have_rational_primitives_for_weber():
    c = wkb_recursion(SchrodingerInput.from_strings("x**2/4-nu", ("nu",)), 5)
    for m in (1, 3, 5):
        assert exact_odd_primitive(c.odd(m)) is not None


def test_gauss_exponents_at_zero():
    pot = ["(thi**2*x**2+(th1**2-th0**2-thi**2)*x+th0**2)/(x**2*(x-1)**2)", "0",
           "-(x**2-x+1)/(4*x**2*(x-1)**2)"]
    G = SchrodingerInput.from_strings(pot, ("th0", "th1", "thi"))
    plus, minus = characteristic_exponents(G, 0, 3)
    assert plus is not None and minus is not None


def test_airy_has_no_regular_singular_point_at_zero():
    with pytest.raises(NotRegularSingular):
        characteristic_exponents(SchrodingerInput.from_strings("x"), 0, 2)
