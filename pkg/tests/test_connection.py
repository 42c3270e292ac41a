import sympy

from exactwkb.connection import (Cycle, ddp_action, koike_local_matrix, koike_multiplier,
                                 voros_local_matrix, voros_period)
from exactwkb.local import INF
from exactwkb.wkb import SchrodingerInput, wkb_recursion


def test_koike_values():
    assert koike_multiplier(sympy.Rational(-1, 4)) == 2 * sympy.I
    assert sympy.simplify(koike_multiplier(0) + 2 * sympy.I) == 0


def test_local_matrices_unimodular():
    for o in (1, -1):
        assert sympy.simplify(voros_local_matrix(o).det() - 1) == 0
        assert sympy.simplify(koike_local_matrix(sympy.Rational(1, 3), o).det() - 1) == 0


def test_voros_inverse():
    M = voros_local_matrix(1) @ voros_local_matrix(1).inv()
    assert M.equals([[1, 0], [0, 1]])


def test_weber_residue_at_infinity():
    nu = sympy.Symbol("nu")
    c = wkb_recursion(SchrodingerInput.from_strings("x**2/4-nu", ("nu",)), 4)
    V = voros_period(c, Cycle("residue", INF))
    terms = {p: sympy.simplify(sympy.sympify(v.as_expr() if hasattr(v, "as_expr") else v))
             for p, v in V.series.items()}
    assert all(t == 0 for p, t in terms.items() if p >= 0)
    assert terms[-1] in (2 * sympy.pi * sympy.I * nu, -2 * sympy.pi * sympy.I * nu)


def test_ddp_action_factors():
    nu, hbar = sympy.symbols("nu hbar")
    X = sympy.exp(2 * sympy.pi * sympy.I * nu / hbar)
    assert sympy.simplify(ddp_action("+", nu, hbar) - (1 + X)) == 0
    assert sympy.simplify(ddp_action("-", nu, hbar) - X / (1 + X)) == 0


def test_ddp_lateral_ratio_numeric():
    import mpmath
    from exactwkb.connection import ddp_lateral_ratio
    from exactwkb.numerics import precision
    with precision(256):
        nu, hb = mpmath.mpc(0, 0.5), mpmath.mpf("0.5")
        r, _, _ = ddp_lateral_ratio(nu, hb)
        assert abs(r - (1 + mpmath.exp(2j * mpmath.pi * nu / hb))) < 1e-6
