import mpmath
import pytest

from exactwkb.elliptic import DegenerateCurve, EllipticData


@pytest.fixture(scope="module")
def E():
    with mpmath.workdps(30):
        yield EllipticData(-5, 3)


def test_weierstrass_ode(E):
    with mpmath.workdps(30):
        for z in (mpmath.mpc("0.3", "0.2"), mpmath.mpc("1.1", "-0.4")):
            assert E.ode_residual(z) < 1e-20


def test_legendre_relation(E):
    with mpmath.workdps(30):
        assert E.legendre_residual() < 1e-20
        assert abs(E.eta_from_theta() - E.eta_A) < 1e-20


def test_periodicity(E):
    with mpmath.workdps(30):
        z = mpmath.mpc("0.37", "0.11")
        assert abs(E.wp(z + E.omega_A) - E.wp(z)) < 1e-20
        assert abs(E.zeta(z + E.omega_B) - E.zeta(z) - E.eta_B) < 1e-20


def test_inverse(E):
    with mpmath.workdps(30):
        z = E.wp_inverse(mpmath.mpc(4, 1))
        assert abs(E.wp(z) - mpmath.mpc(4, 1)) < 1e-20


def test_half_periods_hit_roots(E):
    with mpmath.workdps(30):
        for r, e in E.half_periods():
            assert abs(E.wp(r) - e) < 1e-15


def test_degenerate():
    with pytest.raises(DegenerateCurve):
        EllipticData(-6, 8)     # -8t^3 - 27u^2 = 1728 - 1728
