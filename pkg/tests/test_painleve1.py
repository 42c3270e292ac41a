import mpmath
import pytest

from exactwkb import painleve1 as P


@pytest.fixture(scope="module")
def curve():
    with mpmath.workdps(30):
        yield P.solve_u(-5, 1)


def test_a_period_constraint(curve):
    with mpmath.workdps(30):
        assert abs(curve.nu_of_u() - 1) < 1e-25
        assert abs(curve.E.tau.real) < 1e-25 and curve.E.tau.imag > 0


def test_bilinear_relation(curve):
    with mpmath.workdps(30):
        assert P.bilinear_residual(curve) < 1e-20


def test_f1_branch_continuous(curve):
    with mpmath.workdps(30):
        a = curve.neighbour(curve.t, curve.nu + mpmath.mpf("0.01")).F1()
        assert abs(a - curve.F1()) < 0.05


def test_a_cycle_shift(curve):
    with mpmath.workdps(30):
        s = P.a_cycle_shift(curve, 3)
        assert abs(s[0] - 2j * mpmath.pi) < 1e-20
        assert all(abs(v) < 1e-20 for v in s[1:])


def test_tau_periodic_in_rho(curve):
    with mpmath.workdps(30):
        hb = mpmath.mpf("0.1")
        rho = P.centred_rho(curve, mpmath.mpf("0.2"))
        a = P.tau_evaluate(curve, rho, hb, K=4)
        b = P.tau_evaluate(curve, rho + hb, hb, K=4)
        d = a.log_tau - b.log_tau
        d -= 2j * mpmath.pi * mpmath.nint(d.imag / (2 * mpmath.pi))
        assert abs(d) < 1e-20


def test_tail_not_converged(curve):
    with mpmath.workdps(30):
        with pytest.raises(P.TailNotConverged):
            P.tau_evaluate(curve, mpmath.mpf("0.2"), mpmath.mpf("0.1"), K=1)


def test_fd_weights_exact_on_polynomials():
    with mpmath.workdps(30):
        h = mpmath.mpf("0.1")
        vals = [(k * h) ** 3 for k in range(-2, 3)]
        d = P.derivatives(vals, h, [1, 3])
        assert abs(d[1]) < 1e-25 and abs(d[3] - 6) < 1e-20


def test_perturbed_table_fails():
    minus, _ = P.stokes_tables()
    bad = P.StokesTable(minus.side, dict(minus.s))
    bad.s[0] = P.I * P.XA
    ok, j, _ = P.cyclic_check(bad)
    assert not ok and j is not None


def test_ddp_entrywise():
    ok, bad = P.ddp_map_check()
    assert ok and not bad
