import mpmath

from exactwkb.borel import (binet_exp_w, borel_transform, hypergeometric_2f1, oracle_borel,
                            pade_borel_sum, weber_w_series)
from exactwkb.numerics import precision


def test_hypergeometric_routes_agree():
    with precision(128):
        a, b, c = mpmath.mpf(1) / 6, mpmath.mpf(5) / 6, mpmath.mpf(1) / 2
        s = hypergeometric_2f1(a, b, c, mpmath.mpf("0.3"), route="series")
        k = hypergeometric_2f1(a, b, c, mpmath.mpf("0.3"), route="connection")
        assert abs(s - k) < 1e-15


def test_weber_borel_transform_matches_closed_form():
    with precision(128):
        bw = borel_transform(weber_w_series(1, 40))
        orc = oracle_borel("weber_W", nu=1)
        for z in (mpmath.mpf("0.5"), mpmath.mpc(1, 1)):
            assert abs(bw(z) - orc(z)) < 1e-20


def test_binet_resummation():
    with precision(128):
        r = pade_borel_sum(borel_transform(weber_w_series(1, 40).exp()), mpmath.mpf("0.2"))
        assert abs(r.value / binet_exp_w(1, mpmath.mpf("0.2")) - 1) < 1e-10
