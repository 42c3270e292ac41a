"""Airy and Weber walkthrough: WKB terms, a Voros period and a Borel sum."""

import mpmath
import sympy

from exactwkb.borel import binet_exp_w, borel_transform, pade_borel_sum, weber_w_series
from exactwkb.connection import Cycle, voros_period
from exactwkb.wkb import Normalization, SchrodingerInput, wkb_log_series, wkb_recursion

airy = wkb_recursion(SchrodingerInput.from_strings("x"), 3)
print("Airy P_0 =", airy.p(0).even)
amp = wkb_log_series(airy, Normalization("infinity", 0), sign=1).amplitude()
print("psi_+ amplitude:", [sympy.simplify(amp._get(k)) for k in range(3)])

weber = wkb_recursion(SchrodingerInput.from_strings("x**2/4-nu", ("nu",)), 7)
V = voros_period(weber, Cycle("relative_infinity"))
for m in (1, 3, 5, 7):
    print("relative period, hbar^%d:" % m, V.series._get(m))

mpmath.mp.prec = 256
hbar = mpmath.mpf("0.1")
s = pade_borel_sum(borel_transform(weber_w_series(1, 60).exp()), hbar)
print("Borel sum of e^W at hbar = 0.1:", mpmath.nstr(s.value, 20))
print("Gamma function closed form:   ", mpmath.nstr(binet_exp_w(1, hbar), 20))
