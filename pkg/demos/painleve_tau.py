"""Painleve I at t = -5: the spectral curve, free energies and the tau function.

Takes about half a minute.
"""

import mpmath

from exactwkb import painleve1 as P

mpmath.mp.dps = 40
curve = P.solve_u(-5, 1)
print("u(t=-5, nu=1) =", mpmath.nstr(curve.u.real, 20))
print("tau = omega_B/omega_A =", mpmath.nstr(curve.E.tau, 12))
for g in range(3):
    print("F_%d =" % g, mpmath.nstr(curve.F(g), 15))

rho = P.centred_rho(curve, mpmath.mpf("0.1"))
rows = []
for hb in ("0.1", "0.05", "0.025"):
    r = P.painleve_residual(curve, rho, mpmath.mpf(hb))
    rows.append(r.residual)
    print("hbar %-6s K=%d  q=%s  elliptic q=%s  residual %s" % (
        hb, r.K, mpmath.nstr(r.q.real, 10), mpmath.nstr(r.boutroux.real, 10),
        mpmath.nstr(abs(r.residual), 3)))
print("residual slope in hbar: %.2f" % P.fitted_slope([0.1, 0.05, 0.025], rows))
