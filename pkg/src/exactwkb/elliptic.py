"""Weierstrass data for the cubic y^2 = 4x^3 + 2t x + u.

Invariants are g2 = -2t, g3 = -u.  Periods of dx/y, x dx/y and y dx over
a cycle encircling two roots are computed on the straight segment between
them with the substitution x = e_i + (e_j - e_i)(1 - cos th)/2, which makes
the integrand smooth and even in th, so the trapezoid rule converges
geometrically.  The three integrals share one branch of y, so the cycle
orientation is consistent between them.

The Weierstrass functions come from Jacobi theta functions with
tau = omega_B / omega_A:

    zeta(z) = (eta_A / omega_A) z + (pi / omega_A) th1'(v) / th1(v),
    v = pi z / omega_A,

and wp = -zeta', with higher derivatives from wp'' = 6 wp^2 - g2/2.
"""

import mpmath


class DegenerateCurve(ArithmeticError):
    pass


def discriminant(t, u):
    return -8 * mpmath.mpmathify(t) ** 3 - 27 * mpmath.mpmathify(u) ** 2


def cubic_roots(t, u):
    return [mpmath.mpc(r) for r in mpmath.polyroots([4, 0, 2 * mpmath.mpmathify(t), u],
                                                     maxsteps=200, extraprec=40)]


def _seg_integrals(ei, ej, ek):
    """(oint dx/y, oint x dx/y, oint y dx) over the cycle around [ei, ej]."""
    d = ej - ei
    s0 = mpmath.sqrt(ei - ek)

    def vals(th):
        c = mpmath.cos(th)
        s = (1 - c) / 2
        x = ei + d * s
        rk = s0 * mpmath.sqrt((x - ek) / (ei - ek))
        return x, rk, mpmath.sin(th) ** 2

    tol = mpmath.eps * 16
    n = 16
    prev = None
    while True:
        h = mpmath.pi / n
        acc = [mpmath.mpc(0)] * 3
        for k in range(n + 1):
            w = h / 2 if k in (0, n) else h
            x, rk, s2 = vals(k * h)
            acc[0] += w / rk
            acc[1] += w * x / rk
            acc[2] += w * s2 * rk
        cur = (-1j * acc[0], -1j * acc[1], 1j * d * d * acc[2])
        if prev is not None and all(abs(a - b) <= tol * max(1, abs(a)) for a, b in zip(cur, prev)):
            return cur
        if n > 2 ** 16:
            raise DegenerateCurve("period quadrature did not converge")
        prev = cur
        n *= 2


def _wp_poly_derivs(kmax):
    """wp^(k) as polynomials in (P, P') for k <= kmax.

    Each polynomial is a dict {(i, j): coeff} for P^i P'^j, with coefficients
    that are dicts in the symbol g2: {power: rational}.  Uses
    dP = P', dP' = 6P^2 - g2/2.
    """
    from fractions import Fraction
    polys = [{(1, 0): {0: Fraction(1)}}]
    for _ in range(kmax):
        cur = polys[-1]
        out = {}

        def add(key, g, c):
            slot = out.setdefault(key, {})
            slot[g] = slot.get(g, 0) + c

        for (i, j), cg in cur.items():
            for g, c in cg.items():
                if i:
                    add((i - 1, j + 1), g, c * i)
                if j:
                    add((i + 2, j - 1), g, 6 * c * j)
                    add((i, j - 1), g + 1, -Fraction(1, 2) * c * j)
        polys.append({k: {g: c for g, c in v.items() if c} for k, v in out.items()})
    return polys


class EllipticData:
    """Roots, periods, quasi-periods and Weierstrass functions for (t, u).

    ``ref_roots`` orders the roots by proximity to given points (used when
    following a curve through a family); otherwise roots are sorted by real
    then imaginary part.  The A-cycle encircles roots[a_pair] with
    orientation ``a_sign`` and the B-cycle roots[b_pair]; B is oriented so
    that Im(omega_B/omega_A) > 0.
    """

    def __init__(self, t, u, a_pair=(1, 2), b_pair=(0, 1), ref_roots=None, a_sign=1):
        self.t = mpmath.mpmathify(t)
        self.u = mpmath.mpmathify(u)
        self.g2 = -2 * self.t
        self.g3 = -self.u
        self.D = discriminant(self.t, self.u)
        scale = max(1, abs(self.t) ** 3, abs(self.u) ** 2)
        if abs(self.D) <= mpmath.eps ** 0.5 * scale:
            raise DegenerateCurve("discriminant vanishes at t=%s u=%s" % (self.t, self.u))
        roots = cubic_roots(self.t, self.u)
        if ref_roots is not None:
            ordered = []
            pool = list(roots)
            for r in ref_roots:
                j = min(range(len(pool)), key=lambda i: abs(pool[i] - r))
                ordered.append(pool.pop(j))
            roots = ordered
        else:
            roots.sort(key=lambda z: (float(mpmath.re(z)), float(mpmath.im(z))))
        self.roots = roots
        self.a_pair, self.b_pair = tuple(a_pair), tuple(b_pair)
        A = [a_sign * v for v in self._cycle(self.a_pair)]
        self.a_sign = a_sign
        B = self._cycle(self.b_pair)
        self.omega_A, self.omega_B = A[0], B[0]
        self.eta_A, self.eta_B = -A[1], -B[1]
        self.period_A, self.period_B = A[2], B[2]
        self.b_sign = 1
        if mpmath.im(self.omega_B / self.omega_A) < 0:
            self.b_sign = -1
            self.omega_B, self.eta_B, self.period_B = -self.omega_B, -self.eta_B, -self.period_B
        self.tau = self.omega_B / self.omega_A
        self.nome = mpmath.exp(1j * mpmath.pi * self.tau)
        self.c = self.eta_A / self.omega_A
        self._poly = _wp_poly_derivs(12)

    def _cycle(self, pair):
        i, j = pair
        k = 3 - i - j
        return _seg_integrals(self.roots[i], self.roots[j], self.roots[k])

    # -- lattice reduction ------------------------------------------------

    def reduce(self, z):
        """(z0, m, n) with z = z0 + m omega_A + n omega_B and z0 near the origin cell."""
        z = mpmath.mpc(z)
        oa, ob = self.omega_A, self.omega_B
        det = mpmath.im(mpmath.conj(oa) * ob)
        b = mpmath.im(mpmath.conj(oa) * z) / det
        a = mpmath.im(z * mpmath.conj(ob)) / det
        m, n = int(mpmath.nint(a)), int(mpmath.nint(b))
        return z - m * oa - n * ob, m, n

    def _theta_logderivs(self, z, nd):
        v = mpmath.pi * z / self.omega_A
        th = [mpmath.jtheta(1, v, self.nome, k) for k in range(nd + 1)]
        return th

    def zeta(self, z):
        z0, m, n = self.reduce(z)
        th = self._theta_logderivs(z0, 1)
        val = self.c * z0 + (mpmath.pi / self.omega_A) * th[1] / th[0]
        return val + m * self.eta_A + n * self.eta_B

    def wp_pair(self, z):
        """(wp(z), wp'(z))."""
        z0, _, _ = self.reduce(z)
        t0, t1, t2, t3 = self._theta_logderivs(z0, 3)
        l1 = t1 / t0
        l2 = t2 / t0 - l1 ** 2
        l3 = t3 / t0 - 3 * t2 * t1 / t0 ** 2 + 2 * l1 ** 3
        k = mpmath.pi / self.omega_A
        return -self.c - k ** 2 * l2, -k ** 3 * l3

    def wp(self, z):
        return self.wp_pair(z)[0]

    def wp_deriv(self, z, order):
        """wp^(order)(z)."""
        P, Pp = self.wp_pair(z)
        return self.eval_deriv_poly(order, P, Pp)

    def eval_deriv_poly(self, order, P, Pp):
        while order >= len(self._poly):
            self._poly = _wp_poly_derivs(2 * len(self._poly))
        total = mpmath.mpc(0)
        for (i, j), cg in self._poly[order].items():
            coef = sum(mpmath.mpf(c.numerator) / c.denominator * self.g2 ** g for g, c in cg.items())
            total += coef * P ** i * Pp ** j
        return total

    def wp_inverse(self, x, sheet=1):
        """z near 0 with wp(z) = x and z ~ sheet * x^(-1/2) for large x."""
        x = mpmath.mpc(x)
        z = sheet / mpmath.sqrt(x)
        for _ in range(200):
            P, Pp = self.wp_pair(z)
            dz = (P - x) / Pp
            z -= dz
            if abs(dz) <= mpmath.eps * 8 * max(1, abs(z)):
                break
        else:
            raise DegenerateCurve("inverse wp did not converge at x=%s" % x)
        return z

    # -- local series -------------------------------------------------------

    def half_periods(self):
        """The three half periods with wp at each (the matching root)."""
        out = []
        for r in (self.omega_A / 2, self.omega_B / 2, (self.omega_A + self.omega_B) / 2):
            w = self.wp(r)
            e = min(self.roots, key=lambda e: abs(e - w))
            out.append((r, e))
        return out

    def laurent_at_zero(self, top):
        """Coefficients c with wp(t) = t^-2 + sum_{k>=1} c[k] t^(2k-2), up to t^top."""
        K = top // 2 + 2
        c = [mpmath.mpc(0)] * (K + 1)
        if K >= 2:
            c[2] = self.g2 / 20
        if K >= 3:
            c[3] = self.g3 / 28
        for k in range(4, K + 1):
            c[k] = 3 * sum(c[m] * c[k - m] for m in range(2, k - 1)) / ((2 * k + 1) * (k - 3))
        return c

    def taylor_at_half_period(self, e, top):
        """a[n] with wp(r + t) = sum a[n] t^n, wp(r) = e, up to n = top."""
        a = [mpmath.mpc(0)] * (top + 1)
        a[0] = mpmath.mpc(e)
        for n in range(0, top - 1):
            s = 6 * sum(a[i] * a[n - i] for i in range(n + 1))
            if n == 0:
                s -= self.g2 / 2
            a[n + 2] = s / ((n + 2) * (n + 1))
        return a

    # -- checks ------------------------------------------------------------------

    def ode_residual(self, z):
        P, Pp = self.wp_pair(z)
        return abs(Pp ** 2 - (4 * P ** 3 - self.g2 * P - self.g3))

    def legendre_residual(self):
        return abs(self.eta_A * self.omega_B - self.eta_B * self.omega_A - 2j * mpmath.pi)

    def eta_from_theta(self):
        q = self.nome
        d1 = mpmath.jtheta(1, 0, q, 1)
        d3 = mpmath.jtheta(1, 0, q, 3)
        return -(mpmath.pi ** 2 / self.omega_A) * d3 / (3 * d1)

    def log_sigma(self, z):
        """log of the Weierstrass sigma function (principal branch of the theta factor)."""
        v = mpmath.pi * z / self.omega_A
        q = self.nome
        return (mpmath.log(self.omega_A / mpmath.pi) + self.c * z * z / 2
                + mpmath.log(mpmath.jtheta(1, v, q) / mpmath.jtheta(1, 0, q, 1)))

    def to_json(self):
        def c(z):
            z = mpmath.mpc(z)
            return [float(z.real), float(z.imag)]
        return {
            "t": c(self.t), "u": c(self.u),
            "roots": [c(r) for r in self.roots],
            "omega_A": c(self.omega_A), "omega_B": c(self.omega_B),
            "eta_A": c(self.eta_A), "eta_B": c(self.eta_B),
            "discriminant": c(self.D),
        }


def elliptic_data(t, u, cycle_choice=None):
    """EllipticData with an optional cycle choice dict (a_pair, b_pair, ref_roots)."""
    kw = dict(cycle_choice or {})
    return EllipticData(t, u, **kw)
