"""Borel transform, Pade-Borel summation and Borel-plane singularity scans.

A series  e^{c/hbar} sum_m a_m hbar^{m + alpha}  (alpha > 0) is sent to

    B(zeta) = sum_m a_m (zeta - zeta0)^{m + alpha - 1} / Gamma(m + alpha),   zeta0 = -c,

so that  int_{zeta0}^{zeta0 + oo e^{i theta}} e^{-zeta/hbar} B(zeta) dzeta  gives back
the series term by term.  A constant term (alpha = 0 part) is carried
separately and added to the Laplace integral.
"""

from dataclasses import dataclass, field
from fractions import Fraction

import mpmath

from .series import HbarSeries


class BorelError(ArithmeticError):
    pass


class MissingPrefactor(BorelError):
    pass


class SingularityOnRay(BorelError):
    pass


class TooFewCoefficients(BorelError):
    pass


class ParameterDegenerate(BorelError):
    pass


class InvalidParameters(BorelError):
    pass


@dataclass
class BorelSeries:
    """b_m = a_m / Gamma(m + alpha) around ``point``; ``offset`` = alpha - 1."""
    point: object
    coeffs: list
    alpha: Fraction
    constant: object = 0
    radius: object = None

    def __post_init__(self):
        self.point = mpmath.mpc(self.point)
        self.coeffs = [mpmath.mpc(c) for c in self.coeffs]
        self.alpha = Fraction(self.alpha)
        if self.radius is None:
            self.radius = _root_test(self.coeffs)

    @property
    def offset(self):
        return self.alpha - 1

    def __call__(self, zeta, terms=None):
        """Truncated Taylor sum (inside the disc of convergence)."""
        t = mpmath.mpc(zeta) - self.point
        cs = self.coeffs[:terms] if terms else self.coeffs
        s = mpmath.polyval(cs[::-1], t)
        return s * _pow(t, self.alpha - 1)

    def to_rows(self):
        return [(m, self.coeffs[m]) for m in range(len(self.coeffs))]


def _num(c):
    if isinstance(c, Fraction):
        return mpmath.mpf(c.numerator) / c.denominator
    return mpmath.mpmathify(c)


def _pow(t, e):
    if e == 0:
        return mpmath.mpf(1)
    return mpmath.power(t, mpmath.mpf(e.numerator) / e.denominator)


def _root_test(coeffs):
    """Radius estimate from the last third of the nonzero coefficients."""
    pts = [(m, abs(c)) for m, c in enumerate(coeffs) if m > 0 and abs(c) > 0]
    if len(pts) < 3:
        return mpmath.inf
    tail = pts[len(pts) * 2 // 3:]
    return min(c ** (-mpmath.mpf(1) / m) for m, c in tail)


def borel_transform(series, prefactor=None, alpha=None):
    """Borel transform of an amplitude series or of a WKB log series.

    ``series`` is either a WkbLogSeries (prefactor and power read from it)
    or an HbarSeries sum a_p hbar^p with ``prefactor`` c giving e^{c/hbar}.
    For a plain HbarSeries the ``alpha`` of the lowest positive power
    defaults to 1, and an hbar^0 term becomes the ``constant``.
    """
    if hasattr(series, "amplitude"):
        s = series.series
        if s.leading > -1 and prefactor is None:
            raise MissingPrefactor("WKB log series without an hbar^-1 term")
        c = _num(s._get(-1)) if prefactor is None else prefactor
        amp = series.amplitude()
        head = mpmath.exp(_num(s._get(0)))
        coeffs = [head * _num(amp._get(m)) for m in range(amp.order + 1)]
        a = Fraction(series.hbar_power)
        b = [coeffs[m] / mpmath.gamma(m + _num(a)) for m in range(len(coeffs))]
        return BorelSeries(-mpmath.mpc(c), b, a)
    if not isinstance(series, HbarSeries):
        raise TypeError("expected an HbarSeries or WkbLogSeries")
    if series.leading < 0:
        raise MissingPrefactor("negative hbar powers must be passed as the prefactor")
    c = 0 if prefactor is None else prefactor
    const = series._get(0)
    a = Fraction(1) if alpha is None else Fraction(alpha)
    # a_p hbar^p = a_p hbar^{(p - 1) + 1}
    b = []
    for m in range(0, series.order):
        p = m + 1
        b.append(_num(series._get(p)) / mpmath.gamma(m + _num(a)))
    return BorelSeries(-mpmath.mpc(_num(c)), b, a, constant=mpmath.mpc(_num(const)))


@dataclass
class BorelSumResult:
    value: object
    error: object
    hbar: object
    direction: object
    method: dict = field(default_factory=dict)

    def to_json(self):
        from .numerics import json_number
        return {"value": json_number(self.value), "error": mpmath.nstr(self.error, 5),
                "hbar": mpmath.nstr(self.hbar, 15), "direction": mpmath.nstr(self.direction, 15),
                "method": self.method}


def _pade(coeffs, n):
    """[n/n] Pade, dropping to [n-1/n-1] if the Toeplitz system is singular
    (series with only even or only odd terms)."""
    for k in (n, n - 1, n - 2):
        if k < 1:
            break
        try:
            return mpmath.pade(coeffs[:2 * k + 1], k, k)
        except ZeroDivisionError:
            continue
    raise BorelError("Pade approximant is degenerate at order %d" % n)


def _pade_eval(p, q, t):
    return mpmath.polyval(p[::-1], t) / mpmath.polyval(q[::-1], t)


def _pade_poles(q):
    qq = list(q)
    while len(qq) > 1 and abs(qq[-1]) < mpmath.mpf(10) ** (-mpmath.mp.dps + 5):
        qq.pop()
    if len(qq) < 2:
        return []
    try:
        return list(mpmath.polyroots(qq[::-1], maxsteps=200, extraprec=2 * mpmath.mp.prec))
    except mpmath.libmp.NoConvergence:
        return []


def _default_order(n):
    return max((n - 1) // 2, 1)


def _gl_nodes(degree):
    from mpmath.calculus.quadrature import GaussLegendre
    return GaussLegendre(mpmath.mp).get_nodes(-1, 1, degree, mpmath.mp.prec)


def _fixed_quad(f, pts, degree=4):
    nodes = _gl_nodes(degree)
    total = mpmath.mpc(0)
    for a, b in zip(pts, pts[1:]):
        h = (b - a) / 2
        m = (a + b) / 2
        total += h * mpmath.fsum(w * f(m + h * x) for x, w in nodes)
    return total


def _laplace(p, q, alpha, hbar, theta, tol, panels=24, degree=4):
    """int_0^{oo e^{i theta}} e^{-t/hbar} t^{alpha-1} R(t) dt with R = p/q.

    Fixed Gauss-Legendre panels on [0, T], T chosen so that the weight
    e^{-T cos(theta)/hbar} is below ``tol``; the tail is dropped.
    """
    e = mpmath.expj(theta)
    c = mpmath.cos(theta)
    if c <= 0:
        raise BorelError("ray is not in the half plane of convergence")
    T = hbar / c * (mpmath.log(1 / tol) + 10)
    if alpha == Fraction(1, 2):
        # t = s^2 e^{i theta}
        se = 2 * mpmath.sqrt(e)

        def f(s):
            t = s * s * e
            return se * mpmath.exp(-t / hbar) * _pade_eval(p, q, t)
        return _fixed_quad(f, _panel_nodes(mpmath.sqrt(T), panels), degree)

    def f(r):
        t = r * e
        return e * mpmath.exp(-t / hbar) * _pow(t, alpha - 1) * _pade_eval(p, q, t)
    return _fixed_quad(f, _panel_nodes(T, panels), degree)


def _panel_nodes(S, n):
    # panels refined near 0, where the weight is concentrated
    return [S * (mpmath.mpf(k) / n) ** 2 for k in range(n + 1)]


def _stable_poles(coeffs, n):
    _, q1 = _pade(coeffs, n)
    _, q0 = _pade(coeffs, n - 2) if n > 3 else _pade(coeffs, n)
    a = _pade_poles(q1)
    b = _pade_poles(q0)
    out = []
    for z in a:
        if not b:
            continue
        d = min(abs(z - w) for w in b)
        if d <= 0.01 * max(abs(z), mpmath.mpf(1) / 100):
            out.append(z)
    return out


def _angle_gap(z, theta):
    """Angular distance of the direction of z from theta."""
    d = mpmath.arg(z) - theta
    return abs(mpmath.arg(mpmath.expj(d)))


def pade_borel_sum(bs, hbar, direction=0, order=None, tol=None, guard=1e-8):
    """Laplace transform of the Pade approximant of ``bs`` along a ray.

    ``direction`` is the ray angle theta.  A stable Pade pole whose
    direction (seen from the expansion point) lies within ``guard`` of the
    ray raises SingularityOnRay.
    """
    hbar = mpmath.mpf(hbar)
    theta = mpmath.mpf(direction)
    n = order or _default_order(len(bs.coeffs))
    if 2 * n + 1 > len(bs.coeffs):
        raise TooFewCoefficients("need %d coefficients for Pade order %d" % (2 * n + 1, n))
    if tol is None:
        tol = mpmath.mpf(10) ** (-min(mpmath.mp.dps - 5, 30))
    if all(c == 0 for c in bs.coeffs):
        return BorelSumResult(mpmath.mpc(bs.constant), mpmath.mpf(0), hbar, theta,
                              {"pade_order": n, "nodes": 0})
    for z in (_stable_poles(bs.coeffs, n) if guard else ()):
        if _angle_gap(z, theta) < guard:
            raise SingularityOnRay("Borel singularity near %s on the ray" % mpmath.nstr(bs.point + z, 10))
    pref = mpmath.exp(-bs.point / hbar)
    vals = []
    for m in (n, n - 1):
        p, q = _pade(bs.coeffs, m)
        vals.append(pref * _laplace(p, q, bs.alpha, hbar, theta, tol) + bs.constant)
    return BorelSumResult(vals[0], abs(vals[0] - vals[1]), hbar, theta,
                          {"pade_order": n, "nodes": 24 * len(_gl_nodes(4)), "quadrature": "gauss-legendre"})


def lateral_borel_sums(bs, hbar, direction=0, eps=1e-3, order=None, spread=0.25, band=0.05):
    """Borel sums just above and just below the ray ``direction``.

    The Laplace integral does not change when the ray turns through a
    sector free of singularities, so each side is evaluated at angle
    ``spread`` from the singular direction, where the Pade approximant is
    far from the poles it uses to mimic the branch cuts on that direction.
    Stable Pade poles between ``band`` and ``spread`` shrink the turn.
    Returned results are labelled with direction +- eps.
    """
    theta = mpmath.mpf(direction)
    n = order or _default_order(len(bs.coeffs))
    poles = _stable_poles(bs.coeffs, n)
    out = []
    for s in (1, -1):
        gaps = [mpmath.arg(mpmath.expj(mpmath.arg(z) - theta)) * s for z in poles]
        inside = [g for g in gaps if band < g <= spread]
        delta = min(inside) / 2 + band / 2 if inside else mpmath.mpf(spread)
        r = pade_borel_sum(bs, hbar, theta + s * delta, order=n, guard=0)
        r.method["turned_to"] = mpmath.nstr(theta + s * delta, 8)
        r.direction = theta + s * mpmath.mpf(eps)
        out.append(r)
    return tuple(out)


@dataclass
class SingularityScan:
    singularities: list
    weights: list

    def nearest(self):
        if not self.singularities:
            return None
        return self.singularities[0]

    def to_json(self):
        from .numerics import json_number
        return [{"zeta": json_number(z, 15), "weight": mpmath.nstr(w, 5)}
                for z, w in zip(self.singularities, self.weights)]


def scan_borel_singularities(bs, order=None, min_coefficients=20):
    """Pade poles that persist from order N - 2 to N, clustered."""
    if len(bs.coeffs) < min_coefficients:
        raise TooFewCoefficients("a scan needs at least %d coefficients" % min_coefficients)
    n = order or _default_order(len(bs.coeffs))
    _, q1 = _pade(bs.coeffs, n)
    _, q0 = _pade(bs.coeffs, n - 2)
    a = _pade_poles(q1)
    b = _pade_poles(q0)
    found = []
    for z in a:
        if not b:
            break
        d = min(abs(z - w) for w in b)
        rel = d / max(abs(z), mpmath.mpf(1) / 100)
        if rel < 0.01:
            found.append((z, 1 - rel * 100))
    # merge points closer than 1% of their modulus
    clusters = []
    for z, w in sorted(found, key=lambda t: abs(t[0])):
        for c in clusters:
            if abs(c[0] - z) < 0.01 * abs(z):
                c[1].append(z)
                break
        else:
            clusters.append([z, [z], w])
    sing = [bs.point + c[1][0] for c in clusters]
    weights = [mpmath.mpf(len(c[1])) * c[2] for c in clusters]
    return SingularityScan(sing, weights)


# -- Gauss hypergeometric function

_SERIES_RADIUS = mpmath.mpf(0.6)


def _hyp_series(a, b, c, w):
    term = mpmath.mpc(1)
    s = term
    k = 0
    eps = mpmath.mpf(2) ** (-mpmath.mp.prec - 4)
    while True:
        term *= (a + k) * (b + k) / ((c + k) * (k + 1)) * w
        s += term
        k += 1
        if abs(term) <= eps * abs(s) and k > 2:
            return s
        if k > 20000:
            raise BorelError("hypergeometric series did not converge")


def _is_int(z, tol=None):
    z = mpmath.mpc(z)
    tol = tol or mpmath.mpf(10) ** (-mpmath.mp.dps + 5)
    return abs(z.imag) < tol and abs(z.real - mpmath.nint(z.real)) < tol


def hypergeometric_2f1(a, b, c, w, route=None):
    """Gauss 2F1(a, b; c; w).

    Series for |w| <= 0.6, the w -> 1 - w connection formula for
    |1 - w| <= 0.6, and mpmath elsewhere.  ``route`` = "series" or
    "connection" forces a path.
    """
    a, b, c, w = (mpmath.mpc(v) for v in (a, b, c, w))
    if _is_int(c) and mpmath.re(c) <= 0:
        raise ParameterDegenerate("c is a non-positive integer")
    if route is None:
        if abs(w) <= _SERIES_RADIUS:
            route = "series"
        elif abs(1 - w) <= _SERIES_RADIUS:
            route = "connection"
        else:
            route = "mpmath"
    if route == "series":
        return _hyp_series(a, b, c, w)
    if route == "connection":
        d = c - a - b
        if _is_int(d):
            raise ParameterDegenerate("c - a - b is an integer (logarithmic case)")
        g = mpmath.gamma
        rg = mpmath.rgamma
        t1 = g(c) * g(d) * rg(c - a) * rg(c - b) * _hyp_series(a, b, 1 - d, 1 - w)
        t2 = (mpmath.power(1 - w, d) * g(c) * g(-d) * rg(a) * rg(b)
              * _hyp_series(c - a, c - b, 1 + d, 1 - w))
        return t1 + t2
    return mpmath.hyp2f1(a, b, c, w)


# -- closed-form oracles

def _airy_plus(x):
    x = mpmath.mpc(x)
    S = mpmath.mpf(2) / 3 * mpmath.power(x, mpmath.mpf(3) / 2)
    C = mpmath.sqrt(3) / (2 * mpmath.sqrt(mpmath.pi))

    def f(zeta):
        w = (zeta + S) / (2 * S)
        return C / x * mpmath.power(w, -0.5) * hypergeometric_2f1(mpmath.mpf(1) / 6, mpmath.mpf(5) / 6, 0.5, w)
    return f


def _airy_minus(x):
    x = mpmath.mpc(x)
    S = mpmath.mpf(2) / 3 * mpmath.power(x, mpmath.mpf(3) / 2)
    C = mpmath.sqrt(3) / (2 * mpmath.sqrt(mpmath.pi))

    def f(zeta):
        w = (zeta + S) / (2 * S)
        return C / x * mpmath.power(w - 1, -0.5) * hypergeometric_2f1(mpmath.mpf(1) / 6, mpmath.mpf(5) / 6, 0.5, 1 - w)
    return f


def bessel_exponents(lam):
    """alpha, beta with alpha + beta = 2 and alpha * beta = -4 lam."""
    lam = mpmath.mpmathify(lam)
    r = mpmath.sqrt(1 + 4 * lam)
    return 1 + r, 1 - r


def _bessel(x, lam, sign):
    x = mpmath.mpc(x)
    al, be = bessel_exponents(lam)
    C = 1 / (2 * mpmath.sqrt(mpmath.pi))

    def f(zeta):
        w = zeta / (4 * mpmath.sqrt(x)) + mpmath.mpf(1) / 2
        if sign > 0:
            return C * mpmath.power(w, -0.5) * hypergeometric_2f1(al - 0.5, be - 0.5, 0.5, w)
        return C * mpmath.power(w - 1, -0.5) * hypergeometric_2f1(al - 0.5, be - 0.5, 0.5, 1 - w)
    return f


def _weber_w(nu):
    nu = mpmath.mpc(nu)

    def f(zeta):
        zeta = mpmath.mpc(zeta)
        if abs(zeta) < mpmath.mpf(10) ** (-mpmath.mp.dps // 3):
            return -1 / (24 * nu)
        a = zeta / (2 * nu)
        return (1 / (mpmath.exp(a) - 1) + 1 / (mpmath.exp(a) + 1) - 2 * nu / zeta) / (2 * zeta)
    return f


def oracle_borel(kind, x=None, lam=None, nu=None):
    """Closed-form Borel transform as a callable of zeta."""
    if kind in ("airy_plus", "airy_minus"):
        if x is None or mpmath.mpc(x) == 0:
            raise InvalidParameters("airy oracles need x != 0")
        return _airy_plus(x) if kind == "airy_plus" else _airy_minus(x)
    if kind in ("bessel_plus", "bessel_minus"):
        if x is None or lam is None or mpmath.mpc(x) == 0:
            raise InvalidParameters("bessel oracles need x != 0 and lam")
        return _bessel(x, lam, 1 if kind == "bessel_plus" else -1)
    if kind == "weber_W":
        if nu is None or mpmath.mpc(nu) == 0:
            raise InvalidParameters("weber_W needs nu != 0")
        return _weber_w(nu)
    raise InvalidParameters("unknown oracle %r" % kind)


def weber_w_series(nu, order):
    """W(hbar) = sum_k (2^{1-2k} - 1) B_2k / (2k (2k-1) nu^{2k-1}) hbar^{2k-1}."""
    from sympy import bernoulli, Rational
    cs = [0] * (order + 1)
    for k in range(1, (order + 1) // 2 + 1):
        p = 2 * k - 1
        if p > order:
            break
        B = Rational(bernoulli(2 * k))
        t = (Rational(2) ** (1 - 2 * k) - 1) * B / (2 * k * (2 * k - 1))
        c = Fraction(int(t.p), int(t.q))
        cs[p] = c / (Fraction(nu) ** p) if isinstance(nu, (int, Fraction)) else mpmath.mpf(c.numerator) / c.denominator / mpmath.mpmathify(nu) ** p
    return HbarSeries(cs, 0, order)


def binet_exp_w(nu, hbar):
    """e^{nu/hbar} Gamma(nu/hbar + 1/2) / (sqrt(2 pi) (nu/hbar)^{nu/hbar})."""
    z = mpmath.mpmathify(nu) / mpmath.mpmathify(hbar)
    return mpmath.exp(z) * mpmath.gamma(z + mpmath.mpf(1) / 2) / (mpmath.sqrt(2 * mpmath.pi) * mpmath.power(z, z))


def airy_psi_borel(x, sign, order=40, sqrt_at_x=None, coeffs=None):
    """Borel transform of the Airy WKB solution normalized at x = 0."""
    from .wkb import Normalization, SchrodingerInput, wkb_log_series, wkb_recursion
    if coeffs is None:
        coeffs = wkb_recursion(SchrodingerInput.from_strings("x", (), {}), order)
    ls = wkb_log_series(coeffs, Normalization("turning_point", 0), x, sign=sign, sqrt_at_x=sqrt_at_x)
    return borel_transform(ls)
