"""Exact Laurent expansions of RatFunc / SqrtExtElem at a point.

A point is a rational number or ``"oo"``.  At a finite point the local
coordinate is w = x - p; at infinity it is w = 1/x.  Coefficients are
x-free elements of the ambient sympy fraction field.
"""

from fractions import Fraction
from math import comb

from sympy.polys.domains import QQ

from .fields import field_sqrt

INF = "oo"


class NotASquare(ArithmeticError):
    pass


class LocalSeries:
    """w^val * (c_0 + c_1 w + ... + c_{n-1} w^{n-1} + O(w^n))."""

    __slots__ = ("val", "coeffs")

    def __init__(self, val, coeffs):
        self.val = val
        self.coeffs = list(coeffs)

    def coefficient(self, k):
        i = k - self.val
        if i < 0:
            return None if not self.coeffs else self.coeffs[0].field.zero
        if i >= len(self.coeffs):
            raise IndexError("expansion too short for w^%d" % k)
        return self.coeffs[i]

    @property
    def known_to(self):
        return self.val + len(self.coeffs) - 1

    def __repr__(self):
        return "LocalSeries(val=%s, %s)" % (self.val, self.coeffs)


def _x_coeff_list(poly, K):
    """Poly in (x, params) -> list of x-free FracElements a_i (x^i)."""
    deg = poly.degree(0)
    if deg < 0:
        return []
    out = [K.zero] * (deg + 1)
    ring = poly.ring
    for monom, c in poly.terms():
        rest = (0,) + monom[1:]
        out[monom[0]] = out[monom[0]] + K.new(ring({rest: c}))
    return out


def _shift(coeffs, p, K):
    """Coefficients of a(p + w) from those of a(x)."""
    pc = K(QQ(p.numerator, p.denominator))
    n = len(coeffs)
    out = [K.zero] * n
    powers = [K.one]
    for _ in range(n):
        powers.append(powers[-1] * pc)
    for i, a in enumerate(coeffs):
        if not a:
            continue
        for j in range(i + 1):
            out[j] = out[j] + a * comb(i, j) * powers[i - j]
    return out


def _poly_local(poly, point, K):
    a = _x_coeff_list(poly, K)
    if point == INF:
        # a(1/w) = w^{-deg} * sum a_i w^{deg-i}
        deg = len(a) - 1
        rev = list(reversed(a))
        return -deg, rev
    b = _shift(a, Fraction(point), K)
    return 0, b


def _strip(val, coeffs):
    k = 0
    while k < len(coeffs) and not coeffs[k]:
        k += 1
    return val + k, coeffs[k:]


def _series_div(num, den, n, K):
    """First n coefficients of num/den (den[0] != 0)."""
    inv0 = K.one / den[0]
    out = []
    for k in range(n):
        s = num[k] if k < len(num) else K.zero
        for j in range(1, min(k, len(den) - 1) + 1):
            s = s - den[j] * out[k - j]
        out.append(s * inv0)
    return out


def laurent(f, point, n):
    """Laurent expansion of the RatFunc f at ``point`` with n coefficients."""
    K = f.field
    if not f:
        return LocalSeries(0, [K.zero] * n)
    vn, cn = _strip(*_poly_local(f.numer, point, K))
    vd, cd = _strip(*_poly_local(f.denom, point, K))
    return LocalSeries(vn - vd, _series_div(cn, cd, n, K))


def series_mul(a, b, n):
    K = a.coeffs[0].field
    out = [K.zero] * n
    for i, x in enumerate(a.coeffs[:n]):
        if not x:
            continue
        for j, y in enumerate(b.coeffs[:n - i]):
            if y:
                out[i + j] = out[i + j] + x * y
    return LocalSeries(a.val + b.val, out)


def sqrt_laurent(Q0, point, n):
    """Expansion of sqrt(Q0) at ``point``; needs even order and square leading term."""
    s = laurent(Q0, point, n)
    if s.val % 2:
        raise NotASquare("Q0 has odd order %d at %s" % (s.val, point))
    c0 = s.coeffs[0]
    r0 = field_sqrt(c0)
    if r0 is None:
        raise NotASquare("leading coefficient %s is not a square" % c0)
    K = c0.field
    # (1 + u)^{1/2} with u = s/c0 - 1, computed by the binomial recurrence.
    u = [c / c0 for c in s.coeffs]
    out = [K.one] + [K.zero] * (n - 1)
    # g^2 = u  (u_0 = 1): 2 g_0 g_k = u_k - sum_{j=1}^{k-1} g_j g_{k-j}
    for k in range(1, n):
        acc = u[k]
        for j in range(1, k):
            acc = acc - out[j] * out[k - j]
        out[k] = acc / 2
    return LocalSeries(s.val // 2, [r0 * c for c in out])


def residue_rational(f, point, n=None):
    """Res_{x=point} f(x) dx exactly."""
    K = f.field
    if point == INF:
        # f(1/w) * (-dw/w^2): coefficient of w^1 in f(1/w), negated
        s = laurent(f, INF, max(4, (n or 0)))
        need = 1 - s.val + 1
        if need > len(s.coeffs):
            s = laurent(f, INF, need)
        if s.val > 1:
            return K.zero
        return -s.coeffs[1 - s.val]
    s = laurent(f, point, 2)
    if s.val > -1:
        return K.zero
    need = -1 - s.val + 1
    if need > len(s.coeffs):
        s = laurent(f, point, need)
    return s.coeffs[-1 - s.val]


def residue_sqrtext(elem, point):
    """Res of (even + odd*sqrt(Q0)) dx at ``point`` on the sheet fixed by
    the chosen square root of the leading coefficient."""
    K = elem.Q0.field
    r = residue_rational(elem.even, point) if elem.even else K.zero
    if not elem.odd:
        return r
    o = laurent(elem.odd, point, 2)
    q = sqrt_laurent(elem.Q0, point, 2)
    val = o.val + q.val
    if point == INF:
        need = 1 - val + 1
    else:
        need = -1 - val + 1
    if need <= 0:
        return r
    o = laurent(elem.odd, point, need)
    q = sqrt_laurent(elem.Q0, point, need)
    prod = series_mul(o, q, need)
    if point == INF:
        return r - elem.branch * prod.coeffs[1 - val]
    return r + elem.branch * prod.coeffs[-1 - val]


def leading_exponent(elem, point):
    """Leading exponent of a SqrtExtElem at ``point`` in the x-variable.

    At a finite point this is the valuation in (x - p); at infinity it is
    the degree in x (minus the valuation in 1/x).  Half-integers appear for
    the odd part when Q0 has odd order there.
    """
    K = elem.Q0.field
    vals = []
    if elem.even:
        vals.append(Fraction(laurent(elem.even, point, 1).val))
    if elem.odd:
        q = laurent(elem.Q0, point, 1)
        vals.append(Fraction(laurent(elem.odd, point, 1).val) + Fraction(q.val, 2))
    if not vals:
        return None
    v = min(vals)
    return -v if point == INF else v
