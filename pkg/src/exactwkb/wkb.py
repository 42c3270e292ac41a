"""WKB recursion for hbar^2 psi'' = Q(x, hbar) psi with Q = sum_m hbar^m Q_m.

With P = sum_{m >= -1} hbar^m P_m and P' + P^2 = hbar^{-2} Q, the
coefficients are fixed by

    P_{-1}^2 = Q_0,
    2 P_{-1} P_0 + P_{-1}' = Q_1,
    2 P_{-1} P_{m+1} + sum_{l=0}^{m} P_l P_{m-l} + P_m' = Q_{m+2}.

Everything here is exact: P_m is a ``SqrtExtElem`` over Q(x, params).
"""

from dataclasses import dataclass, field
from fractions import Fraction

import mpmath
import sympy
from sympy.polys.domains import QQ

from . import contour
from .fields import ParamField, SqrtExtElem, eval_frac
from .local import INF, laurent, leading_exponent, residue_sqrtext, NotASquare
from .series import HbarSeries


class ZeroPotential(ValueError):
    pass


class ConstantMap(ValueError):
    pass


class NotRegularSingular(ValueError):
    pass


class UnboundedIntegrand(ArithmeticError):
    pass


PathHitsTurningPoint = contour.PathHitsTurningPoint


# ---------------------------------------------------------------------------
# inputs

@dataclass(frozen=True)
class SchrodingerInput:
    pf: ParamField
    potential: tuple
    values: tuple = ()          # ((name, value), ...) numeric bindings

    @classmethod
    def from_strings(cls, potential, params=(), values=None):
        """``potential``: one expression or a list [Q0, Q1, ...]."""
        pf = ParamField(tuple(params))
        if isinstance(potential, str):
            potential = [potential]
        Qs = tuple(pf(p) for p in potential)
        return cls(pf, Qs, tuple(sorted((values or {}).items())))

    def Q(self, m):
        if 0 <= m < len(self.potential):
            return self.potential[m]
        return self.pf.zero

    @property
    def Q0(self):
        return self.potential[0]

    @property
    def bindings(self):
        return dict(self.values)

    def with_values(self, **vals):
        d = dict(self.values)
        d.update(vals)
        return SchrodingerInput(self.pf, self.potential, tuple(sorted(d.items())))

    def param_values(self):
        b = self.bindings
        missing = [p for p in self.pf.params if p not in b]
        if missing:
            raise ValueError("unbound parameters: %s" % ", ".join(missing))
        return [b[p] for p in self.pf.params]

    def numeric_curve(self):
        return contour.NumericCurve(self.Q0, self.param_values())

    def satisfies_assumption(self):
        """Q0 has a zero or a simple pole somewhere in the finite plane."""
        Q0 = self.Q0
        if Q0.numer.degree(0) >= 1:
            return True
        d = Q0.denom
        dd = d.diff(d.ring.gens[0])
        return d.degree(0) >= 1 and d.gcd(dd).degree(0) < d.degree(0)


# ---------------------------------------------------------------------------
# the recursion

@dataclass
class WkbCoefficients:
    input: SchrodingerInput
    order: int
    p_plus: list = field(default_factory=list)      # index m + 1

    def p(self, m, sign=1):
        e = self.p_plus[m + 1]
        return e if sign > 0 else e.conjugate()

    @property
    def p_minus(self):
        return [e.conjugate() for e in self.p_plus]

    def odd(self, m):
        e = self.p_plus[m + 1]
        return SqrtExtElem(e.Q0.field.zero, e.odd, e.Q0, e.branch)

    def even(self, m):
        e = self.p_plus[m + 1]
        return SqrtExtElem(e.even, e.Q0.field.zero, e.Q0, e.branch)

    @property
    def p_odd(self):
        return [self.odd(m) for m in range(-1, self.order + 1)]

    @property
    def p_even(self):
        return [self.even(m) for m in range(-1, self.order + 1)]

    def residual(self, m, sign=1):
        """2 P_{-1} P_{m+1} + sum P_l P_{m-l} + P_m' - Q_{m+2} (m >= -1)."""
        P = lambda k: self.p(k, sign)
        Q0 = self.input.Q0
        if m == -1:
            return P(-1) * 2 * P(0) + P(-1).diff() - SqrtExtElem.scalar(self.input.Q(1), Q0)
        acc = P(-1) * 2 * P(m + 1) + P(m).diff() - SqrtExtElem.scalar(self.input.Q(m + 2), Q0)
        for l in range(0, m + 1):
            acc = acc + P(l) * P(m - l)
        return acc


def wkb_recursion(inp, order):
    if order < 0:
        raise ValueError("order must be >= 0")
    Q0 = inp.Q0
    if not Q0:
        raise ZeroPotential("Q0 vanishes identically")
    K = Q0.field
    two_inv = lambda e: SqrtExtElem(e.odd / 2, e.even / (2 * Q0), Q0)   # e / (2 sqrt Q0)
    Pm1 = SqrtExtElem.sqrt(Q0)
    P = [Pm1]
    P0 = two_inv(SqrtExtElem.scalar(inp.Q(1), Q0) - Pm1.diff())
    P.append(P0)
    for m in range(0, order):
        acc = SqrtExtElem.scalar(inp.Q(m + 2), Q0) - P[m + 1].diff()
        for l in range(0, m + 1):
            acc = acc - P[l + 1] * P[m - l + 1]
        P.append(two_inv(acc))
    return WkbCoefficients(inp, order, P)


def p_odd_series(coeffs):
    """hbar * P_odd / sqrt(Q0) - 1 as a series whose coefficients are SqrtExtElem."""
    Q0 = coeffs.input.Q0
    inv = SqrtExtElem.sqrt(Q0).inverse()
    cs = [0] + [coeffs.odd(k - 1) * inv for k in range(1, coeffs.order + 2)]
    return HbarSeries(cs, 0, coeffs.order + 1)


def even_from_odd(coeffs):
    """-1/2 d/dx log P_odd, order by order; compare with P_even."""
    u = p_odd_series(coeffs)
    Q0 = coeffs.input.Q0
    one = SqrtExtElem.scalar(Q0.field.one, Q0)
    L = HbarSeries([one] + u.coeffs[1:], 0, u.order).log()
    dL = L.map(lambda c: c.diff() if isinstance(c, SqrtExtElem) else 0)
    dQ = SqrtExtElem.scalar(_dx(Q0) / (2 * Q0), Q0)
    return (dL + HbarSeries([dQ], 0, u.order)).map(
        lambda c: c * Fraction(-1, 2) if isinstance(c, SqrtExtElem) else 0)


def _dx(f):
    from .fields import ratfunc_diff
    return ratfunc_diff(f, 0)


# ---------------------------------------------------------------------------
# normalizations and the WKB log-series

@dataclass(frozen=True)
class Normalization:
    """kind: "turning_point" (point = v), "infinity" (point = leading
    endpoint for the hbar^{-1} term) or "generic" (point = x0)."""
    kind: str
    point: object = None

    def __post_init__(self):
        if self.kind not in ("turning_point", "infinity", "generic"):
            raise ValueError("unknown normalization %r" % self.kind)


@dataclass
class WkbLogSeries:
    """log psi = (hbar_power) log hbar + series, series leading at hbar^{-1}."""
    series: HbarSeries
    sign: int
    normalization: Normalization
    hbar_power: Fraction = Fraction(1, 2)
    integrals: dict = field(default_factory=dict)    # m -> int P_odd,m

    def amplitude(self):
        """exp of the part strictly beyond hbar^0, leading term 1."""
        rest = HbarSeries([0] + [self.series._get(p) for p in range(1, self.series.order + 1)],
                          0, self.series.order)
        return rest.exp()


def _sympy_x():
    return sympy.Symbol("x", positive=True)


def _elem_expr(e, xs):
    return e.to_sympy().subs(sympy.Symbol("x"), xs)


def _primitives(coeffs):
    """m -> exact rational R_m with (R_m sqrt Q0)' = P_odd,m, or None."""
    cache = getattr(coeffs, "_prim_cache", None)
    if cache is None:
        cache = {}
        coeffs._prim_cache = cache
    for m in range(0, coeffs.order + 1):
        if m not in cache:
            cache[m] = exact_odd_primitive(coeffs.odd(m))
    return cache


def wkb_log_series(coeffs, norm, x_eval=None, sign=1, sqrt_at_x=None, symbolic=None):
    """log of the WKB solution psi_sign as an hbar-series.

    The series is  sign * hbar^{-1} S(x) - 1/2 log(hbar P_odd) + sign * sum_{m>=0}
    hbar^m int P_odd,m ; the dropped 1/2 log hbar is ``hbar_power``.

    Symbolic mode (x_eval None) keeps x as a positive sympy symbol and needs
    the infinity normalization.  Numeric mode uses exact primitives of
    P_odd,m where they exist and quadrature on the double cover otherwise.
    ``sqrt_at_x`` fixes sqrt(Q0(x_eval)) (default: principal root).
    """
    if symbolic is None:
        symbolic = x_eval is None
    if symbolic:
        return _log_series_symbolic(coeffs, norm, sign)
    inp = coeffs.input
    N = coeffs.order
    curve = inp.numeric_curve()
    params = curve.params
    x = mpmath.mpc(x_eval)
    w_x = mpmath.mpc(sqrt_at_x) if sqrt_at_x is not None else mpmath.sqrt(curve.q(x))
    prims = _primitives(coeffs)
    integrals = {-1: _integrate_leading(coeffs, norm, x, w_x, curve)}
    inf_sign = None
    for m in range(0, N + 1):
        e = coeffs.odd(m)
        if not e.odd:
            integrals[m] = mpmath.mpc(0)
            continue
        R = prims[m]
        if R is None:
            integrals[m] = _integrate_quadrature(e, m, norm, x, w_x, curve)
            continue
        val = eval_frac(R, [x] + params) * w_x
        if norm.kind == "infinity":
            lim = odd_primitive_limit(R, inp.Q0, INF)
            if lim is None:
                raise UnboundedIntegrand("P_odd,%d is not integrable at infinity" % m)
            if lim:
                if inf_sign is None:
                    inf_sign = _sheet_at_infinity(inp, curve, x, w_x)
                val -= inf_sign * eval_frac(lim, [0] + params)
        elif norm.kind == "generic":
            x0 = mpmath.mpc(norm.point)
            w0 = contour.sheet_sqrt(curve, x0, x, w_x)
            val -= eval_frac(R, [x0] + params) * w0
        integrals[m] = mpmath.mpc(val)
    u = p_odd_series(coeffs)
    nums = [1] + [u.coeffs[k].evaluate([x] + params, w_x) for k in range(1, len(u.coeffs))]
    L = HbarSeries(nums, 0, u.order).log()
    out = [sign * integrals[-1],
           -mpmath.log(w_x) / 2 - L._get(0) / 2 + sign * integrals[0]]
    for p in range(1, N + 1):
        out.append(-L._get(p) / 2 + sign * integrals[p])
    return WkbLogSeries(HbarSeries(out, -1, N), sign, norm, Fraction(1, 2), integrals)


def _sheet_at_infinity(inp, curve, x, w_x):
    from .local import sqrt_laurent
    q = laurent(inp.Q0, INF, 1)
    if q.val % 2:
        return 1
    s = sqrt_laurent(inp.Q0, INF, 1)
    lead = eval_frac(s.coeffs[0], [0] + curve.params)
    return contour.sheet_sign_at_infinity(curve, x, w_x, lead, -s.val)


def _integrand(e, params):
    ev, od = e.even, e.odd

    def f(xx, w):
        r = 0
        if od:
            r = eval_frac(od, [xx] + params) * w
        if ev:
            r = r + eval_frac(ev, [xx] + params)
        return r
    return f


def _rational_point(p):
    try:
        c = complex(p)
    except TypeError:
        return None
    if c.imag != 0 or c.real != int(c.real):
        return Fraction(p) if isinstance(p, Fraction) else None
    return Fraction(int(c.real))


def _integrate_leading(coeffs, norm, x, w_x, curve):
    if norm.point is None:
        raise ValueError("the leading term needs a lower endpoint")
    e = coeffs.odd(-1)
    v = _rational_point(norm.point) if norm.kind == "turning_point" else None
    if v is not None and not e.even:
        cache = getattr(coeffs, "_lead_prim", False)
        if cache is False:
            cache = exact_odd_primitive(e)
            coeffs._lead_prim = cache
        if cache is not None:
            lim = odd_primitive_limit(cache, coeffs.input.Q0, v)
            if lim is not None and not lim:
                return eval_frac(cache, [x] + curve.params) * w_x
    f = _integrand(e, curve.params)
    x0 = mpmath.mpc(norm.point)
    at_zero = abs(curve.q(x0)) < mpmath.mpf(10) ** (-mpmath.mp.dps // 2)
    ze = "b" if at_zero else None
    try:
        val, _ = contour.integrate_segment(curve, f, x, x0, w_x, zero_end=ze)
    except contour.PathHitsTurningPoint:
        # detour through a point off the segment, to its left
        mid = (x + x0) / 2 + 1j * (x0 - x) / 4
        v1, w_m = contour.integrate_segment(curve, f, x, mid, w_x)
        v2, _ = contour.integrate_segment(curve, f, mid, x0, w_m, zero_end=ze)
        val = v1 + v2
    return -val


def _integrate_quadrature(e, m, norm, x, w_x, curve):
    f = _integrand(e, curve.params)
    if norm.kind == "generic":
        val, _ = contour.integrate_segment(curve, f, x, mpmath.mpc(norm.point), w_x)
        return -val
    if norm.kind == "turning_point":
        total, _ = contour.loop_integral(curve, f, x, mpmath.mpc(norm.point), w_x)
        return total / 2
    ex = leading_exponent(e, INF)
    if ex is not None and ex >= -1:
        raise UnboundedIntegrand("P_odd,%d is not integrable at infinity (exponent %s)" % (m, ex))
    val, _ = contour.integrate_to_infinity(curve, f, x, w_x)
    return -val


def _log_series_symbolic(coeffs, norm, sign):
    if norm.kind != "infinity":
        raise NotImplementedError("symbolic log-series supports the infinity normalization only")
    xs = _sympy_x()
    N = coeffs.order
    Q0 = coeffs.input.Q0
    sq = sympy.sqrt(Q0.as_expr().subs(sympy.Symbol("x"), xs))
    if norm.point is None:
        raise ValueError("the leading term needs a lower endpoint")
    t = sympy.Symbol("t_", positive=True)
    integrals = {-1: sympy.simplify(sympy.integrate(sq.subs(xs, t), (t, sympy.nsimplify(norm.point), xs)))}
    prims = _primitives(coeffs)
    for m in range(0, N + 1):
        R = prims[m]
        if R is None:
            raise UnboundedIntegrand("no exact primitive for P_odd,%d" % m)
        lim = odd_primitive_limit(R, Q0, INF)
        if lim is None:
            raise UnboundedIntegrand("P_odd,%d is not integrable at infinity" % m)
        integrals[m] = sympy.simplify(R.as_expr().subs(sympy.Symbol("x"), xs) * sq - lim.as_expr())
    u = p_odd_series(coeffs)
    cs = [sympy.Integer(1)] + [_elem_expr(u.coeffs[k], xs) for k in range(1, len(u.coeffs))]
    L = HbarSeries(cs, 0, u.order).log()
    out = [sign * integrals[-1],
           -sympy.log(sq) / 2 - L._get(0) / 2 + sign * integrals[0]]
    for p in range(1, N + 1):
        out.append(sympy.simplify(sympy.expand(-L._get(p) / 2 + sign * integrals[p])))
    return WkbLogSeries(HbarSeries(out, -1, N), sign, norm, Fraction(1, 2), integrals)


def normalization_ratio(coeffs, norm_a, norm_b, x_eval, sign=1, sqrt_at_x=None):
    """log psi^a - log psi^b: an x-independent hbar-series."""
    a = wkb_log_series(coeffs, norm_a, x_eval, sign, sqrt_at_x)
    b = wkb_log_series(coeffs, norm_b, x_eval, sign, sqrt_at_x)
    return a.series - b.series


# ---------------------------------------------------------------------------
# coordinate changes

def _compose_x(f, g):
    """f(g, params) for RatFunc f and g (g is a RatFunc in the same field)."""
    K = f.field

    def poly_at(p):
        ring = p.ring
        by_deg = {}
        for monom, c in p.terms():
            rest = (0,) + monom[1:]
            by_deg.setdefault(monom[0], []).append((rest, c))
        acc = K.zero
        for d in range(p.degree(0), -1, -1):
            acc = acc * g
            if d in by_deg:
                acc = acc + K.new(ring(dict(by_deg[d])))
        return acc
    return poly_at(f.numer) / poly_at(f.denom)


def schwarzian(xz):
    d1 = _dx(xz)
    d2 = _dx(d1)
    d3 = _dx(d2)
    r = d2 / d1
    return d3 / d1 - r * r * xz.field(QQ(3, 2))


def coordinate_gauge_transform(inp, x_of_z):
    """Q~(z) = x'(z)^2 Q(x(z)) - (hbar^2/2) {x; z}; z reuses the generator x."""
    if not _dx(x_of_z):
        raise ConstantMap("x(z) is constant")
    K = x_of_z.field
    d1 = _dx(x_of_z)
    J = d1 * d1
    Qs = [J * _compose_x(q, x_of_z) for q in inp.potential]
    while len(Qs) < 3:
        Qs.append(K.zero)
    Qs[2] = Qs[2] - schwarzian(x_of_z) * K(QQ(1, 2))
    while len(Qs) > 1 and not Qs[-1]:
        Qs.pop()
    return SchrodingerInput(inp.pf, tuple(Qs), inp.values)


# ---------------------------------------------------------------------------
# local data at singular points

def characteristic_exponents(inp, pole, order=4):
    """(rho_plus, rho_minus) as hbar-series (leading hbar^{-1}).

    Uses residues of P^{(+-)}_m when Q0 has a double pole at ``pole``; with
    Q0 == 0 the exponents come from the indicial equation of the
    hbar^2-part instead.
    """
    Q0 = inp.Q0
    if not Q0:
        return _indicial_only(inp, pole)
    s = laurent(Q0, pole, 1)
    ordr = -s.val if pole != INF else -(s.val - 4)     # order of the pole of phi
    if ordr != 2:
        raise NotRegularSingular("Q0 dx^2 has a pole of order %d at %s (need 2)" % (ordr, pole))
    for m, q in enumerate(inp.potential):
        if q:
            sq = laurent(q, pole, 1)
            o = -sq.val if pole != INF else -(sq.val - 4)
            if o > 2:
                raise NotRegularSingular("Q_%d has a pole of order %d" % (m, o))
    c = wkb_recursion(inp, order)
    plus, minus = [], []
    for m in range(-1, order + 1):
        try:
            rp = residue_sqrtext(c.p(m, 1), pole)
            rm = residue_sqrtext(c.p(m, -1), pole)
        except NotASquare as e:
            raise NotRegularSingular(str(e))
        plus.append(rp)
        minus.append(rm)
    return HbarSeries(plus, -1, order), HbarSeries(minus, -1, order)


def _indicial_only(inp, pole):
    if pole == INF:
        raise NotImplementedError("indicial exponents at infinity")
    lam = 0
    for m, q in enumerate(inp.potential):
        if not q:
            continue
        if m != 2:
            raise NotRegularSingular("with Q0 == 0 only an hbar^2 term is supported")
        s = laurent(q, pole, 1)
        if s.val < -2:
            raise NotRegularSingular("Q2 has a pole of order %d" % -s.val)
        lam = s.coeffs[0].as_expr() if s.val == -2 else 0
    a = sympy.Symbol("alpha")
    roots = sympy.solve(a * (a - 1) - lam, a)
    if len(roots) == 1:
        roots = roots * 2
    return tuple(roots)


def indicial_residual(inp, pole, rho, order):
    """hbar^2 rho(rho-1) - lim (x-p)^2 Q(x, hbar) as a series (finite pole)."""
    K = inp.Q0.field
    lim = []
    for m in range(0, order + 2):
        q = inp.Q(m)
        if not q:
            lim.append(0)
            continue
        s = laurent(q, pole, 1)
        lim.append(s.coeffs[0] if s.val == -2 else (K.zero if s.val > -2 else None))
    rr = rho * (rho + HbarSeries([-1], 0, rho.order + 2)).shift(0)
    lhs = rr.shift(2)
    qs = HbarSeries(lim, 0, lhs.order)
    return lhs - qs


def pole_order_profile(coeffs, pole, order_r):
    """Leading exponents of P_m at ``pole`` with the bound from the pole order.

    Returns a list of (m, exponent, bound, ok).  Finite pole: exponent in
    (x - p) with bound ((r-2) m - 2)/2 from below.  Infinity: degree in x,
    bounded above by -((r-2) m + 2)/2.
    """
    out = []
    for m in range(0, coeffs.order + 1):
        e = leading_exponent(coeffs.p(m), pole)
        if pole == INF:
            bound = Fraction(-((order_r - 2) * m + 2), 2)
            ok = e is None or e <= bound
        else:
            bound = Fraction((order_r - 2) * m - 2, 2)
            ok = e is None or e >= bound
        out.append((m, e, bound, ok))
    return out


# ---------------------------------------------------------------------------
# exact primitives of odd elements

def _solve_linear(cols, rhs, K):
    """Solve sum_i u_i cols[i] = rhs (lists of K elements); None if inconsistent."""
    n = len(cols)
    m = max([len(c) for c in cols] + [len(rhs)])
    rows = []
    for r in range(m):
        row = [cols[i][r] if r < len(cols[i]) else K.zero for i in range(n)]
        row.append(rhs[r] if r < len(rhs) else K.zero)
        rows.append(row)
    piv_cols = []
    r0 = 0
    for col in range(n):
        p = next((r for r in range(r0, m) if rows[r][col]), None)
        if p is None:
            continue
        rows[r0], rows[p] = rows[p], rows[r0]
        inv = K.one / rows[r0][col]
        rows[r0] = [v * inv for v in rows[r0]]
        for r in range(m):
            if r != r0 and rows[r][col]:
                f = rows[r][col]
                rows[r] = [a - f * b for a, b in zip(rows[r], rows[r0])]
        piv_cols.append(col)
        r0 += 1
    for r in range(r0, m):
        if rows[r][n]:
            return None
    sol = [K.zero] * n
    for r, col in enumerate(piv_cols):
        sol[col] = rows[r][n]
    return sol


def exact_odd_primitive(elem):
    """Rational R with (R sqrt(Q0))' = elem (an odd element), or None."""
    from .local import _x_coeff_list
    o = elem.odd
    K = elem.Q0.field
    if not o:
        return K.zero
    ring = o.numer.ring
    x = ring.gens[0]
    A, B = o.numer, o.denom
    N, D = elem.Q0.numer, elem.Q0.denom
    V = B.gcd(B.diff(x))
    n = (V.degree(0) + max(A.degree(0) - B.degree(0) + 1, 0)
         + max((N.degree(0) - D.degree(0) + 1) // 2, 0) + 2)
    dN, dD, dV = N.diff(x), D.diff(x), V.diff(x)
    NDB2 = N * D * B * 2
    W = V * (dN * D - N * dD) * B
    cols = []
    for i in range(n + 1):
        U = x ** i
        dU = U.diff(x) if i else ring.zero
        L = (dU * V - U * dV) * NDB2 + U * W
        cols.append(_x_coeff_list(L, K))
    rhs = _x_coeff_list(A * V * V * N * D * 2, K)
    sol = _solve_linear(cols, rhs, K)
    if sol is None:
        return None
    U = K.zero
    xx = K.gens[0]
    for i in reversed(range(n + 1)):
        U = U * xx + sol[i]
    return U / K.new(V)


def odd_primitive_limit(R, Q0, point, sheet_root=None):
    """lim R sqrt(Q0) at ``point`` (rational point or INF) on the sheet where the
    leading coefficient of sqrt(Q0) is ``sheet_root`` (default the field root).

    Returns None when the limit is infinite.
    """
    from .local import sqrt_laurent, series_mul
    if not R:
        return R.field.zero
    e = leading_exponent(SqrtExtElem(R.field.zero, R, Q0), point)
    if point == INF:
        if e < 0:
            return R.field.zero
        if e > 0:
            return None
    else:
        if e > 0:
            return R.field.zero
        if e < 0:
            return None
    # e == 0: constant term of R * sqrt(Q0)
    r = laurent(R, point, 1)
    q = sqrt_laurent(Q0, point, 1)
    c = r.coeffs[0] * q.coeffs[0]
    return c
