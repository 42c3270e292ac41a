"""Exact coefficient domains.

The tower used throughout the package is

    GaussianRational  <  ParamField  <  RatFunc  <  SqrtExtElem

Rational functions are elements of a sympy sparse fraction field over QQ
whose first generator is ``x`` and whose remaining generators are the named
parameters (``nu``, ``t``, ``theta0`` ...).  sympy keeps those elements
gcd-reduced with a normalized denominator, which is what makes equality
decidable.  The imaginary unit never enters a WKB recursion, so Gaussian
rationals live in their own small class and only appear in connection data
and Laurent polynomials.
"""

from fractions import Fraction
from functools import lru_cache

import mpmath
from sympy import Symbol, sympify
from sympy.polys.domains import QQ
from sympy.polys.fields import field as _sympy_field


class FieldTowerError(ArithmeticError):
    pass


class DivisionByZeroNorm(FieldTowerError):
    pass


class BranchMismatch(FieldTowerError):
    pass


# ---------------------------------------------------------------------------
# Gaussian rationals

def _frac(v):
    if isinstance(v, Fraction):
        return v
    if isinstance(v, int):
        return Fraction(v)
    if hasattr(v, "numerator") and hasattr(v, "denominator"):
        return Fraction(int(v.numerator), int(v.denominator))
    raise TypeError("cannot interpret %r as a rational number" % (v,))


class GaussianRational:
    """Exact number ``re + i*im`` with rational parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = _frac(re)
        self.im = _frac(im)

    @classmethod
    def coerce(cls, v):
        if isinstance(v, GaussianRational):
            return v
        if isinstance(v, complex):
            raise TypeError("floats are not exact; pass Fractions")
        return cls(v, 0)

    I = None  # set below

    def __add__(self, other):
        try:
            o = GaussianRational.coerce(other)
        except TypeError:
            return NotImplemented
        return GaussianRational(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __sub__(self, other):
        try:
            o = GaussianRational.coerce(other)
        except TypeError:
            return NotImplemented
        return GaussianRational(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        try:
            o = GaussianRational.coerce(other)
        except TypeError:
            return NotImplemented
        return GaussianRational(self.re * o.re - self.im * o.im,
                                self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def norm(self):
        return self.re * self.re + self.im * self.im

    def conjugate(self):
        return GaussianRational(self.re, -self.im)

    def inverse(self):
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("GaussianRational division by zero")
        return GaussianRational(self.re / n, -self.im / n)

    def __truediv__(self, other):
        try:
            o = GaussianRational.coerce(other)
        except TypeError:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        return GaussianRational.coerce(other) * self.inverse()

    def __pow__(self, n):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inverse() ** (-n)
        out, base = GaussianRational(1), self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __eq__(self, other):
        try:
            o = GaussianRational.coerce(other)
        except TypeError:
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def to_mpc(self):
        return mpmath.mpc(mpmath.mpf(self.re.numerator) / self.re.denominator,
                          mpmath.mpf(self.im.numerator) / self.im.denominator)

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def to_sympy(self):
        from sympy import Rational, I
        return Rational(self.re.numerator, self.re.denominator) + \
            I * Rational(self.im.numerator, self.im.denominator)

    def __repr__(self):
        if self.im == 0:
            return str(self.re)
        if self.re == 0:
            return "%s*i" % (self.im,)
        return "(%s + %s*i)" % (self.re, self.im)


GaussianRational.I = GaussianRational(0, 1)


# ---------------------------------------------------------------------------
# parameter fields and rational functions

@lru_cache(maxsize=None)
def _build_field(names):
    K, *gens = _sympy_field(",".join(names), QQ)
    return K, tuple(gens)


class ParamField:
    """Rational functions in ``x`` with coefficients in QQ(params).

    Elements are sympy ``FracElement`` objects, so they are immutable and
    always held in lowest terms.

    >>> pf = ParamField(("nu",))
    >>> Q = pf("x**2/4 - nu")
    >>> pf.ddx(Q)
    x/2
    """

    def __init__(self, params=()):
        self.params = tuple(params)
        for p in self.params:
            if p == "x":
                raise ValueError("'x' is reserved for the independent variable")
        self.field, gens = _build_field(("x",) + self.params)
        self.x = gens[0]
        self.param_gens = dict(zip(self.params, gens[1:]))
        self._symbols = [Symbol(n) for n in ("x",) + self.params]

    def __eq__(self, other):
        return isinstance(other, ParamField) and other.params == self.params

    def __hash__(self):
        return hash(("ParamField", self.params))

    def __repr__(self):
        return "ParamField(%r)" % (self.params,)

    def __getitem__(self, name):
        if name == "x":
            return self.x
        return self.param_gens[name]

    def __call__(self, expr):
        if isinstance(expr, str):
            expr = sympify(expr, locals={s.name: s for s in self._symbols})
        return self.field.from_expr(sympify(expr))

    def const(self, c):
        if isinstance(c, Fraction):
            return self.field(QQ(c.numerator, c.denominator))
        return self.field(c)

    zero = property(lambda self: self.field.zero)
    one = property(lambda self: self.field.one)

    def ddx(self, f):
        return ratfunc_diff(f, 0)

    def dparam(self, f, name):
        return ratfunc_diff(f, 1 + self.params.index(name))

    def is_x_free(self, f):
        return f.numer.degree(0) <= 0 and f.denom.degree(0) <= 0

    def to_sympy(self, f):
        return f.as_expr()

    def evaluate(self, f, x=None, **values):
        vals = [x] + [values[p] for p in self.params]
        return eval_frac(f, vals)


def ratfunc_diff(f, i):
    """Quotient rule on numerator and denominator (generator index ``i``)."""
    n, d = f.numer, f.denom
    K = f.field
    gen = n.ring.gens[i]
    dn, dd = n.diff(gen), d.diff(gen)
    return K.new(dn * d - n * dd, d * d)


def _to_mpf(c):
    return mpmath.mpf(int(c.numerator)) / int(c.denominator)


def _compile_poly(p):
    return [(m, _to_mpf(c)) for m, c in p.terms()]


@lru_cache(maxsize=4096)
def _compiled(f):
    return _compile_poly(f.numer), _compile_poly(f.denom)


def _eval_compiled(terms, vals):
    s = mpmath.mpf(0)
    for monom, c in terms:
        term = c
        for v, e in zip(vals, monom):
            if e:
                term = term * v ** e
        s += term
    return s


def eval_frac(f, vals):
    """Evaluate a FracElement numerically; ``vals`` lists all generators."""
    vals = [mpmath.mpmathify(v) if v is not None else None for v in vals]
    num, den = _compiled(f)
    d = _eval_compiled(den, vals)
    if d == 0:
        raise ZeroDivisionError("rational function evaluated at a pole")
    return _eval_compiled(num, vals) / d


def field_sqrt(a):
    """Exact square root of a FracElement, or ``None`` when it is not a square."""
    from sympy import factor_list
    out = []
    for part in (a.numer, a.denom):
        expr = part.as_expr()
        c, facs = factor_list(expr)
        if c < 0:
            return None
        from sympy import sqrt as _sqrt, Integer
        rc = _sqrt(c)
        if not rc.is_Rational:
            return None
        piece = rc
        for base, mult in facs:
            if mult % 2:
                return None
            piece = piece * base ** (mult // 2)
        out.append(piece)
    return a.field.from_expr(out[0] / out[1])


# ---------------------------------------------------------------------------
# square-root extension

class SqrtExtElem:
    """Element ``even + odd*sqrt(Q0)`` of a quadratic extension of RatFunc.

    ``branch`` tags which square root of Q0 is meant; elements only combine
    when their tags (and Q0) agree.
    """

    __slots__ = ("even", "odd", "Q0", "branch")

    def __init__(self, even, odd, Q0, branch=1):
        K = Q0.field
        self.even = K(even) if not hasattr(even, "field") else even
        self.odd = K(odd) if not hasattr(odd, "field") else odd
        self.Q0 = Q0
        self.branch = branch

    @classmethod
    def sqrt(cls, Q0, branch=1):
        K = Q0.field
        return cls(K.zero, K.one, Q0, branch)

    @classmethod
    def scalar(cls, c, Q0, branch=1):
        return cls(c, Q0.field.zero, Q0, branch)

    def _check(self, other):
        if not isinstance(other, SqrtExtElem):
            return SqrtExtElem(other, self.Q0.field.zero, self.Q0, self.branch)
        if other.Q0 != self.Q0 or other.branch != self.branch:
            raise BranchMismatch("elements live over different square roots")
        return other

    def __add__(self, other):
        o = self._check(other)
        return SqrtExtElem(self.even + o.even, self.odd + o.odd, self.Q0, self.branch)

    __radd__ = __add__

    def __neg__(self):
        return SqrtExtElem(-self.even, -self.odd, self.Q0, self.branch)

    def __sub__(self, other):
        o = self._check(other)
        return SqrtExtElem(self.even - o.even, self.odd - o.odd, self.Q0, self.branch)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            c = _scalar(self.Q0.field, other)
            return SqrtExtElem(self.even * c, self.odd * c, self.Q0, self.branch)
        o = self._check(other)
        a, b, c, d = self.even, self.odd, o.even, o.odd
        return SqrtExtElem(a * c + self.Q0 * b * d, a * d + b * c, self.Q0, self.branch)

    __rmul__ = __mul__

    def norm(self):
        return self.even * self.even - self.Q0 * self.odd * self.odd

    def conjugate(self):
        """Image under sqrt(Q0) -> -sqrt(Q0)."""
        return SqrtExtElem(self.even, -self.odd, self.Q0, self.branch)

    def inverse(self):
        n = self.norm()
        if not n:
            raise DivisionByZeroNorm("element has zero norm")
        return SqrtExtElem(self.even / n, -self.odd / n, self.Q0, self.branch)

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            c = _scalar(self.Q0.field, other)
            return SqrtExtElem(self.even / c, self.odd / c, self.Q0, self.branch)
        o = self._check(other)
        if not o.odd:
            if not o.even:
                raise DivisionByZeroNorm("division by zero")
            return SqrtExtElem(self.even / o.even, self.odd / o.even, self.Q0, self.branch)
        return self * o.inverse()

    def diff(self):
        """d/dx, using (sqrt Q0)' = Q0'/(2 sqrt Q0)."""
        de = ratfunc_diff(self.even, 0)
        do = ratfunc_diff(self.odd, 0)
        if self.odd:
            do = do + self.odd * ratfunc_diff(self.Q0, 0) / (2 * self.Q0)
        return SqrtExtElem(de, do, self.Q0, self.branch)

    def is_zero(self):
        return not self.even and not self.odd

    def __eq__(self, other):
        if not isinstance(other, SqrtExtElem):
            if isinstance(other, (int, Fraction)):
                return not self.odd and self.even == _scalar(self.Q0.field, other)
            return NotImplemented
        return (self.Q0 == other.Q0 and self.branch == other.branch
                and self.even == other.even and self.odd == other.odd)

    def __hash__(self):
        return hash((self.even, self.odd, self.Q0, self.branch))

    def evaluate(self, vals, sqrtQ0=None):
        """Numeric value; ``sqrtQ0`` picks the numeric root (default principal)."""
        e = eval_frac(self.even, vals) if self.even else mpmath.mpf(0)
        if not self.odd:
            return e
        if sqrtQ0 is None:
            sqrtQ0 = self.branch * mpmath.sqrt(eval_frac(self.Q0, vals))
        return e + eval_frac(self.odd, vals) * sqrtQ0

    def to_sympy(self):
        from sympy import sqrt
        return self.even.as_expr() + self.branch * self.odd.as_expr() * sqrt(self.Q0.as_expr())

    def __repr__(self):
        if not self.odd:
            return "SqrtExtElem(%s)" % (self.even,)
        return "SqrtExtElem(%s + (%s)*sqrt(%s))" % (self.even, self.odd, self.Q0)


def _scalar(K, c):
    if isinstance(c, Fraction):
        return K(QQ(c.numerator, c.denominator))
    return K(c)
