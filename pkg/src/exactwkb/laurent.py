"""Laurent polynomials in X_A, X_B with Gaussian-rational coefficients."""

from fractions import Fraction

import sympy

from .fields import GaussianRational

XA_SYM, XB_SYM = sympy.symbols("X_A X_B")


class NonLaurentResult(ArithmeticError):
    pass


class LaurentXY:
    """Sparse dict {(a, b): c} meaning sum c * X_A^a * X_B^b."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        clean = {}
        for k, v in (terms or {}).items():
            v = GaussianRational.coerce(v)
            if v:
                clean[(int(k[0]), int(k[1]))] = v
        self.terms = clean

    @classmethod
    def monomial(cls, a, b, c=1):
        return cls({(a, b): c})

    @classmethod
    def const(cls, c):
        return cls({(0, 0): c})

    def __add__(self, other):
        other = _coerce(other)
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, GaussianRational(0)) + v
        return LaurentXY(out)

    __radd__ = __add__

    def __neg__(self):
        return LaurentXY({k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-_coerce(other))

    def __rsub__(self, other):
        return _coerce(other) - self

    def __mul__(self, other):
        other = _coerce(other)
        out = {}
        for (a1, b1), c1 in self.terms.items():
            for (a2, b2), c2 in other.terms.items():
                k = (a1 + a2, b1 + b2)
                out[k] = out.get(k, GaussianRational(0)) + c1 * c2
        return LaurentXY(out)

    __rmul__ = __mul__

    def __pow__(self, n):
        if n < 0:
            if len(self.terms) != 1:
                raise NonLaurentResult("only monomials are invertible")
            (a, b), c = next(iter(self.terms.items()))
            return LaurentXY({(-a * (-n), -b * (-n)): c.inverse() ** (-n)})
        out = LaurentXY.const(1)
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other):
        try:
            other = _coerce(other)
        except TypeError:
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def is_zero(self):
        return not self.terms

    def to_sympy(self):
        return sum((c.to_sympy() * XA_SYM ** a * XB_SYM ** b
                    for (a, b), c in self.terms.items()), sympy.Integer(0))

    @classmethod
    def from_sympy(cls, expr):
        expr = sympy.expand(expr)
        num, den = sympy.fraction(sympy.together(expr))
        den = sympy.expand(den)
        dpoly = sympy.Poly(den, XA_SYM, XB_SYM)
        if len(dpoly.terms()) != 1:
            raise NonLaurentResult("denominator %s is not a monomial" % den)
        (da, db), dc = dpoly.terms()[0]
        npoly = sympy.Poly(sympy.expand(num), XA_SYM, XB_SYM)
        out = {}
        for (a, b), c in npoly.terms():
            q = sympy.nsimplify(c / dc)
            re, im = q.as_real_imag()
            out[(a - da, b - db)] = GaussianRational(Fraction(str(re)), Fraction(str(im)))
        return cls(out)

    def substitute(self, XA=None, XB=None):
        """Exact substitution X_A -> XA, X_B -> XB (LaurentXY or sympy exprs).

        Intermediate rational expressions are cancelled exactly; the result
        must again be a Laurent polynomial.
        """
        sub = {}
        if XA is not None:
            sub[XA_SYM] = XA.to_sympy() if isinstance(XA, LaurentXY) else XA
        if XB is not None:
            sub[XB_SYM] = XB.to_sympy() if isinstance(XB, LaurentXY) else XB
        expr = sympy.cancel(self.to_sympy().subs(sub, simultaneous=True))
        return LaurentXY.from_sympy(expr)

    def evaluate(self, XA, XB):
        s = 0
        for (a, b), c in self.terms.items():
            s += c.to_mpc() * XA ** a * XB ** b
        return s

    def __repr__(self):
        if not self.terms:
            return "0"
        return str(self.to_sympy())


def _coerce(v):
    if isinstance(v, LaurentXY):
        return v
    return LaurentXY.const(GaussianRational.coerce(v))


XA = LaurentXY.monomial(1, 0)
XB = LaurentXY.monomial(0, 1)
I = LaurentXY.const(GaussianRational(0, 1))
