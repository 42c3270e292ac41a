"""Truncated formal series in hbar and two-sided trans-series.

A series remembers the last power it knows (``order``).  Nothing is ever
read past that power, and products/compositions keep the smaller of the
orders that their inputs actually determine.
"""

from fractions import Fraction

import mpmath


class SeriesError(ArithmeticError):
    pass


class LogOfZeroConstantTerm(SeriesError):
    pass


class OrderUnderflow(SeriesError):
    pass


def _is_zero(c):
    if isinstance(c, (int, Fraction)):
        return c == 0
    if hasattr(c, "is_zero") and callable(c.is_zero):
        return c.is_zero()
    try:
        return not c
    except TypeError:
        return c == 0


def _is_numeric(c):
    return isinstance(c, (int, float, complex, Fraction, mpmath.mpf, mpmath.mpc))


def _scale(c, p, q=1):
    """c * p / q with integers p, q, staying in c's domain."""
    if q == 1:
        return c * p
    if isinstance(c, (int, Fraction)):
        return Fraction(c) * p / q
    if isinstance(c, (mpmath.mpf, mpmath.mpc, float, complex)):
        return c * p / q
    return (c * p) / q


class HbarSeries:
    """sum_{k} c_k hbar^{leading + k (+1/2 if half)}, known up to ``order``.

    >>> s = HbarSeries([Fraction(0), Fraction(1)], order=5)   # hbar
    >>> (1 + s).log().exp() == 1 + s
    True
    """

    __slots__ = ("coeffs", "leading", "order", "half")

    def __init__(self, coeffs, leading=0, order=None, half=False):
        coeffs = list(coeffs)
        if order is None:
            order = leading + len(coeffs) - 1
        if order < leading - 1:
            raise OrderUnderflow("order below leading power")
        n = order - leading + 1
        if len(coeffs) > n:
            coeffs = coeffs[:n]
        while len(coeffs) < n:
            coeffs.append(0)
        self.coeffs = coeffs
        self.leading = leading
        self.order = order
        self.half = bool(half)

    # -- construction helpers
    @classmethod
    def constant(cls, c, order):
        return cls([c], 0, order)

    @classmethod
    def zero(cls, order, leading=0):
        return cls([], leading, order)

    def __getitem__(self, power):
        """Coefficient of hbar^power (power counted without the half shift)."""
        if power > self.order:
            raise OrderUnderflow("coefficient beyond truncation order requested")
        i = power - self.leading
        if i < 0:
            return 0
        return self.coeffs[i]

    def powers(self):
        return range(self.leading, self.order + 1)

    def items(self):
        return [(p, self[p]) for p in self.powers()]

    def _align(self, other):
        if not isinstance(other, HbarSeries):
            other = HbarSeries([other], 0, max(self.order, 0))
        if other.half != self.half:
            raise SeriesError("cannot mix integer and half-integer series")
        return other

    def __add__(self, other):
        o = self._align(other)
        lo = min(self.leading, o.leading)
        hi = min(self.order, o.order)
        return HbarSeries([_add(self._get(p), o._get(p)) for p in range(lo, hi + 1)],
                          lo, hi, self.half)

    __radd__ = __add__

    def _get(self, p):
        i = p - self.leading
        if i < 0 or p > self.order:
            return 0
        return self.coeffs[i]

    def __neg__(self):
        return HbarSeries([-c if not _is_zero(c) else 0 for c in self.coeffs],
                          self.leading, self.order, self.half)

    def __sub__(self, other):
        return self + (-self._align(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, HbarSeries):
            return HbarSeries([_mul(c, other) for c in self.coeffs],
                              self.leading, self.order, self.half)
        a, b = self, other
        lead = a.leading + b.leading
        half = a.half ^ b.half
        if a.half and b.half:
            lead += 1
        # product known up to min(a.order + b.leading, b.order + a.leading)
        hi = min(a.order + b.leading, b.order + a.leading)
        if a.half and b.half:
            hi += 1
        n = hi - lead + 1
        out = [0] * max(n, 0)
        for i, ca in enumerate(a.coeffs):
            if _is_zero(ca):
                continue
            for j, cb in enumerate(b.coeffs):
                k = i + j
                if k >= n:
                    break
                if _is_zero(cb):
                    continue
                out[k] = _add(out[k], ca * cb)
        return HbarSeries(out, lead, hi, half)

    __rmul__ = __mul__

    def shift(self, k):
        """Multiply by hbar^k."""
        return HbarSeries(self.coeffs, self.leading + k, self.order + k, self.half)

    def truncate(self, order):
        return HbarSeries(self.coeffs, self.leading, min(order, self.order), self.half)

    def normalized(self):
        """Drop leading zero coefficients (moves ``leading`` up)."""
        k = 0
        while k < len(self.coeffs) and _is_zero(self.coeffs[k]):
            k += 1
        if k == len(self.coeffs):
            return HbarSeries([], self.order + 1, self.order, self.half)
        return HbarSeries(self.coeffs[k:], self.leading + k, self.order, self.half)

    def is_zero(self):
        return all(_is_zero(c) for c in self.coeffs)

    def map(self, fn):
        return HbarSeries([fn(c) for c in self.coeffs], self.leading, self.order, self.half)

    def _dense_from0(self):
        if self.leading < 0 or self.half:
            raise SeriesError("operation needs an integer series without negative powers")
        return [self._get(p) for p in range(0, self.order + 1)]

    def exp(self):
        """exp of a series with leading >= 0.

        A nonzero constant term is only allowed for numeric coefficients.
        """
        a = self._dense_from0()
        N = self.order
        c0 = a[0] if a else 0
        e0 = 1
        if not _is_zero(c0):
            if not _is_numeric(c0):
                raise SeriesError("exp of a symbolic nonzero constant term")
            e0 = mpmath.exp(c0)
        E = [e0] + [0] * N
        for n in range(1, N + 1):
            s = 0
            for k in range(1, n + 1):
                if _is_zero(a[k]) or _is_zero(E[n - k]):
                    continue
                s = _add(s, _scale(a[k] * E[n - k], k))
            E[n] = _scale(s, 1, n) if not _is_zero(s) else 0
        return HbarSeries(E, 0, N)

    def log(self):
        a = self._dense_from0()
        N = self.order
        c0 = a[0] if a else 0
        if _is_zero(c0):
            raise LogOfZeroConstantTerm("log needs a nonzero constant term")
        if _is_numeric(c0):
            L0 = 0 if c0 == 1 else mpmath.log(c0)
        else:
            if not c0 == 1 and not (hasattr(c0, "field") and c0 == c0.field.one):
                raise SeriesError("log of a symbolic constant other than 1")
            L0 = 0
        if isinstance(c0, (int, Fraction)):
            inv0 = 1 / Fraction(c0)
        elif _is_numeric(c0):
            inv0 = 1 / c0
        else:
            inv0 = c0.field.one / c0 if hasattr(c0, "field") else 1
        L = [L0] + [0] * N
        for n in range(1, N + 1):
            s = _scale(a[n], n) if not _is_zero(a[n]) else 0
            for k in range(1, n):
                if _is_zero(L[k]) or _is_zero(a[n - k]):
                    continue
                s = _add(s, -_scale(L[k] * a[n - k], k))
            L[n] = _scale(s * inv0, 1, n) if not _is_zero(s) else 0
        return HbarSeries(L, 0, N)

    def compose(self, g):
        """self(g(hbar)) for g with zero constant term (leading >= 1)."""
        if g.half or self.half:
            raise SeriesError("compose needs integer series")
        g = g.normalized() if g.leading < 1 else g
        if g.leading < 1 and not g.is_zero():
            raise SeriesError("inner series must have no constant or negative terms")
        if self.leading < 0:
            raise SeriesError("outer series must have leading >= 0")
        gl = max(g.leading, 1)
        order = min(g.order, (self.order + 1) * gl - 1)
        # Horner from the highest power.
        out = HbarSeries([self._get(self.order)], 0, order)
        for p in range(self.order - 1, -1, -1):
            out = out * g + HbarSeries([self._get(p)], 0, order)
            out = out.truncate(order)
        return out

    def evaluate(self, hbar):
        hbar = mpmath.mpmathify(hbar)
        s = 0
        for p, c in self.items():
            if _is_zero(c):
                continue
            e = p + (mpmath.mpf(1) / 2 if self.half else 0)
            s += c * hbar ** e
        return s

    def __eq__(self, other):
        if not isinstance(other, HbarSeries):
            return NotImplemented
        if self.half != other.half:
            return False
        hi = min(self.order, other.order)
        lo = min(self.leading, other.leading)
        return all(_eq(self._get(p), other._get(p)) for p in range(lo, hi + 1))

    __hash__ = None

    def __repr__(self):
        terms = []
        for p, c in self.items():
            if _is_zero(c):
                continue
            e = "%s/2" % (2 * p + 1) if self.half else str(p)
            terms.append("(%s)*hbar^%s" % (c, e))
        body = " + ".join(terms) if terms else "0"
        return "%s + O(hbar^%s)" % (body, self.order + 1)


def _add(a, b):
    if _is_zero(a):
        return b
    if _is_zero(b):
        return a
    return a + b


def _mul(a, b):
    if _is_zero(a) or _is_zero(b):
        return 0
    return a * b


def _eq(a, b):
    if _is_zero(a):
        return _is_zero(b)
    if _is_zero(b):
        return False
    return _is_zero(a - b)


class TransSeries:
    """Finite sum of exp(E_j) * P_j with E_j carrying an hbar^-1 part.

    ``terms`` is a list of (exponent, prefactor) HbarSeries pairs.  Terms
    with equal exponents are merged; the key used for ordering is the real
    part of the hbar^-1 coefficient (numeric data) or its string form.
    """

    def __init__(self, terms):
        merged = []
        for E, P in terms:
            for i, (E2, P2) in enumerate(merged):
                if E2 == E:
                    merged[i] = (E2, P2 + P)
                    break
            else:
                merged.append((E, P))
        merged.sort(key=lambda t: self._key(t[0]))
        pert = [t for t in merged if t[0].is_zero()]
        if len(pert) > 1:
            raise SeriesError("more than one perturbative sector")
        self.terms = merged

    @staticmethod
    def _key(E):
        try:
            c = E[-1] if E.leading <= -1 else 0
        except OrderUnderflow:
            c = 0
        if _is_numeric(c):
            return (0, float(mpmath.re(c)), "")
        return (1, 0.0, str(c))

    def perturbative(self):
        for E, P in self.terms:
            if E.is_zero():
                return P
        return None

    def __len__(self):
        return len(self.terms)

    def __repr__(self):
        return "TransSeries(%d sectors)" % len(self.terms)
