"""Eynard-Orantin topological recursion on local expansions.

Correlators W_{g,n} are stored as symmetric coefficient tensors over a
finite basis of differentials:

* rational curves with B = dz1 dz2/(z1-z2)^2: basis (i, k) is
  dz/(z - r_i)^k, k >= 2;
* the elliptic curve x = wp(z), y = wp'(z): basis (i, m) is
  wp^(m)(z - r_i) dz, with (i, 0) meaning (wp(z - r_i) + eta_A/omega_A) dz.

A tensor is a dict {sorted tuple of basis keys: coefficient}; the value is
the coefficient of every ordered monomial with that multiset of keys.

All residues are taken at the ramification points in a local coordinate
t = z - r_i.  Everything the recursion needs from the curve is supplied by
a model object as truncated Laurent series in t, so the same engine runs
in exact rationals (Airy, Weber) and in mpmath numerics (Painleve I).
"""

import math
from fractions import Fraction
from itertools import combinations

import mpmath
import sympy

try:
    from gmpy2 import mpq as _Q
except ImportError:  # pragma: no cover
    _Q = Fraction


class TRError(ArithmeticError):
    pass


class KernelSingular(TRError):
    pass


class PrimitiveUndefined(TRError):
    pass


# -- truncated Laurent series: (v, [c_v, c_{v+1}, ...]) up to a fixed top ----

class LS:
    __slots__ = ("v", "c")

    def __init__(self, v, c):
        self.v = v
        self.c = c

    @property
    def top(self):
        return self.v + len(self.c) - 1

    def __getitem__(self, e):
        i = e - self.v
        return self.c[i] if 0 <= i < len(self.c) else 0

    def trunc(self, top):
        if top >= self.top:
            return self
        return LS(self.v, self.c[: max(0, top - self.v + 1)])

    def scale(self, a):
        return LS(self.v, [a * x for x in self.c])

    def shift(self, k):
        return LS(self.v + k, self.c)

    def __neg__(self):
        return self.scale(-1)

    def __add__(self, o):
        top = min(self.top, o.top)
        v = min(self.v, o.v)
        return LS(v, [self[e] + o[e] for e in range(v, top + 1)])

    def __sub__(self, o):
        return self + (-o)

    def mul(self, o, top=None):
        t = self.v + o.top if top is None else top
        t = min(t, self.v + o.top, o.v + self.top)
        v = self.v + o.v
        out = [0] * max(0, t - v + 1)
        a, b = self.c, o.c
        for i, x in enumerate(a):
            if not x:
                continue
            lim = t - v - i
            if lim < 0:
                break
            for j in range(min(len(b), lim + 1)):
                out[i + j] += x * b[j]
        return LS(v, out)

    def normalize(self):
        k = 0
        while k < len(self.c) and not self.c[k]:
            k += 1
        return LS(self.v + k, self.c[k:])

    def inv(self):
        s = self.normalize()
        if not s.c:
            raise KernelSingular("inverting a series that vanishes to the working order")
        a0 = s.c[0]
        n = len(s.c)
        out = [0] * n
        out[0] = 1 / a0
        for k in range(1, n):
            acc = 0
            for j in range(1, k + 1):
                if j < n and s.c[j]:
                    acc += s.c[j] * out[k - j]
            out[k] = -acc / a0
        return LS(-s.v, out)

    def power(self, k):
        if k < 0:
            return self.inv().power(-k)
        if k == 0:
            return LS(0, [1] + [0] * (len(self.c) - 1))
        out = self
        for _ in range(k - 1):
            out = out.mul(self)
        return out

    def deriv(self):
        return LS(self.v - 1, [(self.v + i) * x for i, x in enumerate(self.c)])

    def integ(self):
        if self[-1]:
            raise PrimitiveUndefined("log term in a local primitive")
        return LS(self.v + 1, [x / (self.v + i + 1) if (self.v + i + 1) else 0 for i, x in enumerate(self.c)])

    def compose_neg(self):
        return LS(self.v, [x if (self.v + i) % 2 == 0 else -x for i, x in enumerate(self.c)])


def residue(a, b):
    """Coefficient of t^-1 in a*b."""
    total = 0
    for i, x in enumerate(a.c):
        if x:
            e = -1 - (a.v + i)
            y = b[e]
            if y:
                total += x * y
    return total


def mono(e, c, top, zero=0):
    """c * t^e known exactly up to t^top."""
    return LS(e, [c] + [zero] * max(0, top - e))


# -- models --------------------------------------------------------------------

class RationalModel:
    """Genus-zero data x(z), y(z) with a global involution sigma(z).

    Coefficients are exact rationals; ``ram`` are the ramification points.
    """

    kind = "rational"

    def __init__(self, x, y, sigma, ram, top, z=None):
        self.z = z or sympy.Symbol("z")
        self.x, self.y, self.sigma = x, y, sigma
        self.ram = [sympy.Rational(r) for r in ram]
        self.top = top
        self.zero = _Q(0)
        self.one = _Q(1)
        self._loc = [self._local(r) for r in self.ram]
        self._cache = {}

    def _taylor(self, expr, r, n, v=0):
        t = sympy.Symbol("t")
        e = sympy.series(expr.subs(self.z, r + t), t, 0, n + 1).removeO()
        p = sympy.Poly(sympy.expand(e * t ** (-v)), t) if v else sympy.Poly(sympy.expand(e), t)
        cs = [_Q(0)] * (n - v + 1)
        for (d,), c in p.terms():
            c = sympy.Rational(c)
            if d < len(cs):
                cs[d] = _Q(int(c.p), int(c.q))
        return LS(v, cs)

    def _local(self, r):
        N = self.top + 6
        x = self._taylor(self.x, r, N)
        y = self._taylor(self.y, r, N)
        sg = self._taylor(self.sigma - r, r, N)
        sgp = sg.deriv()
        xp = x.deriv()
        s = sg.normalize()
        if s.v != 1:
            raise TRError("involution is not a local coordinate change at %s" % r)
        y_sigma = self._compose(y, sg)
        den = (y - y_sigma).mul(xp).scale(2)
        phi = y.mul(xp).integ()
        return {"s": sg, "sp": sgp, "den": den, "phi": phi, "y": y, "x": x}

    def _compose(self, f, s):
        """f(r + s(t)) given Taylor f(r + t) and s with valuation 1."""
        s = s.normalize()
        out = LS(0, [self.zero] * (self.top + 7))
        pw = LS(0, [self.one] + [self.zero] * (self.top + 6))
        for k in range(len(f.c)):
            if f.c[k]:
                out = out + pw.scale(f.c[k])
            pw = pw.mul(s, top=self.top + 6)
        return out

    def nram(self):
        return len(self.ram)

    def out_basis(self, i, kmax):
        return [(i, k) for k in range(2, kmax + 1)]

    @staticmethod
    def pole(b):
        return b[1]

    def negligible(self, v, scale):
        return not v

    def basis(self, a, i, sigma):
        key = (a, i, sigma)
        if key in self._cache:
            return self._cache[key]
        j, k = a
        loc = self._loc[i]
        base = loc["s"] if sigma else LS(1, [self.one] + [self.zero] * (self.top + 6))
        d = self.ram[i] - self.ram[j]
        if d:
            dq = _Q(int(d.p), int(d.q))
            base = LS(0, [dq] + [self.zero] * (len(base.c) + base.v - 1)) + base
        f = base.power(-k).trunc(self.top + 2)
        if sigma:
            f = f.mul(loc["sp"], top=self.top + 2)
        self._cache[key] = f
        return f

    def kernel_numerator(self, i, b):
        """Coefficient series of e_b(z0) in the integral of B from sigma(z) to z."""
        _, k = b
        loc = self._loc[i]
        t = LS(1, [self.one] + [self.zero] * (self.top + 6))
        return (t.power(k - 1) - loc["s"].power(k - 1)).trunc(self.top + 2)

    def w02_expansion(self, i, sigma, kmax):
        loc = self._loc[i]
        s = loc["s"] if sigma else LS(1, [self.one] + [self.zero] * (self.top + 6))
        out = {}
        pw = LS(0, [self.one] + [self.zero] * (self.top + 6))
        for k in range(0, kmax - 1):
            f = pw.scale(_Q(k + 1))
            if sigma:
                f = f.mul(loc["sp"], top=self.top + 2)
            out[(i, k + 2)] = f.trunc(self.top + 2)
            pw = pw.mul(s, top=self.top + 6)
        return out

    def w02_diag(self, i):
        loc = self._loc[i]
        t = LS(1, [self.one] + [self.zero] * (self.top + 6))
        d = (t - loc["s"]).power(-2)
        return d.mul(loc["sp"], top=self.top + 2)

    def den(self, i):
        return self._loc[i]["den"]

    def phi(self, i):
        return self._loc[i]["phi"]


class EllipticModel:
    """x = wp(z), y = wp'(z) with B = (wp(z1 - z2) + eta_A/omega_A) dz1 dz2."""

    kind = "elliptic"

    def __init__(self, ell, top):
        self.E = ell
        self.top = top
        self.zero = mpmath.mpc(0)
        self.one = mpmath.mpc(1)
        hp = ell.half_periods()
        self.ram = [r for r, _ in hp]
        self.e = [e for _, e in hp]
        self.c = ell.c
        N = top + 8
        lz = ell.laurent_at_zero(N + 2)
        wp0 = [self.zero] * (N + 3)
        wp0[0] = self.one
        for k in range(2, len(lz)):
            if 2 * k < len(wp0):
                wp0[2 * k] = lz[k]
        self._wp0 = LS(-2, wp0)
        self._wph = [LS(0, ell.taylor_at_half_period(e, N)) for e in self.e]
        self._cache = {}
        self._loc = []
        g2, g3 = ell.g2, ell.g3
        for i in range(3):
            P = self._wph[i]
            Pp = P.deriv()
            den = Pp.mul(Pp).scale(4)
            tt = LS(1, [self.one] + [self.zero] * N)
            phi = (P.mul(Pp) - P.integ().scale(g2) - tt.scale(mpmath.mpf(3) / 2 * g3)).scale(mpmath.mpf(2) / 5)
            self._loc.append({"den": den, "phi": phi})

    def nram(self):
        return 3

    def out_basis(self, i, kmax):
        return [(i, m) for m in range(0, kmax - 1, 2)]

    @staticmethod
    def pole(b):
        return b[1] + 2

    def negligible(self, v, scale):
        return abs(v) <= scale * mpmath.eps * 2 ** 40

    def _wp_at(self, i, j, m):
        """wp^(m)(r_i - r_j + t) (+c when m = 0) as a series."""
        if i == j:
            f = self._wp0
        else:
            k = 3 - i - j
            f = self._wph[k]
        for _ in range(m):
            f = f.deriv()
        if m == 0:
            f = f + LS(0, [self.c] + [self.zero] * (self.top + 4))
        return f.trunc(self.top + 2)

    def basis(self, a, i, sigma):
        key = (a, i, sigma)
        if key not in self._cache:
            f = self._wp_at(i, a[0], a[1])
            self._cache[key] = (-f.compose_neg()) if sigma else f
        return self._cache[key]

    def kernel_numerator(self, i, b):
        _, m = b
        coeff = mpmath.mpf(2) / math.factorial(m + 1)
        if m + 1 > self.top + 2:
            return LS(0, [])
        return mono(m + 1, coeff, self.top + 2, self.zero)

    def w02_expansion(self, i, sigma, mmax):
        out = {}
        for m in range(0, mmax + 1):
            c = mpmath.mpf(1) / math.factorial(m)
            if sigma:
                c = -c
            elif m % 2:
                c = -c
            out[(i, m)] = mono(m, c, self.top + 2, self.zero)
        return out

    def w02_diag(self, i):
        f = self._wp0
        two = LS(-2, [f.c[k] * mpmath.mpf(2) ** (k - 2) for k in range(len(f.c))])
        two = two + LS(0, [self.c] + [self.zero] * (self.top + 4))
        return -two.trunc(self.top + 2)

    def den(self, i):
        return self._loc[i]["den"]

    def phi(self, i):
        return self._loc[i]["phi"]


# -- the recursion -----------------------------------------------------------------

def needed_pairs(gmax, nmax=1):
    """(g, n) with 2g-2+n > 0 needed for W_{g,n'} up to gmax, n' <= nmax."""
    out = set()
    for g in range(0, gmax + 1):
        for n in range(1, nmax + 1):
            if 2 * g - 2 + n > 0:
                out.add((g, n))
    changed = True
    while changed:
        changed = False
        for g, n in list(out):
            req = []
            if g >= 1:
                req.append((g - 1, n + 1))
            for g1 in range(0, g + 1):
                for n1 in range(1, n):
                    req.append((g1, n1))
                    req.append((g - g1, n - n1))
            for p in req:
                if 2 * p[0] - 2 + p[1] > 0 and p[1] >= 1 and p not in out:
                    out.add(p)
                    changed = True
    return out


class TopologicalRecursion:
    """Correlators W_{g,n} and free energies F_g for a model.

    ``sign`` multiplies the recursion kernel; W_{g,n} then scales by
    sign^(2g-2+n).
    """

    def __init__(self, model, sign=1):
        self.m = model
        self.sign = sign
        self.W = {}
        self._exp = {}
        self._kern = {}

    # pole order bound of W_{g,n}: each basis key carries a pole of order <= 2(3g-3+n)+2
    def _kmax(self, g, n):
        return 2 * (3 * g - 3 + n) + 2

    def _kernel(self, i, b):
        key = (i, b)
        if key not in self._kern:
            num = self.m.kernel_numerator(i, b)
            if not num.c:
                self._kern[key] = None
            else:
                k = num.mul(self.m.den(i).inv(), top=self.m.top + 2)
                self._kern[key] = k.scale(self.sign) if self.sign != 1 else k
        return self._kern[key]

    def expand(self, g, n, i, sigma):
        """{sorted rest: series of W_{g,n}(z, rest) near r_i} (z first slot)."""
        key = (g, n, i, sigma)
        if key in self._exp:
            return self._exp[key]
        if (g, n) == (0, 2):
            out = {(b,): s for b, s in self.m.w02_expansion(i, sigma, self.m.top).items()}
        else:
            W = self.correlator(g, n)
            out = {}
            for mono, c in W.items():
                seen = set()
                for p, a in enumerate(mono):
                    if a in seen:
                        continue
                    seen.add(a)
                    rest = mono[:p] + mono[p + 1:]
                    f = self.m.basis(a, i, sigma).scale(c)
                    out[rest] = out[rest] + f if rest in out else f
        self._exp[key] = out
        return out

    def _rec(self, i, g, J):
        """Series of the recursion integrand near r_i for output W_{g,|J|+1}."""
        n = len(J)
        top = self.m.top
        terms = []
        if g >= 1:
            if n == 0 and g == 1:
                terms.append(self.m.w02_diag(i))
            else:
                inner = self.expand(g - 1, n + 2, i, False)
                sig = {}
                acc = None
                for rest, f in inner.items():
                    # rest = sorted (a', J); contract one slot equal to a' with sigma expansion
                    if len(rest) != n + 1:
                        continue
                    seen = set()
                    for p, a2 in enumerate(rest):
                        if a2 in seen:
                            continue
                        seen.add(a2)
                        if rest[:p] + rest[p + 1:] != J:
                            continue
                        fs = sig.get(a2)
                        if fs is None:
                            fs = sig[a2] = self.m.basis(a2, i, True)
                        prod = f.mul(fs, top=0)
                        acc = prod if acc is None else acc + prod
                if acc is not None:
                    terms.append(acc)
        idx = range(n)
        done = set()
        for size in range(0, n + 1):
            for I in combinations(idx, size):
                JI = tuple(J[k] for k in I)
                JC = tuple(J[k] for k in idx if k not in I)
                if (JI, JC) in done:
                    continue
                done.add((JI, JC))
                mult = _count_splits(J, JI)
                for g1 in range(0, g + 1):
                    g2 = g - g1
                    if (g1 == 0 and size == 0) or (g2 == 0 and size == n):
                        continue
                    if 2 * g1 - 1 + size < 0 or 2 * g2 - 1 + (n - size) < 0:
                        continue
                    A = self.expand(g1, size + 1, i, False).get(JI)
                    if A is None:
                        continue
                    B = self.expand(g2, n - size + 1, i, True).get(JC)
                    if B is None:
                        continue
                    prod = A.mul(B, top=0)
                    terms.append(prod.scale(mult) if mult != 1 else prod)
        if not terms:
            return None
        out = terms[0]
        for s in terms[1:]:
            out = out + s
        return out

    def correlator(self, g, n):
        if (g, n) in self.W:
            return self.W[(g, n)]
        if 2 * g - 2 + n <= 0:
            raise TRError("W_{%d,%d} is initial data" % (g, n))
        jkeys = self._j_keys(g, n - 1)
        out = {}
        kmax = self._kmax(g, n)
        for J in jkeys:
            for i in range(self.m.nram()):
                R = self._rec(i, g, J)
                if R is None:
                    continue
                for b in self.m.out_basis(i, kmax):
                    K = self._kernel(i, b)
                    if K is None:
                        continue
                    v = residue(K, R)
                    if v:
                        key = tuple(sorted((b,) + J))
                        if key not in out:
                            out[key] = v
        if out:
            scale = max(abs(v) for v in out.values())
            out = {k: v for k, v in out.items() if not self.m.negligible(v, scale)}
        self.W[(g, n)] = out
        return out

    def _j_keys(self, g, n):
        """Sorted J tuples on which W_{g,n+1}(z0, J) can be nonzero."""
        if n == 0:
            return [()]
        keys = set()
        if g >= 1:
            for rest in self._rest_keys(g - 1, n + 2, 2):
                keys.add(rest)
        for g1 in range(0, g + 1):
            for s in range(0, n + 1):
                g2 = g - g1
                if (g1 == 0 and s == 0) or (g2 == 0 and s == n):
                    continue
                if 2 * g1 - 1 + s < 0 or 2 * g2 - 1 + (n - s) < 0:
                    continue
                L = self._rest_keys(g1, s + 1, 1)
                Rr = self._rest_keys(g2, n - s + 1, 1)
                for a in L:
                    for b in Rr:
                        keys.add(tuple(sorted(a + b)))
        kmax = self._kmax(g, n + 1)
        return sorted(k for k in keys if all(self.m.pole(b) <= kmax for b in k))

    def _rest_keys(self, g, n, drop):
        """Sorted tuples obtained by deleting ``drop`` slots from monomials of W_{g,n}."""
        if (g, n) == (0, 2):
            kmax = self.m.top
            out = set()
            if drop == 1:
                for i in range(self.m.nram()):
                    for b in self.m.w02_expansion(i, False, kmax):
                        out.add((b,))
                    for b in self.m.w02_expansion(i, True, kmax):
                        out.add((b,))
            else:
                out.add(())
            return out
        W = self.correlator(g, n)
        out = set()
        for mono in W:
            for I in combinations(range(len(mono)), drop):
                out.add(tuple(x for k, x in enumerate(mono) if k not in I))
        return out

    def free_energy(self, g):
        """F_g for g >= 2 from the residue of (primitive of y dx) * W_{g,1}."""
        if g < 2:
            raise PrimitiveUndefined("F_0 and F_1 are not given by the residue formula")
        W = self.correlator(g, 1)
        total = 0
        for i in range(self.m.nram()):
            ser = None
            for (a,), c in W.items():
                f = self.m.basis(a, i, False).scale(c)
                ser = f if ser is None else ser + f
            if ser is not None:
                total += residue(self.m.phi(i), ser)
        return total / (2 - 2 * g)


def _count_splits(J, JI):
    """Number of position subsets of J whose values form the multiset JI."""
    from collections import Counter
    cJ, cI = Counter(J), Counter(JI)
    m = 1
    for k, v in cI.items():
        m *= math.comb(cJ[k], v)
    return m


# -- concrete curves -------------------------------------------------------------

def airy_model(top=24):
    z = sympy.Symbol("z")
    return RationalModel(z ** 2, z, -z, [0], top, z)


def weber_model(top=40):
    """Weber data at nu = 1; F_g(nu) = F_g(1) nu^(2-2g) by homogeneity."""
    z = sympy.Symbol("z")
    return RationalModel(z + 1 / z, (z - 1 / z) / 2, 1 / z, [1, -1], top, z)


KERNEL_SIGN = 1


def weber_free_energies(gmax=5, sign=None):
    """{g: F_g at nu = 1 as Fraction} for 2 <= g <= gmax."""
    tr = TopologicalRecursion(weber_model(top=6 * gmax + 6), sign=KERNEL_SIGN if sign is None else sign)
    out = {}
    for g in range(2, gmax + 1):
        v = tr.free_energy(g)
        out[g] = Fraction(int(v.numerator), int(v.denominator))
    return out


def _orderings(key):
    from collections import Counter
    m = math.factorial(len(key))
    for v in Counter(key).values():
        m //= math.factorial(v)
    return m


def airy_wave_check(gmax=2):
    """Exponent coefficients of the Airy wave function built from correlators.

    With z(x) = sqrt(x) and base point infinity each basis key (0, k)
    integrates to z^(1-k)/(1-k), so the order hbar^m part of the exponent
    is c_m x^(-3m/2).  Returns {"exponent": {m: c_m}, "series": {m: a_m}}
    where 1 + sum a_m hbar^m is the exponential of the exponent (for the
    + solution), together with the x^(-1/4) prefactor read off from the
    finite part of the (0,2) term.
    """
    tr = TopologicalRecursion(airy_model(top=6 * gmax + 8))
    expo = {}
    for m in range(1, gmax + 1):
        total = Fraction(0)
        for g in range(0, m // 2 + 2):
            n = m + 2 - 2 * g
            if n < 1:
                continue
            part = Fraction(0)
            for key, c in tr.correlator(g, n).items():
                term = Fraction(int(c.numerator), int(c.denominator)) * _orderings(key)
                for _, k in key:
                    term /= (1 - k)
                part += term
            total += part / math.factorial(n)
        expo[m] = total
    # exponentiate the series sum expo[m] h^m
    a = {0: Fraction(1)}
    for m in range(1, gmax + 1):
        # a' = expo' a  =>  m a_m = sum_k k e_k a_{m-k}
        a[m] = sum(k * expo[k] * a[m - k] for k in range(1, m + 1)) / m
    # (0,2): B - dx dx/(x-x)^2 = dz1 dz2/(z1+z2)^2; its double integral from
    # infinity to z has finite part -log(2z), giving (1/2)(-log 2 - (1/2) log x)
    return {"exponent": expo, "series": {m: a[m] for m in range(1, gmax + 1)},
            "prefactor_x_power": Fraction(-1, 4), "prefactor_constant": "2^(-1/2)",
            "kernel_sign": tr.sign}
