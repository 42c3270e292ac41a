"""Painleve I from the elliptic spectral curve y^2 = 4x^3 + 2t x + u(t, nu).

u(t, nu) is fixed by the A-period of y dx being 2 pi i nu.  Free energies
come from the closed forms for F_0, F_1 and from the elliptic recursion for
g >= 2; the tau function is the discrete Fourier sum over nu + k hbar.
"""

import math
from dataclasses import dataclass, field

import mpmath

from . import laurent
from .elliptic import DegenerateCurve, EllipticData
from .laurent import LaurentXY
from .tr import EllipticModel, TopologicalRecursion


class PainleveError(ArithmeticError):
    pass


class NewtonDiverged(PainleveError):
    pass


class DegenerateAtSolution(PainleveError):
    pass


class TailNotConverged(PainleveError):
    pass


class CurveSolveFailedAtShiftedNu(PainleveError):
    pass


class ShiftEvaluationFailed(PainleveError):
    pass


class StencilNoiseDominates(PainleveError):
    pass


# -- the curve ------------------------------------------------------------------

class PICurve:
    """Solved curve at (t, nu) with its Weierstrass data."""

    def __init__(self, t, nu, u, ell):
        self.t = mpmath.mpmathify(t)
        self.nu = mpmath.mpmathify(nu)
        self.u = u
        self.E = ell
        self._tr = None
        self._F = {}

    @property
    def cycle_choice(self):
        return {"a_pair": self.E.a_pair, "b_pair": self.E.b_pair, "a_sign": self.E.a_sign}

    def nu_of_u(self):
        return self.E.period_A / (2j * mpmath.pi)

    def b_period(self):
        """oint_B y dx."""
        return self.E.period_B

    def F0(self):
        return self.t * self.u / 5 + self.nu / 2 * self.E.period_B

    def F1(self):
        # 6 log(omega_A) + log D keeps the branch continuous where omega_A^6 < 0
        return -(6 * mpmath.log(self.E.omega_A) + mpmath.log(self.E.D)) / 12

    def recursion(self, gmax=2):
        if self._tr is None:
            self._tr = TopologicalRecursion(EllipticModel(self.E, top=6 * gmax + 8))
        return self._tr

    def F(self, g):
        if g not in self._F:
            if g == 0:
                self._F[g] = self.F0()
            elif g == 1:
                self._F[g] = self.F1()
            else:
                self._F[g] = self.recursion(g).free_energy(g)
        return self._F[g]

    def log_Z(self, hbar, gmax):
        return sum(hbar ** (2 * g - 2) * self.F(g) for g in range(gmax + 1))

    def neighbour(self, t, nu):
        return solve_u(t, nu, guess=self.u, ref_roots=self.E.roots,
                       a_sign=self.E.a_sign, a_pair=self.E.a_pair, b_pair=self.E.b_pair)

    def to_json(self):
        c = lambda z: [float(mpmath.re(z)), float(mpmath.im(z))]
        d = self.E.to_json()
        d.update({"nu": c(self.nu), "F0": c(self.F0()), "F1": c(self.F1()),
                  "B_period": c(self.b_period())})
        return d


def solve_u(t, nu, guess=None, ref_roots=None, a_sign=1, a_pair=(1, 2), b_pair=(0, 1),
            tol=None, maxiter=60):
    """Newton iteration on nu(u) = (1/2 pi i) oint_A y dx.

    d/du oint_A y dx = oint_A dx/(2y) = omega_A/2.
    """
    t = mpmath.mpmathify(t)
    nu = mpmath.mpmathify(nu)
    u = mpmath.mpc(0 if guess is None else guess)
    tol = tol or mpmath.eps * 2 ** 10
    ref = ref_roots
    for _ in range(maxiter):
        try:
            E = EllipticData(t, u, a_pair=a_pair, b_pair=b_pair, ref_roots=ref, a_sign=a_sign)
        except DegenerateCurve as exc:
            raise DegenerateAtSolution(str(exc))
        f = E.period_A / (2j * mpmath.pi) - nu
        df = E.omega_A / (4j * mpmath.pi)
        du = f / df
        lim = 0.5 * max(1, abs(u))
        if abs(du) > lim:
            du = du * lim / abs(du)
        u -= du
        ref = E.roots
        if abs(f) <= tol * max(1, abs(nu)) and abs(du) <= tol * max(1, abs(u)) ** 0.5 * 1e3:
            E = EllipticData(t, u, a_pair=a_pair, b_pair=b_pair, ref_roots=ref, a_sign=a_sign)
            return PICurve(t, nu, u, E)
    raise NewtonDiverged("no convergence for t=%s nu=%s" % (t, nu))


# -- finite differences ------------------------------------------------------------

def fd_weights(offsets, order):
    """Weights w with sum w_j f(x + s_j h) ~ h^order f^(order)(x)."""
    n = len(offsets)
    A = mpmath.matrix(n, n)
    b = mpmath.matrix(n, 1)
    for k in range(n):
        for j, s in enumerate(offsets):
            A[k, j] = mpmath.mpf(s) ** k
    b[order] = math.factorial(order)
    w = mpmath.lu_solve(A, b)
    return [w[j] for j in range(n)]


def _unwrap(vals, centre):
    out = list(vals)
    two_pi_i = 2j * mpmath.pi
    for j in range(centre + 1, len(out)):
        out[j] -= two_pi_i * mpmath.nint(mpmath.im(out[j] - out[j - 1]) / (2 * mpmath.pi))
    for j in range(centre - 1, -1, -1):
        out[j] -= two_pi_i * mpmath.nint(mpmath.im(out[j] - out[j + 1]) / (2 * mpmath.pi))
    return out


def derivatives(vals, h, orders, unwrap=False):
    """Central-difference derivatives of the given orders from an odd stencil."""
    n = len(vals)
    c = n // 2
    if unwrap:
        vals = _unwrap(vals, c)
    offs = list(range(-c, c + 1))
    out = {}
    for d in orders:
        w = fd_weights(offs, d)
        out[d] = sum(wj * v for wj, v in zip(w, vals)) / h ** d
    return out


# -- partition function ------------------------------------------------------------

@dataclass
class PartitionData:
    t: object
    nu: object
    F: list
    dF_dt: object = None
    dF_dnu: object = None
    d2F_dnu2: object = None
    u: object = None
    B_period: object = None
    tau_ratio: object = None

    def log_Z(self, hbar):
        return sum(hbar ** (2 * g - 2) * f for g, f in enumerate(self.F))

    def checks(self):
        """Residuals of dF0/dt = u/2, dF0/dnu = oint_B y dx, d2F0/dnu2 = 2 pi i tau."""
        return {
            "dF0_dt_minus_u_over_2": abs(self.dF_dt - self.u / 2),
            "dF0_dnu_minus_B_period": abs(self.dF_dnu - self.B_period),
            "d2F0_dnu2_minus_2pi_i_tau": abs(self.d2F_dnu2 - 2j * mpmath.pi * self.tau_ratio),
        }

    def to_json(self):
        c = lambda z: [float(mpmath.re(z)), float(mpmath.im(z))]
        return {"t": c(self.t), "nu": c(self.nu), "F": [c(f) for f in self.F],
                "checks": {k: float(v) for k, v in self.checks().items()}}


def partition_function(t, nu, gmax=2, curve=None, h=None):
    """F_g table with finite-difference derivatives of F_0."""
    curve = curve or solve_u(t, nu)
    h = h or mpmath.mpf(10) ** (-(mpmath.mp.dps // 5))
    Fs = [curve.F(g) for g in range(gmax + 1)]
    st = [curve.neighbour(curve.t + j * h, curve.nu).F0() for j in (-2, -1, 0, 1, 2)]
    sn = [curve.neighbour(curve.t, curve.nu + j * h).F0() for j in (-2, -1, 0, 1, 2)]
    dt = derivatives(st, h, [1])[1]
    dn = derivatives(sn, h, [1, 2])
    return PartitionData(curve.t, curve.nu, Fs, dt, dn[1], dn[2], curve.u,
                         curve.b_period(), curve.E.tau)


# -- wave function and quantum curve -----------------------------------------------

class WaveFunction:
    """Regularized integrals of the correlators from z = 0 to z(x).

    log chi_+ = sum_m hbar^m S_m with S_{-1} the primitive of y dx,
    S_0 from the (0,2) term and S_m (m >= 1) from W_{g,n}, 2g-2+n = m.
    Finite parts: the primitive of y dx has no constant term at z = 0, and
    the (0,2) double integral is taken with its log z divergence removed,
    which gives S_0 = -(1/2) log wp'(z) - log sigma(z) + c z^2 / 2 up to a
    constant.
    """

    def __init__(self, curve, mmax=2):
        self.c = curve
        self.E = curve.E
        self.mmax = mmax
        self.tr = curve.recursion(max(2, mmax))
        self.W = {}
        for m in range(1, mmax + 1):
            for g in range(0, m // 2 + 2):
                n = m + 2 - 2 * g
                if n >= 1:
                    self.W[(g, n)] = self.tr.correlator(g, n)
        self.ram = self.tr.m.ram
        self._zeta_r = [self.E.zeta(-r) for r in self.ram]

    def _basis_integral(self, b, z):
        j, m = b
        w = z - self.ram[j]
        if m == 0:
            return -self.E.zeta(w) + self._zeta_r[j] + self.E.c * z
        P, Pp = self.E.wp_pair(w)
        val = self.E.eval_deriv_poly(m - 1, P, Pp)
        if (m - 1) % 2 == 0:
            P0, Pp0 = self.E.wp_pair(-self.ram[j])
            val -= self.E.eval_deriv_poly(m - 1, P0, Pp0)
        return val

    def S(self, x, sheet=1):
        """[S_{-1}, S_0, ..., S_mmax] at x."""
        E = self.E
        z = E.wp_inverse(x, sheet)
        P, Pp = E.wp_pair(z)
        g2, g3 = E.g2, E.g3
        out = [mpmath.mpf(2) / 5 * (P * Pp + g2 * E.zeta(z) - mpmath.mpf(3) / 2 * g3 * z)]
        out.append(-mpmath.log(Pp) / 2 - E.log_sigma(z) + E.c * z * z / 2)
        cache = {}
        for m in range(1, self.mmax + 1):
            tot = mpmath.mpc(0)
            for g in range(0, m // 2 + 2):
                n = m + 2 - 2 * g
                if n < 1:
                    continue
                part = mpmath.mpc(0)
                for key, c in self.W[(g, n)].items():
                    term = c * _orderings(key)
                    for b in key:
                        if b not in cache:
                            cache[b] = self._basis_integral(b, z)
                        term *= cache[b]
                    part += term
                tot += part / math.factorial(n)
            out.append(tot)
        return out


def _orderings(key):
    from collections import Counter
    m = math.factorial(len(key))
    for v in Counter(key).values():
        m //= math.factorial(v)
    return m


def quantum_curve_residual(curve, xs, order=4, h=None):
    """Order-by-order residuals of the PDE for log chi_+ at sample points.

    Returns {x: [r_0, ..., r_{order-1}]} where r_k is the coefficient of
    hbar^k in chi^-1 [hbar^2 d_x^2 - 2 hbar^2 d_t - (4x^3 + 2tx + 2 hbar^2 dF/dt)] chi.
    """
    mmax = order - 2
    h = h or mpmath.mpf(10) ** (-(mpmath.mp.dps // 6))
    curves = {j: (curve if j == 0 else curve.neighbour(curve.t + j * h, curve.nu)) for j in (-2, -1, 0, 1, 2)}
    waves = {j: WaveFunction(c, mmax) for j, c in curves.items()}
    F1t = derivatives([curves[j].F1() for j in (-2, -1, 0, 1, 2)], h, [1])[1]
    F0t = curve.u / 2
    t = curve.t
    out = {}
    for x in xs:
        x = mpmath.mpc(x)
        sx = [waves[0].S(x + j * h) for j in (-2, -1, 0, 1, 2)]
        st = [waves[j].S(x) for j in (-2, -1, 0, 1, 2)]
        n = mmax + 2
        Sx, Sxx, St = [], [], []
        for m in range(n):
            d = derivatives([s[m] for s in sx], h, [1, 2], unwrap=(m == 1))
            Sx.append(d[1])
            Sxx.append(d[2])
            St.append(derivatives([s[m] for s in st], h, [1], unwrap=(m == 1))[1])
        # index m in lists corresponds to S_{m-1}
        res = []
        for k in range(order):
            r = 0
            # hbar^2 (L_xx + L_x^2): L_xx at hbar^k needs S_{k-2}; L_x^2 pairs (a-1)+(b-1)+2 = k
            if 0 <= k - 1 < n:
                r += Sxx[k - 1]
            for a in range(n):
                b = k - a
                if 0 <= b < n:
                    r += Sx[a] * Sx[b]
            if 0 <= k - 1 < n:
                r -= 2 * St[k - 1]
            if k == 0:
                r -= 4 * x ** 3 + 2 * t * x + 2 * F0t
            if k == 2:
                r -= 2 * F1t
            res.append(r)
        out[x] = res
    return out


def a_cycle_shift(curve, x, mmax=2):
    """Change of S_m under z -> z + omega_A: [S_{-1} shift, S_1 shift, ...]."""
    w = WaveFunction(curve, mmax)
    E = curve.E
    z = E.wp_inverse(x)
    P, Pp = E.wp_pair(z)

    def prim(z):
        P, Pp = E.wp_pair(z)
        return mpmath.mpf(2) / 5 * (P * Pp + E.g2 * E.zeta(z) - mpmath.mpf(3) / 2 * E.g3 * z)

    shifts = [prim(z + E.omega_A) - prim(z)]
    for m in range(1, mmax + 1):
        vals = []
        for zz in (z, z + E.omega_A):
            tot = mpmath.mpc(0)
            for g in range(0, m // 2 + 2):
                n = m + 2 - 2 * g
                if n < 1:
                    continue
                part = mpmath.mpc(0)
                for key, c in w.W[(g, n)].items():
                    term = c * _orderings(key)
                    for b in key:
                        term *= w._basis_integral(b, zz)
                    part += term
                tot += part / math.factorial(n)
            vals.append(tot)
        shifts.append(vals[1] - vals[0])
    return shifts


# -- tau function ------------------------------------------------------------------

@dataclass
class TauEvaluation:
    t: object
    nu: object
    rho: object
    hbar: object
    K: int
    gmax: int
    log_tau: object
    terms: dict = field(default_factory=dict)

    @property
    def tau(self):
        return mpmath.exp(self.log_tau)


def centred_rho(curve, rho):
    """rho plus i Re(oint_B y dx)/(2 pi): centres the Fourier sum on k = 0."""
    return mpmath.mpmathify(rho) + 1j * mpmath.re(curve.b_period()) / (2 * mpmath.pi)


def _shift_chain(curve, hbar, kmax, cache):
    """Curves at nu + k hbar for |k| <= kmax, continued step by step."""
    if 0 not in cache:
        cache[0] = curve
    for sgn in (1, -1):
        for k in range(1, kmax + 1):
            key = sgn * k
            if key in cache:
                continue
            prev = cache[sgn * (k - 1)]
            try:
                cache[key] = prev.neighbour(curve.t, curve.nu + key * hbar)
            except (PainleveError, DegenerateCurve) as exc:
                raise CurveSolveFailedAtShiftedNu(str(exc))
    return cache


def tau_evaluate(curve, rho, hbar, K=None, gmax=2, tail=1e-12, kmax=60):
    """tau = sum_k e^{2 pi i k rho/hbar} Z(t, nu + k hbar) at the curve's (t, nu)."""
    hbar = mpmath.mpmathify(hbar)
    rho = mpmath.mpmathify(rho)
    cache = {}
    logs = {}

    def term(k):
        if k not in logs:
            _shift_chain(curve, hbar, abs(k), cache)
            logs[k] = 2j * mpmath.pi * k * rho / hbar + cache[k].log_Z(hbar, gmax)
        return logs[k]

    if K is None:
        k = 0
        term(0)
        while True:
            k += 1
            if k > kmax:
                raise TailNotConverged("Fourier tail above %g at K=%d" % (tail, kmax))
            a, b = term(k), term(-k)
            top = max(mpmath.re(v) for v in logs.values())
            if mpmath.re(a) - top < math.log(tail) and mpmath.re(b) - top < math.log(tail) \
                    and k >= 2:
                K = k
                break
    else:
        for k in range(-K, K + 1):
            term(k)
    vals = [logs[k] for k in range(-K, K + 1)]
    top = max(vals, key=lambda v: mpmath.re(v))
    s = sum(mpmath.exp(v - top) for v in vals)
    edge = max(abs(mpmath.exp(logs[K] - top)), abs(mpmath.exp(logs[-K] - top)))
    if edge > tail * abs(s) * 1e3:
        raise TailNotConverged("edge term %s relative to the sum" % mpmath.nstr(edge / abs(s), 3))
    return TauEvaluation(curve.t, curve.nu, rho, hbar, K, gmax, top + mpmath.log(s),
                         {k: logs[k] for k in range(-K, K + 1)})


@dataclass
class PainleveResult:
    t: object
    nu: object
    rho: object
    hbar: object
    K: int
    gmax: int
    log_tau: object
    q: object
    p: object
    H: object
    residual: object
    hamilton_residual: object
    boutroux: object
    boutroux_alt: object = None

    def to_json(self):
        c = lambda z: [float(mpmath.re(z)), float(mpmath.im(z))]
        return {"t": c(self.t), "nu": c(self.nu), "rho": c(self.rho), "hbar": float(mpmath.re(self.hbar)),
                "K": self.K, "gmax": self.gmax, "tau_log": c(self.log_tau), "q": c(self.q),
                "p": c(self.p), "H": c(self.H), "residual": float(abs(self.residual)),
                "hamilton_residual": float(abs(self.hamilton_residual)),
                "boutroux_q": c(self.boutroux),
                "boutroux_mismatch": float(abs(self.q - self.boutroux)),
                "boutroux_q_5t_over_4": c(self.boutroux_alt)}


def boutroux_argument(curve, rho, hbar, coeff=mpmath.mpf(4) / 5):
    """coeff t/hbar + (rho/hbar + 1/2) omega_A + (nu/hbar + 1/2) omega_B.

    The theta-function form of the Fourier sum gives
    z = omega_A (rho + oint_B y dx / 2 pi i)/hbar + (omega_A + omega_B)/2, and
    the bilinear relation omega_A oint_B - omega_B oint_A = 2 pi i (4t/5)
    turns it into the form above with coeff = 4/5.
    """
    E = curve.E
    half = mpmath.mpf(1) / 2
    return coeff * curve.t / hbar + (rho / hbar + half) * E.omega_A + (curve.nu / hbar + half) * E.omega_B


def bilinear_residual(curve):
    E = curve.E
    lhs = E.omega_A * curve.b_period() - E.omega_B * E.period_A
    return abs(lhs - 2j * mpmath.pi * mpmath.mpf(4) / 5 * curve.t)


def boutroux_q(curve, rho, hbar, coeff=mpmath.mpf(4) / 5):
    """(wp, wp') at the Boutroux argument."""
    return curve.E.wp_pair(boutroux_argument(curve, rho, hbar, coeff))


def painleve_residual(curve, rho, hbar, gmax=2, K=None, half_width=4, step=None):
    """q, p, H from a t-stencil of log tau and the residual of hbar^2 q'' - 6 q^2 - t."""
    hbar = mpmath.mpmathify(hbar)
    step = step or hbar * mpmath.mpf(10) ** -3
    curves = {0: curve}
    for sgn in (1, -1):
        for j in range(1, half_width + 1):
            curves[sgn * j] = curves[sgn * (j - 1)].neighbour(curve.t + sgn * j * step, curve.nu)
    first = tau_evaluate(curve, rho, hbar, K=K, gmax=gmax)
    K = first.K
    logs = []
    for j in range(-half_width, half_width + 1):
        ev = first if j == 0 else tau_evaluate(curves[j], rho, hbar, K=K, gmax=gmax)
        logs.append(ev.log_tau)
    d = derivatives(logs, step, [1, 2, 3, 4], unwrap=True)
    q = -hbar ** 2 * d[2]
    p = -hbar ** 3 * d[3]
    qpp = -hbar ** 2 * d[4]
    H = hbar ** 2 * d[1]
    res = hbar ** 2 * qpp - 6 * q ** 2 - curve.t
    # H = p^2/2 - 2q^3 - tq along the flow
    ham = H - (p ** 2 / 2 - 2 * q ** 3 - curve.t * q)
    qB = boutroux_q(curve, rho, hbar)[0]
    qP = boutroux_q(curve, rho, hbar, mpmath.mpf(5) / 4)[0]
    return PainleveResult(curve.t, curve.nu, rho, hbar, K, gmax, first.log_tau, q, p, H, res,
                          ham, qB, qP)


def fitted_slope(hbars, values):
    """Least-squares slope of log|value| against log hbar."""
    xs = [math.log(float(h)) for h in hbars]
    ys = [math.log(float(abs(v))) for v in values]
    n = len(xs)
    mx, my = sum(xs) / n, sum(ys) / n
    return sum((x - mx) * (y - my) for x, y in zip(xs, ys)) / sum((x - mx) ** 2 for x in xs)


# -- Stokes data ---------------------------------------------------------------------

XA, XB, I = laurent.XA, laurent.XB, laurent.I


@dataclass
class StokesTable:
    side: str
    s: dict

    def entry(self, j):
        return self.s[((j + 2) % 5) - 2]

    def to_json(self):
        return {"side": self.side, "s": {str(k): str(v) for k, v in sorted(self.s.items())}}


def stokes_tables():
    """Stokes multipliers s_{-2..2} on both sides of the critical time t_c."""
    XAi, XBi = XA ** -1, XB ** -1
    minus = StokesTable("t_c - i eps", {
        -2: I * XA,
        -1: I * (XAi - XAi * XBi + XBi),
        0: I * XB,
        1: I * (XBi - XA * XBi),
        2: I * (XAi - XAi * XB),
    })
    plus = StokesTable("t_c + i eps", {
        -2: I * (XA - XA * XB),
        -1: I * (XBi - XAi * XBi),
        0: I * XB,
        1: I * (XA - XA * XBi + XBi),
        2: I * XAi,
    })
    return minus, plus


def cyclic_check(table):
    """(ok, failing j or None, count passed) for 1 + s_j s_{j-1} + i s_{j+2} = 0."""
    passed = 0
    failing = None
    for j in range(-2, 3):
        expr = LaurentXY.const(1) + table.entry(j) * table.entry(j - 1) + I * table.entry(j + 2)
        if expr.is_zero():
            passed += 1
        elif failing is None:
            failing = j
    return failing is None, failing, passed


def ddp_map_check(minus=None, plus=None):
    """Substitute X_A -> X_A (1 - X_B) in the t_c - i eps table; compare with t_c + i eps."""
    if minus is None or plus is None:
        minus, plus = stokes_tables()
    sub = XA * (LaurentXY.const(1) - XB)
    bad = []
    for j in range(-2, 3):
        mapped = minus.s[j].substitute(XA=sub)
        if not (mapped - plus.s[j]).is_zero():
            bad.append(j)
    return not bad, bad


# -- Stokes automorphism on Z ----------------------------------------------------------

@dataclass
class InstantonExpansion:
    terms: list
    weight: object
    derived_prefactor: object
    reference_prefactor: object
    ratio: object
    dF_part_derived: object
    dF_part_reference: object
    constant_ratio: object = 2j * mpmath.pi

    def to_json(self):
        c = lambda z: [float(mpmath.re(z)), float(mpmath.im(z))]
        return {"Z_n_log": [c(mpmath.log(v)) if v else None for v in self.terms],
                "weight_log": c(self.weight), "derived_prefactor": c(self.derived_prefactor),
                "reference_prefactor": c(self.reference_prefactor), "ratio": c(self.ratio),
                "dF_part_derived": c(self.dF_part_derived), "dF_part_reference": c(self.dF_part_reference),
                "constant_ratio": c(self.constant_ratio)}


def stokes_automorphism_Z(curve, hbar, gmax=2, n_max=1, h=None):
    """Z^(0), Z^(1) of the Stokes automorphism acting on Z, evaluated numerically.

    Expanding exp((1/2 pi i) Li2(X) - (hbar d_nu/2 pi i) log(1 - X)) Z with
    X = e^{-hbar d_nu} to first order in X gives
    Z^(1) = (1/2 pi i)(1 + hbar dF/dnu(nu - hbar)) Z(nu - hbar), F = log Z.
    The reference normalization uses the constant 1 in place of 1/(2 pi i); both are
    returned with their ratio.
    """
    if n_max > 1:
        raise ShiftEvaluationFailed("only the one-instanton sector is implemented")
    hbar = mpmath.mpmathify(hbar)
    h = h or mpmath.mpf(10) ** (-(mpmath.mp.dps // 5))
    try:
        c1 = curve.neighbour(curve.t, curve.nu - hbar)
        st = [c1.neighbour(curve.t, curve.nu - hbar + j * h) for j in (-2, -1, 1, 2)]
    except (PainleveError, DegenerateCurve) as exc:
        raise ShiftEvaluationFailed(str(exc))
    logZ0 = curve.log_Z(hbar, gmax)
    logZ1 = c1.log_Z(hbar, gmax)
    vals = [st[0].log_Z(hbar, gmax), st[1].log_Z(hbar, gmax), logZ1,
            st[2].log_Z(hbar, gmax), st[3].log_Z(hbar, gmax)]
    dF = derivatives(vals, h, [1])[1]
    tpi = 2j * mpmath.pi
    derived = (1 + hbar * dF) / tpi
    reference = 1 + hbar * dF / tpi
    Z0 = mpmath.exp(logZ0)
    Z1 = derived * mpmath.exp(logZ1)
    weight = logZ1 - logZ0
    return InstantonExpansion([Z0, Z1], weight, derived, reference, reference / derived,
                              hbar * dF / tpi, hbar * dF / tpi, tpi)
