"""The acceptance suite: twelve end-to-end checks, each with a time budget.

Every check returns a Result; ``run_all`` is what ``verify`` prints.
"""

import time
from dataclasses import dataclass, field

import mpmath
import sympy

from .numerics import precision


@dataclass
class Result:
    number: int
    name: str
    ok: bool
    seconds: float
    budget: float
    details: dict = field(default_factory=dict)

    @property
    def passed(self):
        return self.ok and self.seconds <= self.budget

    def line(self):
        return "%s %2d %s (%.2fs, budget %gs)" % ("PASS" if self.passed else "FAIL", self.number,
                                                 self.name, self.seconds, self.budget)

    def to_json(self):
        return {"criterion": self.number, "name": self.name, "pass": self.passed,
                "seconds": round(self.seconds, 3), "budget": self.budget,
                "details": {k: str(v) for k, v in self.details.items()}}


def _timed(number, name, budget):
    def wrap(fn):
        def run():
            t0 = time.perf_counter()
            ok, details = fn()
            return Result(number, name, bool(ok), time.perf_counter() - t0, budget, details)
        run.number = number
        run.__name__ = fn.__name__
        run.__doc__ = fn.__doc__
        return run
    return wrap


@_timed(1, "Airy WKB coefficients exact", 1)
def airy_wkb():
    from .wkb import Normalization, SchrodingerInput, wkb_log_series, wkb_recursion
    x = sympy.Symbol("x")
    c = wkb_recursion(SchrodingerInput.from_strings("x"), 3)
    p0 = c.p(0)
    ok = sympy.simplify(p0.even.as_expr() + 1 / (4 * x)) == 0 and not p0.odd
    # P_1 = odd * sqrt(x): -+5/(32 x^{5/2}) needs odd = -+5/(32 x^3)
    for s in (1, -1):
        e = c.p(1, s)
        ok &= not e.even and sympy.simplify(e.odd.as_expr() + s * sympy.Rational(5, 32) / x ** 3) == 0
    xs = sympy.Symbol("x", positive=True)
    amps = {}
    for s in (1, -1):
        am = wkb_log_series(c, Normalization("infinity", 0), sign=s).amplitude()
        a1 = sympy.simplify(am._get(1) * xs ** sympy.Rational(3, 2))
        a2 = sympy.simplify(am._get(2) * xs ** 3)
        amps[s] = (a1, a2)
        ok &= a1 == s * sympy.Rational(5, 48) and a2 == sympy.Rational(385, 4608)
    return ok, {"P0": p0.even.as_expr(), "amplitude_plus": amps[1], "amplitude_minus": amps[-1]}


@_timed(2, "Weber relative periods are Bernoulli terms", 10)
def weber_periods():
    from .connection import Cycle, voros_period
    from .wkb import SchrodingerInput, wkb_recursion
    nu = sympy.Symbol("nu")
    c = wkb_recursion(SchrodingerInput.from_strings("x**2/4-nu", ("nu",)), 11)
    V = voros_period(c, Cycle("relative_infinity"))
    ok = True
    bad = []
    for m in range(0, 12):
        got = V.series._get(m)
        got = sympy.sympify(got.as_expr() if hasattr(got, "as_expr") else got)
        if m % 2:
            k = (m + 1) // 2
            want = (sympy.Integer(2) ** (1 - 2 * k) - 1) * sympy.bernoulli(2 * k) / (2 * k * (2 * k - 1) * nu ** (2 * k - 1))
        else:
            want = 0
        if sympy.simplify(got - want) != 0:
            ok = False
            bad.append(m)
    return ok, {"mismatched_orders": bad}


@_timed(3, "Borel oracles", 30)
def borel_oracles():
    from .borel import (airy_psi_borel, binet_exp_w, borel_transform, lateral_borel_sums,
                        pade_borel_sum, scan_borel_singularities, weber_w_series)
    from .wkb import SchrodingerInput, wkb_recursion
    d = {}
    with precision(256):
        W = weber_w_series(1, 60)
        r = pade_borel_sum(borel_transform(W.exp()), mpmath.mpf("0.1"))
        rel = abs(r.value / binet_exp_w(1, mpmath.mpf("0.1")) - 1)
        d["weber_binet_rel"] = mpmath.nstr(rel, 3)
        ok = rel < 1e-8
        sc = scan_borel_singularities(borel_transform(W))
        two_pi = 2 * mpmath.pi
        for k in (1, 2):
            hit = min(abs(z - 1j * two_pi * k) for z in sc.singularities) / (two_pi * k)
            ok &= hit < 0.01
        d["weber_singularities"] = [mpmath.nstr(z, 6) for z in sc.singularities[:4]]
        c = wkb_recursion(SchrodingerInput.from_strings("x"), 40)
        S = mpmath.mpf(2) / 3
        hb = mpmath.mpf("0.05")
        h = mpmath.mpf("1e-3")
        for sgn in (1, -1):
            scan = scan_borel_singularities(airy_psi_borel(1, sgn, coeffs=c))
            near = scan.nearest()
            ok &= abs(near - sgn * S) / S < 0.01
            d["airy_nearest_%+d" % sgn] = mpmath.nstr(near, 6)
        for sgn, side in ((-1, None), (1, 1), (1, -1)):
            vals = []
            for k in (-2, -1, 0, 1, 2):
                b = airy_psi_borel(1 + k * h, sgn, coeffs=c)
                if side is None:
                    vals.append(pade_borel_sum(b, hb).value)
                else:
                    lp, lm = lateral_borel_sums(b, hb)
                    vals.append((lp if side > 0 else lm).value)
            d2 = (-vals[0] + 16 * vals[1] - 30 * vals[2] + 16 * vals[3] - vals[4]) / (12 * h * h)
            res = abs(hb ** 2 * d2 - vals[2]) / abs(vals[2])
            d["airy_ode_residual_%+d_%s" % (sgn, side)] = mpmath.nstr(res, 3)
            ok &= res < 1e-6
    return ok, d


GALLERY = [
    ("x", False), ("x**3+x", False), ("(x-1)*(x-2)/(x**2*(x+1)**2)", False),
    ("(x+1)/x", False), ("x**3-x", True), ("(x-2)/x**2", True),
]


@_timed(4, "Stokes graph topologies", 30)
def stokes_topologies():
    from .stokes import QuadraticDifferential, trace_stokes_graph
    ok = True
    d = {}
    cases = [(e, {}, s) for e, s in GALLERY]
    cases += [("x**2/4-nu", {"nu": 1}, False), ("x**2/4-nu", {"nu": 1j}, True),
              ("x**2/4-nu", {"nu": -1j}, True)]
    for expr, params, saddle in cases:
        g = trace_stokes_graph(QuadraticDifferential.from_string(expr, params))
        want = sum(3 if tp.kind == "simple_zero" else 1 for tp in g.turning_points)
        per_tp = all(sum(1 for tr in g.trajectories if tr.source == tp.id)
                     == (3 if tp.kind == "simple_zero" else 1) for tp in g.turning_points)
        good = per_tp and len(g.trajectories) == want and bool(g.saddles) == saddle
        ok &= good
        d["%s %s" % (expr, params or "")] = "%d curves, saddle=%s" % (len(g.trajectories), bool(g.saddles))
    return ok, d


@_timed(5, "Weber connection matrix I to III", 5)
def weber_connection():
    from .connection import assemble_connection, path_from_points
    from .stokes import QuadraticDifferential, trace_stokes_graph
    from .wkb import SchrodingerInput, wkb_recursion
    with precision(128):
        c = wkb_recursion(SchrodingerInput.from_strings("x**2/4-nu", ("nu",), {"nu": 1}), 6)
        g = trace_stokes_graph(QuadraticDifferential.from_string("x**2/4-nu", {"nu": 1}))
        base = [tp.id for tp in g.turning_points if tp.position.real > 0][0]
        path = path_from_points(g, c, [6 + 6j, -6 + 6j], base)
        M = assemble_connection(path, g)
    Vg = sympy.Symbol("V_gamma")
    ok = M.equals([[1, sympy.I * (1 + sympy.exp(-Vg))], [0, 1]]) and sympy.simplify(M.det() - 1) == 0
    return ok, {"matrix": M, "det": M.det()}


@_timed(6, "Koike multiplier at lambda = -1/4", 1)
def koike():
    from .connection import koike_multiplier
    v = koike_multiplier(sympy.Rational(-1, 4))
    return sympy.simplify(v - 2 * sympy.I) == 0, {"value": v}


@_timed(7, "TR free energies and Airy wave function", 60)
def tr_checks():
    from fractions import Fraction
    from .tr import airy_wave_check, weber_free_energies
    F = weber_free_energies(5)
    ok = True
    for g in range(2, 6):
        B = sympy.bernoulli(2 * g)
        want = Fraction(int(B.p), int(B.q)) / (2 * g * (2 * g - 2))
        ok &= F[g] == want
    a = airy_wave_check(2)
    ok &= a["series"][1] == Fraction(5, 48) and a["series"][2] == Fraction(385, 4608)
    return ok, {"weber_F": {g: str(F[g]) for g in range(2, 6)}, "airy_series": a["series"]}


def _pi_curve():
    from .painleve1 import solve_u
    return solve_u(-5, 1)


@_timed(8, "Painleve I curve identities at (t, nu) = (-5, 1)", 60)
def pi_geometry():
    from .painleve1 import partition_function
    with mpmath.workdps(30):
        pd = partition_function(-5, 1, gmax=2, curve=_pi_curve())
        chk = pd.checks()
    return all(v < 1e-8 for v in chk.values()), {k: mpmath.nstr(v, 3) for k, v in chk.items()}


SAMPLE_X = [3, 2 + 1j, -4 + 2j, 5j, 6 - 1j]


@_timed(9, "Quantum curve residual order by order", 120)
def quantum_curve():
    from .painleve1 import a_cycle_shift, quantum_curve_residual
    with mpmath.workdps(40):
        c = _pi_curve()
        r = quantum_curve_residual(c, SAMPLE_X, order=4)
        worst = max(abs(v) for vals in r.values() for v in vals)
        shift = a_cycle_shift(c, 3)
        mono = abs(shift[0] - 2j * mpmath.pi * c.nu) + sum(abs(s) for s in shift[1:])
    return worst < 1e-6 and mono < 1e-10, {"max_residual": mpmath.nstr(worst, 3),
                                           "a_shift_defect": mpmath.nstr(mono, 3)}


HBARS = ("0.1", "0.05", "0.025")


@_timed(10, "tau function solves Painleve I", 600)
def tau_residual():
    from .painleve1 import centred_rho, fitted_slope, painleve_residual
    d = {}
    with mpmath.workdps(40):
        c = _pi_curve()
        rho = centred_rho(c, mpmath.mpf("0.1"))
        res, mis = [], []
        for hb in HBARS:
            r = painleve_residual(c, rho, mpmath.mpf(hb), gmax=2)
            res.append(r.residual)
            mis.append(abs(r.q - r.boutroux))
            d["hbar=%s" % hb] = "residual %s, q %s, boutroux %s" % (
                mpmath.nstr(abs(r.residual), 3), mpmath.nstr(r.q.real, 8), mpmath.nstr(r.boutroux.real, 8))
        slope = fitted_slope([float(h) for h in HBARS], res)
        # O(hbar): mismatch / hbar stays bounded and does not grow as hbar shrinks
        ratios = [m / mpmath.mpf(h) for m, h in zip(mis, HBARS)]
        ok = slope >= 2 and ratios[-1] <= ratios[0] * 1.5 and ratios[0] < 1
    d["slope"] = round(slope, 3)
    d["boutroux_mismatch_over_hbar"] = [mpmath.nstr(v, 3) for v in ratios]
    return ok, d


@_timed(11, "Stokes tables: cyclic relation and DDP map", 1)
def stokes_tables_check():
    from .painleve1 import cyclic_check, ddp_map_check, stokes_tables
    m, p = stokes_tables()
    a, b = cyclic_check(m), cyclic_check(p)
    ddp = ddp_map_check(m, p)
    return a[0] and b[0] and ddp[0], {"cyclic": "%d/10" % (a[2] + b[2]), "ddp_failing": ddp[1]}


@_timed(12, "Stokes automorphism on Z: instanton grading", 60)
def instanton():
    from .painleve1 import stokes_automorphism_Z
    d = {}
    ok = True
    with mpmath.workdps(30):
        c = _pi_curve()
        B = c.b_period()
        rest = []
        for hb in ("0.1", "0.05"):
            hb = mpmath.mpf(hb)
            ie = stokes_automorphism_Z(c, hb)
            ok &= abs(ie.terms[0] / mpmath.exp(c.log_Z(hb, 2)) - 1) < mpmath.eps * 1e6
            # the exponent of Z^(1)/Z beyond -B/hbar stays O(1) as hbar -> 0
            rest.append(ie.weight + B / hb)
            ok &= ie.dF_part_derived == ie.dF_part_reference
            d["prefactor_ratio hbar=%s" % hb] = mpmath.nstr(ie.ratio, 8)
        ok &= abs(rest[0] - rest[1]) < 0.1 * abs(B) / mpmath.mpf("0.05")
        ok &= abs(rest[1] - c.E.tau * mpmath.pi * 1j) < 0.1
        d["constant_ratio"] = mpmath.nstr(ie.constant_ratio, 8)
        d["weight_remainder"] = [mpmath.nstr(v, 6) for v in rest]
    return ok, d


ALL = [airy_wkb, weber_periods, borel_oracles, stokes_topologies, weber_connection, koike,
       tr_checks, pi_geometry, quantum_curve, tau_residual, stokes_tables_check, instanton]


def run_all(only=None, out=print):
    results = []
    for fn in ALL:
        if only and fn.number not in only:
            continue
        try:
            r = fn()
        except Exception as exc:  # a crash is a failed criterion
            r = Result(fn.number, fn.__name__, False, 0.0, 0, {"error": repr(exc)})
        results.append(r)
        if out:
            out(r.line())
    return results
