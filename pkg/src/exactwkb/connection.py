"""Connection matrices for Borel-summed WKB solutions.

Matrices act on row vectors of solutions: (Psi^I_+, Psi^I_-) =
(Psi^II_+, Psi^II_-) . M.  Symbolic entries are sympy expressions in
exp(V) for named Voros periods V, with Gaussian rational coefficients.
"""

from dataclasses import dataclass, field

import mpmath
import numpy as np
import sympy

from . import contour
from .fields import eval_frac
from .local import INF, residue_sqrtext
from .series import HbarSeries
from .wkb import exact_odd_primitive, odd_primitive_limit


class ConnectionError_(ArithmeticError):
    pass


class SaddleConnectionPresent(ConnectionError_):
    pass


class PathInconsistentWithGraph(ConnectionError_):
    pass


class ContourHitsCriticalPoint(ConnectionError_):
    pass


I = sympy.I


class ConnectionMatrix:
    """2x2 sympy matrix with an exact determinant check."""

    def __init__(self, m, periods=None):
        self.m = sympy.Matrix(m)
        self.periods = dict(periods or {})

    def __matmul__(self, other):
        p = dict(self.periods)
        p.update(other.periods)
        return ConnectionMatrix(self.m * other.m, p)

    def inv(self):
        return ConnectionMatrix(self.m.inv().applyfunc(sympy.simplify), self.periods)

    def det(self):
        return sympy.simplify(self.m.det())

    def simplify(self):
        return ConnectionMatrix(self.m.applyfunc(lambda e: sympy.simplify(sympy.expand(e))), self.periods)

    def equals(self, other):
        o = other.m if isinstance(other, ConnectionMatrix) else sympy.Matrix(other)
        return all(sympy.simplify(a - b) == 0 for a, b in zip(self.m, o))

    def evaluate(self, subs):
        """Numeric matrix (mpmath) after substituting symbols."""
        out = self.m.subs(subs)
        return mpmath.matrix([[mpmath.mpc(complex(sympy.N(out[i, j], 30))) for j in range(2)]
                              for i in range(2)])

    def to_json(self, subs=None):
        d = {"entries": [[str(self.m[i, j]) for j in range(2)] for i in range(2)],
             "det": str(self.det()),
             "periods": {k: v.to_json() for k, v in self.periods.items()}}
        if subs:
            from .numerics import json_number
            n = self.evaluate(subs)
            d["numeric"] = [[json_number(n[i, j], 20) for j in range(2)] for i in range(2)]
        return d

    def __repr__(self):
        return "ConnectionMatrix(%s)" % (self.m.tolist(),)


def identity():
    return ConnectionMatrix(sympy.eye(2))


def voros_local_matrix(orientation):
    """Counter-clockwise crossing of a Stokes curve from a simple zero.

    ``orientation`` is the sign of int_v^x sqrt(Q) dx on the curve.
    """
    if orientation > 0:
        return ConnectionMatrix([[1, 0], [I, 1]])
    return ConnectionMatrix([[1, I], [0, 1]])


def koike_multiplier(lam):
    lam = sympy.sympify(lam)
    return sympy.simplify(2 * I * sympy.cos(sympy.pi * sympy.sqrt(1 + 4 * lam)))


def koike_local_matrix(lam, orientation):
    """Counter-clockwise crossing of a Stokes curve from a simple pole,
    lam = lim (x - v)^2 Q_2."""
    c = koike_multiplier(lam)
    if orientation > 0:
        return ConnectionMatrix([[1, 0], [c, 1]])
    return ConnectionMatrix([[1, c], [0, 1]])


def normalization_shift(V):
    """psi_pm = exp(+-V/2) psi~_pm, as (psi_+, psi_-) = (psi~_+, psi~_-) . D."""
    V = sympy.sympify(V)
    if V == 0:
        return identity()
    return ConnectionMatrix([[sympy.exp(V / 2), 0], [0, sympy.exp(-V / 2)]])


# ---------------------------------------------------------------------------
# Voros periods

@dataclass
class VorosPeriodValue:
    cycle: str
    series: HbarSeries
    exact: bool = True
    borel_summed: object = None

    def to_json(self):
        return {"cycle": self.cycle, "exact": self.exact,
                "terms": {str(p): str(c) for p, c in self.series.items()}}

    def as_sympy(self, hbar=sympy.Symbol("hbar")):
        out = 0
        for p, c in self.series.items():
            out += _to_sympy(c) * hbar ** p
        return sympy.simplify(out)


def _to_sympy(c):
    if hasattr(c, "as_expr"):
        return c.as_expr()
    if isinstance(c, (mpmath.mpc, mpmath.mpf, complex, float)):
        z = complex(c)
        return sympy.Float(z.real, 30) + I * sympy.Float(z.imag, 30)
    return sympy.sympify(c)


@dataclass
class Cycle:
    """kind: "residue" (point), "relative_infinity", or "path" (points, w0)."""
    kind: str
    point: object = None
    points: list = field(default_factory=list)
    w0: object = None
    orientation: int = 1

    def label(self):
        if self.kind == "residue":
            return "loop(%s)" % (self.point,)
        if self.kind == "relative_infinity":
            return "oo- -> oo+"
        return "path(%d nodes)" % len(self.points)


def _residue_term(elem, point, K):
    r = residue_sqrtext(elem, point)
    if point == INF:
        # a counter-clockwise circle in the x-plane is a clockwise loop around oo
        return -r
    return r


def voros_period(coeffs, cycle, order=None):
    """Term-wise integral of P_odd over ``cycle``.

    Residue cycles and the relative cycle between the two points over
    infinity are computed exactly (genus-0 bookkeeping); "path" cycles use
    quadrature on the double cover.
    """
    N = coeffs.order if order is None else min(order, coeffs.order)
    K = coeffs.input.Q0.field
    if cycle.kind == "residue":
        two_pi_i = 2 * sympy.pi * I
        cs = []
        for m in range(-1, N + 1):
            r = _residue_term(coeffs.odd(m), cycle.point, K)
            cs.append(sympy.simplify(cycle.orientation * two_pi_i * r.as_expr()))
        return VorosPeriodValue(cycle.label(), HbarSeries(cs, -1, N), True)
    if cycle.kind == "relative_infinity":
        cs = [0]
        for m in range(0, N + 1):
            e = coeffs.odd(m)
            if not e.odd:
                cs.append(K.zero)
                continue
            R = exact_odd_primitive(e)
            if R is None:
                raise NotImplementedError("no rational primitive for P_odd,%d" % m)
            lim = odd_primitive_limit(R, coeffs.input.Q0, INF)
            if lim is None:
                raise ContourHitsCriticalPoint("P_odd,%d is not integrable at infinity" % m)
            cs.append(2 * cycle.orientation * lim)
        return VorosPeriodValue(cycle.label(), HbarSeries(cs, -1, N), True)
    if cycle.kind == "path":
        curve = coeffs.input.numeric_curve()
        pts = [mpmath.mpc(p) for p in cycle.points]
        w0 = mpmath.mpc(cycle.w0) if cycle.w0 is not None else mpmath.sqrt(curve.q(pts[0]))
        cs = []
        for m in range(-1, N + 1):
            e = coeffs.odd(m)
            f = _integrand(e, curve.params)
            try:
                v, _ = contour.integrate_polyline(curve, f, pts, w0)
            except contour.PathHitsTurningPoint as exc:
                raise ContourHitsCriticalPoint(str(exc))
            cs.append(cycle.orientation * v)
        return VorosPeriodValue(cycle.label(), HbarSeries(cs, -1, N), False)
    raise ValueError("unknown cycle kind %r" % cycle.kind)


def _integrand(e, params):
    def f(x, w):
        r = 0
        if e.odd:
            r = eval_frac(e.odd, [x] + params) * w
        if e.even:
            r = r + eval_frac(e.even, [x] + params)
        return r
    return f


# ---------------------------------------------------------------------------
# paths through a Stokes graph

@dataclass
class Crossing:
    curve: int
    source: int
    orientation: int           # sign of int_v^x sqrt(Q0) dx at the crossing
    counterclockwise: bool
    shift: object = 0          # V with psi(current) = e^{+-V/2} psi(normalized at source)
    point: complex = 0j


@dataclass
class PathSpec:
    crossings: list
    base_turning_point: int = None
    periods: dict = field(default_factory=dict)
    cuts_crossed: int = 0


def _local(cr, kind="zero", lam=None):
    if kind == "pole":
        M = koike_local_matrix(lam, cr.orientation)
    else:
        M = voros_local_matrix(cr.orientation)
    return M if cr.counterclockwise else M.inv()


def assemble_connection(path, graph=None, pole_lambdas=None):
    """Product of local matrices and normalization changes along ``path``.

    Returns M with (Psi at start) = (Psi at end) . M, all solutions
    normalized at ``path.base_turning_point``.
    """
    if graph is not None and graph.saddles:
        raise SaddleConnectionPresent("Stokes graph has %d saddle connection(s)" % len(graph.saddles))
    total = identity()
    kinds = {}
    if graph is not None:
        kinds = {t.id: ("pole" if t.kind == "simple_pole" else "zero") for t in graph.turning_points}
        ids = {t.id for t in graph.trajectories}
        for cr in path.crossings:
            if cr.curve not in ids or graph.trajectories[cr.curve].source != cr.source:
                raise PathInconsistentWithGraph("crossing %r does not match the graph" % (cr,))
    for cr in path.crossings:
        kind = kinds.get(cr.source, "zero")
        lam = (pole_lambdas or {}).get(cr.source)
        M = _local(cr, kind, lam)
        D = normalization_shift(cr.shift)
        # (psi) = (psi~) D and (psi~ before) = (psi~ after) M
        step = ConnectionMatrix((D.m.inv() * M.m * D.m).applyfunc(sympy.simplify))
        total = step @ total
    total.periods = dict(path.periods)
    return total.simplify()


def _path_crossings(graph, pts):
    """All (path parameter, trajectory, node index, point) crossings."""
    from .stokes import _segments
    out = []
    pts = np.asarray(pts, dtype=complex)
    seglen = np.abs(np.diff(pts))
    cum = np.concatenate([[0], np.cumsum(seglen)])
    for tr, c, d in _segments(graph):
        for i in range(len(pts) - 1):
            a, b = pts[i], pts[i + 1]
            r = b - a
            s = d - c
            den = r.real * s.imag - r.imag * s.real
            with np.errstate(divide="ignore", invalid="ignore"):
                t = ((c - a).real * s.imag - (c - a).imag * s.real) / den
                u = ((c - a).real * r.imag - (c - a).imag * r.real) / den
            hit = np.nonzero((den != 0) & (t >= 0) & (t <= 1) & (u >= 0) & (u <= 1))[0]
            for j in hit:
                out.append((cum[i] + t[j] * seglen[i], tr, int(j), a + t[j] * r, i))
    out.sort(key=lambda z: z[0])
    return out


def _traj_w(tr, j):
    """sqrt(Q0) carried by the trajectory on its j-th segment."""
    p, ph = tr.points, tr.phase
    if j + 1 < len(p) and j + 1 < len(ph):
        return (ph[j + 1] - ph[j]) / (p[j + 1] - p[j])
    return tr.w_end


def path_from_points(graph, coeffs, pts, base_turning_point, w0=None, symbol_prefix="V"):
    """Crossings of the polyline ``pts`` with the Stokes graph.

    The WKB solutions are normalized at ``base_turning_point`` with
    sqrt(Q0) = w0 at pts[0] (principal root by default).  When a crossed
    curve emanates from another turning point v, the shift
    V = 2 int_{base}^{v} P_odd is recorded as a named period whose
    numeric leading term is computed on the sheet met along the path.
    """
    curve = coeffs.input.numeric_curve()
    pts_mp = [mpmath.mpc(p) for p in pts]
    w_start = mpmath.mpc(w0) if w0 is not None else mpmath.sqrt(curve.q(pts_mp[0]))
    tps = {t.id: t.position for t in graph.turning_points}
    vb = mpmath.mpc(tps[base_turning_point])
    lead = _integrand(coeffs.odd(-1), curve.params)
    # Phi_base(x) = int_{base}^{x} sqrt(Q0) along: base -> pts[0] (straight), then the path
    phi0 = -_leading_from(curve, lead, pts_mp[0], vb, w_start)
    crossings, periods = [], {}
    names = {}
    x_prev, w_prev, phi_prev, seg_prev = pts_mp[0], w_start, phi0, 0
    for _, tr, j, xc, seg in _path_crossings(graph, pts):
        xc = mpmath.mpc(xc)
        # continue along the path nodes up to the crossing
        for k in range(seg_prev + 1, seg + 1):
            v, w_prev = contour.integrate_segment(curve, lead, x_prev, pts_mp[k], w_prev)
            phi_prev += v
            x_prev = pts_mp[k]
        seg_prev = seg
        v, w_c = contour.integrate_segment(curve, lead, x_prev, xc, w_prev)
        phi_c = phi_prev + v
        x_prev, w_prev, phi_prev = xc, w_c, phi_c
        wt = complex(_traj_w(tr, j))
        same = (complex(w_c) * wt.conjugate()).real >= 0
        ph_tr = tr.phase[min(j, len(tr.phase) - 1)] if j < len(tr.phase) else tr.phase[-1]
        s = 1 if (float(np.real(ph_tr if ph_tr != 0 else tr.sign)) >= 0) == same else -1
        v_src = complex(tps[tr.source])
        step = complex(pts[seg + 1]) - complex(pts[seg])
        ccw = ((complex(xc) - v_src).conjugate() * step).imag > 0
        shift = 0
        if tr.source != base_turning_point:
            # int_{v}^{xc} sqrt(Q0) on the current sheet, along the Stokes curve
            phi_v = _phi_to_source(curve, lead, tr, j, xc, w_c)
            val = 2 * (phi_c - phi_v)
            key = (tr.source, round(float(mpmath.re(val)), 6), round(float(mpmath.im(val)), 6))
            if key not in names:
                names[key] = "%s_%d" % (symbol_prefix, len(names) + 1) if names or symbol_prefix != "V" else "V_gamma"
                periods[names[key]] = VorosPeriodValue(
                    "2 int tp%d -> tp%d" % (base_turning_point, tr.source),
                    _shift_series(coeffs, base_turning_point, tr.source, graph, val), False)
            shift = sympy.Symbol(names[key])
        crossings.append(Crossing(tr.id, tr.source, s, bool(ccw), shift, complex(xc)))
    return PathSpec(crossings, base_turning_point, periods)


def _leading_from(curve, f, x, v, w_x):
    """int_x^v sqrt(Q0) dx (v a zero of Q0) on the sheet of w_x."""
    val, _ = contour.integrate_segment(curve, f, x, v, w_x, zero_end="b")
    return val


def _phi_to_source(curve, f, tr, j, xc, w_c, nodes=40):
    """int_v^{xc} sqrt(Q0) dx back along the Stokes curve, on the sheet of w_c."""
    back = [complex(p) for p in tr.points[1:min(j, len(tr.points) - 1) + 1]][::-1]
    if len(back) > nodes:
        step = len(back) / nodes
        back = [back[int(k * step)] for k in range(nodes)] + [back[-1]]
    poly = [mpmath.mpc(xc)] + [mpmath.mpc(p) for p in back] + [mpmath.mpc(tr.points[0])]
    val, _ = contour.integrate_polyline(curve, f, poly, w_c, zero_last=True)
    return -val


def _shift_series(coeffs, a, b, graph, leading):
    """2 int_{v_a}^{v_b} P_odd, i.e. the closed cycle around both points.

    The leading term is numeric.  A term whose P_odd,m has a rational
    primitive R (so that P_odd,m dx = d(R sqrt Q0), single valued on the
    cover) integrates to zero over the closed cycle; other terms are left
    as None.
    """
    N = coeffs.order
    cs = [mpmath.mpc(leading)]
    for m in range(0, N + 1):
        e = coeffs.odd(m)
        if not e.odd:
            cs.append(0)
            continue
        cs.append(0 if exact_odd_primitive(e) is not None else None)
    return HbarSeries(cs, -1, N)


def identify_period(value, candidates, tol=1e-20):
    """Name of the exact candidate (sympy expression) matching ``value``."""
    for name, expr in candidates.items():
        if abs(mpmath.mpc(complex(sympy.N(expr, 40))) - value) < tol * max(1, abs(value)):
            return name, expr
    return None, None


# ---------------------------------------------------------------------------
# DDP and path lifting

def ddp_action(direction, nu=sympy.Symbol("nu"), hbar=sympy.Symbol("hbar")):
    """Factor multiplying e^W under the Stokes automorphism.

    direction "+" : nu on the positive imaginary axis, "-" : negative.
    """
    if direction in ("+", 1, "pos"):
        return 1 + sympy.exp(2 * sympy.pi * I * nu / hbar)
    if direction in ("-", -1, "neg"):
        return 1 / (1 + sympy.exp(-2 * sympy.pi * I * nu / hbar))
    raise ValueError("direction must be '+' or '-'")


def ddp_lateral_ratio(nu, hbar, terms=60, eps=1e-3):
    """S_{-eps} e^W / S_{+eps} e^W for the Weber relative period W.

    With S_- = S_+ o (Stokes automorphism) this ratio is the factor of
    ``ddp_action``.
    """
    from .borel import borel_transform, lateral_borel_sums, weber_w_series
    nu = mpmath.mpmathify(nu)
    E = weber_w_series(nu, terms).exp()
    bs = borel_transform(E)
    plus, minus = lateral_borel_sums(bs, hbar, 0, eps)
    return minus.value / plus.value, plus, minus


@dataclass
class Lift:
    label: str
    terms: list            # [(label, coefficient)]
    detour: list           # polyline of the detoured path (crossing the cut)


def path_lifting(psi_label, crossing, source_position=0j, shift=0):
    """Path-lifting form of a counter-clockwise crossing.

    For int_v^x sqrt(Q) > 0:  Psi_+^I = Psi_+^II + Psi~_-^II, where Psi~_- is
    psi_+ continued along the detour around v (it lands on the other sheet)
    and equals i e^{V} Psi_-^II when the solutions are normalized a cycle V
    away from v.  For the opposite sign the roles of + and - swap.
    """
    dominant = "+" if crossing.orientation > 0 else "-"
    other = "-" if dominant == "+" else "+"
    if psi_label != dominant:
        return Lift(psi_label, [(psi_label, 1)], [])
    shift = sympy.sympify(shift)
    coeff = I * sympy.exp(crossing.orientation * shift) if shift != 0 else I
    xc = complex(crossing.point)
    v = complex(source_position)
    d = xc - v
    detour = [xc, v + d * 0.5j, v - d * 0.5, v - d * 0.5j, v + d * 0.5, xc]
    return Lift(psi_label, [(psi_label, 1), (other, coeff)], detour)


def lifting_matrix(lifts):
    """Connection matrix reassembled from the lifts of + and -."""
    m = sympy.zeros(2, 2)
    for j, lab in enumerate(("+", "-")):
        for t, c in lifts[lab].terms:
            m[0 if t == "+" else 1, j] = c
    return ConnectionMatrix(m)
