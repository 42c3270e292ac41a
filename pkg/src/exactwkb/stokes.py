"""Stokes graphs of phi = Q0(x) dx^2.

A trajectory is integrated in arc length with the state (x, w, Phi), where
w^2 = Q0(x) is carried along (so the branch of the square root is never
re-chosen) and Phi = int w dx is the accumulated phase:

    dx/dl = lam * conj(w)/|w|,   dw/dl = Q0'(x)/(2 w) dx/dl,   dPhi/dl = w dx/dl.

``lam`` = +-1 for Stokes curves (Phi real) and +-i for the orthogonal
(vertical) foliation.  A small feedback term keeps Im(Phi/lam) at zero.
"""

import cmath
import math
from dataclasses import dataclass, field

import mpmath
import numpy as np
from scipy.integrate import solve_ivp

from .fields import ParamField, eval_frac
from .local import _x_coeff_list


class StokesError(ArithmeticError):
    pass


class RootIsolationFailure(StokesError):
    pass


class StepCollapse(StokesError):
    pass


class BranchTrackingLost(StokesError):
    pass


class AmbiguousTerminus(StokesError):
    pass


class OnStokesCurve(StokesError):
    pass


# ---------------------------------------------------------------------------
# the differential

class QuadraticDifferential:
    """Q0 dx^2 with every parameter bound to a number."""

    def __init__(self, Q0, param_values=(), pf=None):
        self.Q0 = Q0
        self.params = [complex(v) for v in param_values]
        K = Q0.field
        self._num = self._numeric_poly(Q0.numer, K)
        self._den = self._numeric_poly(Q0.denom, K)
        self._dnum = np.polyder(self._num) if len(self._num) > 1 else np.array([0j])
        self._dden = np.polyder(self._den) if len(self._den) > 1 else np.array([0j])
        if not np.any(self._num):
            raise StokesError("Q0 vanishes identically")

    @classmethod
    def from_string(cls, expr, params=None):
        params = dict(params or {})
        pf = ParamField(tuple(params))
        return cls(pf(expr), [params[p] for p in pf.params], pf)

    def _numeric_poly(self, poly, K):
        coeffs = _x_coeff_list(poly, K)
        vals = [complex(eval_frac(c, [0] + self.params)) if c else 0j for c in coeffs]
        return np.array(list(reversed(vals)), dtype=complex)   # numpy: highest first

    def q(self, x):
        return np.polyval(self._num, x) / np.polyval(self._den, x)

    def dq(self, x):
        n, d = np.polyval(self._num, x), np.polyval(self._den, x)
        return (np.polyval(self._dnum, x) * d - n * np.polyval(self._dden, x)) / (d * d)

    @property
    def order_at_infinity(self):
        """Pole order of phi at infinity (w = 1/x)."""
        return (len(self._num) - 1) - (len(self._den) - 1) + 4

    def assumption_flags(self):
        crit = find_critical_points(self)
        multiple = any(o >= 2 for p, o in crit if p != "oo")
        return {"all_zeros_simple": not multiple,
                "pole_at_infinity_order_ge_2": self.order_at_infinity >= 2}


def _cluster_roots(coeffs, tol=1e-7):
    c = np.trim_zeros(coeffs, "f")
    if len(c) <= 1:
        return []
    roots = np.roots(c)
    if not np.all(np.isfinite(roots)):
        raise RootIsolationFailure("non-finite roots")
    out = []
    for r in roots:
        for item in out:
            if abs(item[0] - r) < tol * max(1.0, abs(r)) ** 1 + 1e-5 * max(1.0, abs(r)):
                item[1] += 1
                item[2].append(r)
                break
        else:
            out.append([r, 1, [r]])
    res = []
    for r, m, members in out:
        centre = complex(np.mean(members))
        if m > 1:
            # polish the multiple root on the (m-1)-th derivative
            d = np.polyder(c, m - 1)
            for _ in range(20):
                f, fp = np.polyval(d, centre), np.polyval(np.polyder(d), centre)
                if fp == 0:
                    break
                centre -= f / fp
        res.append((centre, m))
    return res


def find_critical_points(qd):
    """[(point, order)]: order > 0 zero, order < 0 pole; "oo" for infinity."""
    zeros = _cluster_roots(qd._num)
    poles = _cluster_roots(qd._den)
    out = [(z, m) for z, m in zeros] + [(p, -m) for p, m in poles]
    out.sort(key=lambda t: (round(t[0].real, 9), round(t[0].imag, 9)))
    out.append(("oo", -qd.order_at_infinity))
    return out


# ---------------------------------------------------------------------------
# graph types

@dataclass
class TurningPoint:
    id: int
    position: complex
    kind: str                      # "simple_zero" | "simple_pole"
    directions: list


@dataclass
class Trajectory:
    id: int
    source: int                    # turning point id
    points: np.ndarray
    phase: np.ndarray              # accumulated int sqrt(Q0) dx at each node
    terminus: tuple                # ("turning_point", id) | ("pole", id) | ("escaped", k) | ("max_length",)
    sign: float = 1.0
    w_end: complex = 0j

    def to_json(self, digits=12):
        return {"id": self.id, "source": self.source,
                "terminus": list(self.terminus),
                "points": [[round(p.real, digits), round(p.imag, digits)] for p in self.points],
                "max_abs_im_phase": float(np.max(np.abs(self.phase.imag)))}


@dataclass
class Saddle:
    endpoints: tuple
    trajectories: list
    integral: complex              # int_{v1}^{v2} sqrt(Q0) dx along the connection
    seen_from: set = field(default_factory=set)

    @property
    def period(self):
        """Period of sqrt(Q0) dx over the closed cycle around the connection."""
        return 2 * self.integral


@dataclass
class StokesGraph:
    qd: QuadraticDifferential
    turning_points: list
    poles: list                    # [(id, position, order)]
    trajectories: list
    radius: float
    options: dict
    saddles: list = field(default_factory=list)
    warnings: list = field(default_factory=list)

    def asymptotic_directions(self):
        return _asymptotic_directions(self.qd)

    def to_json(self):
        return {
            "turning_points": [{"id": t.id, "position": [t.position.real, t.position.imag],
                                "kind": t.kind, "directions": list(t.directions)}
                               for t in self.turning_points],
            "poles": [{"id": i, "position": [p.real, p.imag], "order": o} for i, p, o in self.poles],
            "order_at_infinity": self.qd.order_at_infinity,
            "trajectories": [t.to_json() for t in self.trajectories],
            "saddles": [{"endpoints": list(s.endpoints), "trajectories": s.trajectories,
                         "integral": [s.integral.real, s.integral.imag]} for s in self.saddles],
            "regions": region_census(self),
            "radius": self.radius,
            "warnings": list(self.warnings),
        }


# ---------------------------------------------------------------------------
# tracing

DEFAULTS = {"tolerance": 1e-10, "saddle_tolerance": 1e-6, "max_length": None,
            "bounding_radius": None, "step": None}


def _asymptotic_directions(qd):
    """Angles at which horizontal trajectories reach infinity (pole order r >= 3)."""
    r = qd.order_at_infinity
    if r < 3:
        return []
    n = r - 2
    lead = qd._num[np.flatnonzero(qd._num)[0]] / qd._den[np.flatnonzero(qd._den)[0]]
    # int sqrt(Q0) ~ (2/n) sqrt(c) x^{n/2}: real when (n/2) th + arg sqrt(c) = k pi
    a = cmath.phase(cmath.sqrt(lead))
    return sorted(((2.0 / n) * (k * math.pi - a)) % (2 * math.pi) for k in range(n))


def _rhs_factory(qd, lam, gain):
    def rhs(s, y):
        x = complex(y[0], y[1])
        wc = complex(y[2], y[3])
        # the carried root only labels the branch; use the exact root nearest to it
        w = cmath.sqrt(qd.q(x))
        if (w * wc.conjugate()).real < 0:
            w = -w
        ph = complex(y[4], y[5])
        aw = abs(w)
        if aw == 0:
            return np.zeros(6)
        # steer so that Im(Phi / lam) relaxes to zero
        err = (ph / lam).imag
        d = lam * (1 - 1j * gain * err)
        d = d / abs(d)
        dx = d * w.conjugate() / aw
        dw = qd.dq(x) / (2 * w) * dx
        dph = w * dx
        return np.array([dx.real, dx.imag, dw.real, dw.imag, dph.real, dph.imag])
    return rhs


def _integrate(qd, x0, w0, ph0, lam, stops, radius, max_length, rtol, first_step=None):
    """Integrate one leaf; ``stops`` is [(position, label)] of absorbing points."""
    rhs = _rhs_factory(qd, lam, gain=1.0 / max(radius, 1.0))
    events = []

    def esc(s, y):
        return math.hypot(y[0], y[1]) - radius
    esc.terminal = True
    events.append(esc)
    stop_pts = []
    for pos, label, rr in stops:
        def ev(s, y, pos=pos, rr=rr):
            return abs(complex(y[0], y[1]) - pos) - rr
        ev.terminal = True
        ev.direction = -1
        events.append(ev)
        stop_pts.append(label)
    y0 = np.array([x0.real, x0.imag, w0.real, w0.imag, ph0.real, ph0.imag])
    sol = solve_ivp(rhs, (0.0, max_length), y0, method="RK45", rtol=rtol, atol=rtol * 1e-2,
                    events=events, dense_output=False, max_step=radius / 50.0,
                    first_step=first_step)
    if sol.status == -1:
        raise StepCollapse(sol.message)
    ys = sol.y
    pts = ys[0] + 1j * ys[1]
    ws = ys[2] + 1j * ys[3]
    phs = ys[4] + 1j * ys[5]
    term = ("max_length",)
    if sol.status == 1:
        if len(sol.t_events[0]):
            term = ("escaped", None)
        else:
            for k, label in enumerate(stop_pts):
                if len(sol.t_events[k + 1]):
                    term = label
                    break
    # drift of the carried square root
    q_end = qd.q(pts[-1])
    if abs(ws[-1] ** 2 - q_end) > 0.25 * abs(q_end):
        raise BranchTrackingLost("carried sqrt drifted off Q0")
    w_end = cmath.sqrt(q_end)
    if (w_end * ws[-1].conjugate()).real < 0:
        w_end = -w_end
    ws[-1] = w_end
    return pts, ws, phs, term


def _classify_escape(qd, x, dirs):
    if not dirs:
        return "oo"
    a = cmath.phase(x) % (2 * math.pi)
    best = min(range(len(dirs)), key=lambda k: min(abs(a - dirs[k]), 2 * math.pi - abs(a - dirs[k])))
    return best


def trace_stokes_graph(qd, tolerance=1e-10, max_length=None, bounding_radius=None,
                       saddle_tolerance=1e-6, step=None):
    crit = find_critical_points(qd)
    finite = [(p, o) for p, o in crit if p != "oo"]
    scale = max([abs(p) for p, _ in finite] + [1.0])
    radius = bounding_radius or 4.0 * scale
    if max_length is None:
        max_length = 40.0 * radius
    tps, poles = [], []
    for p, o in finite:
        if o == 1:
            tps.append(("simple_zero", p))
        elif o == -1:
            tps.append(("simple_pole", p))
        elif o < -1:
            poles.append((p, -o))
    warnings = []
    if any(o > 1 for _, o in finite):
        warnings.append("Q0 has a multiple zero; Assumption on simple zeros fails")
    turning = []
    for i, (kind, p) in enumerate(tps):
        c = qd.dq(p) if kind == "simple_zero" else _simple_pole_coeff(qd, p)
        if kind == "simple_zero":
            dirs = [(2.0 / 3.0) * (k * math.pi - cmath.phase(c) / 2) for k in range(3)]
        else:
            dirs = [-cmath.phase(c)]
        turning.append(TurningPoint(i, complex(p), kind, [d % (2 * math.pi) for d in dirs]))
    pole_list = [(j, complex(p), o) for j, (p, o) in enumerate(poles)]
    all_pts = [t.position for t in turning] + [p for _, p, _ in pole_list]
    sep = min([abs(a - b) for i, a in enumerate(all_pts) for b in all_pts[i + 1:]] + [scale])
    r_stop = 2e-3 * sep
    eps = 1e-4 * sep
    dirs_inf = _asymptotic_directions(qd)
    rtol = max(tolerance, 1e-13)
    if step is not None:
        rtol = rtol * step
    trajs = []
    for tp in turning:
        v = tp.position
        for th in tp.directions:
            z = eps * cmath.exp(1j * th)
            if tp.kind == "simple_zero":
                c = qd.dq(v)
                w0 = cmath.sqrt(c) * cmath.sqrt(eps) * cmath.exp(1j * th / 2)
                ph0 = (2.0 / 3.0) * w0 * z
            else:
                c = _simple_pole_coeff(qd, v)
                w0 = cmath.sqrt(c) / (cmath.sqrt(eps) * cmath.exp(1j * th / 2))
                ph0 = 2 * w0 * z
            lam = 1.0 if ph0.real >= 0 else -1.0
            ph0 = complex(ph0.real, 0.0)
            stops = [(t.position, ("turning_point", t.id), r_stop)
                     for t in turning if t.id != tp.id]
            stops += [(p, ("pole", j), r_stop) for j, p, _ in pole_list]
            # returning to the source itself (self-loops around double poles)
            stops.append((v, ("turning_point", tp.id), r_stop * 0.5))
            pts, ws, phs, term = _integrate(qd, v + z, w0, ph0, lam, stops, radius,
                                            max_length, rtol)
            if term[0] == "turning_point" and term[1] == tp.id and abs(pts[-1] - v) > r_stop:
                term = ("max_length",)
            if term[0] == "escaped":
                term = ("escaped", _classify_escape(qd, pts[-1], dirs_inf))
            if term[0] == "max_length":
                warnings.append("trajectory %d reached max_length (possibly recurrent)" % len(trajs))
            pts = np.concatenate([[v], pts])
            phs = np.concatenate([[0j], phs])
            trajs.append(Trajectory(len(trajs), tp.id, pts, phs, term, lam, complex(ws[-1])))
    graph = StokesGraph(qd, turning, pole_list, trajs, radius,
                        {"tolerance": tolerance, "saddle_tolerance": saddle_tolerance,
                         "max_length": max_length, "bounding_radius": radius,
                         "r_stop": r_stop}, [], warnings)
    graph.saddles = detect_saddle_connections(graph, saddle_tolerance)
    return graph


def _simple_pole_coeff(qd, p):
    """c with Q0 ~ c/(x - p)."""
    n = np.polyval(qd._num, p)
    dd = np.polyval(qd._dden, p)
    return n / dd


def _closing_integral(qd, x_end, w_end, v):
    """int_{x_end}^{v} sqrt(Q0) dx for a short straight segment to a zero."""
    n = 40
    xs, wts = np.polynomial.legendre.leggauss(n)
    # substitution x = v + (x_end - v) u^2 removes the sqrt singularity at v
    d = x_end - v
    total = 0j
    for s, wt in zip(xs, wts):
        u = (s + 1) / 2
        x = v + d * u * u
        r = cmath.sqrt(qd.q(x))
        guess = w_end * u
        if (r * guess.conjugate()).real < 0:
            r = -r
        total += wt / 2 * r * 2 * u * d
    return -total


def detect_saddle_connections(graph, tol=1e-6):
    qd = graph.qd
    found = []
    for tr in graph.trajectories:
        if tr.terminus[0] != "turning_point":
            continue
        j = tr.terminus[1]
        v1 = graph.turning_points[tr.source]
        v2 = graph.turning_points[j]
        w_end = tr.w_end
        if v2.kind == "simple_zero":
            tail = _closing_integral(qd, tr.points[-1], w_end, v2.position)
        else:
            tail = 0j
        integral = tr.phase[-1] + tail
        if abs(integral.imag) >= tol * max(1.0, abs(integral)):
            continue
        key = frozenset((v1.id, v2.id))
        for s in found:
            if frozenset(s.endpoints) == key and abs(abs(s.integral) - abs(integral)) < 1e-4 * max(1, abs(integral)):
                s.trajectories.append(tr.id)
                s.seen_from.add(v1.id)
                break
        else:
            found.append(Saddle((v1.id, v2.id), [tr.id], complex(integral), {v1.id}))
    return found


# ---------------------------------------------------------------------------
# regions

def _segments(graph):
    segs = []
    for tr in graph.trajectories:
        p = tr.points
        if tr.terminus[0] == "escaped" and len(p) > 2:
            # continue escaped curves along their final tangent
            d = p[-1] - p[-2]
            p = np.concatenate([p, [p[-1] + d / abs(d) * 1e6 * graph.radius]])
        segs.append((tr, p[:-1], p[1:]))
    return segs


def _first_hit(path, graph):
    """First (index along path, trajectory) where ``path`` crosses a Stokes curve."""
    a = path[:-1]
    b = path[1:]
    best = None
    for tr, c, d in _segments(graph):
        # vectorised segment intersection of every (a_i b_i) with every (c_j d_j)
        A = a[:, None]
        B = b[:, None]
        C = c[None, :]
        D = d[None, :]
        r = B - A
        s = D - C
        den = (r.real * s.imag - r.imag * s.real)
        with np.errstate(divide="ignore", invalid="ignore"):
            t = ((C - A).real * s.imag - (C - A).imag * s.real) / den
            u = ((C - A).real * r.imag - (C - A).imag * r.real) / den
        hit = (den != 0) & (t >= 0) & (t <= 1) & (u >= 0) & (u <= 1)
        idx = np.argwhere(hit)
        if len(idx):
            i = int(idx[:, 0].min())
            if best is None or i < best[0]:
                best = (i, tr)
    return best


def _distance_to_graph(graph, x):
    best = float("inf")
    for tr, c, d in _segments(graph):
        s = d - c
        L2 = (s * s.conjugate()).real
        with np.errstate(divide="ignore", invalid="ignore"):
            t = np.clip(((x - c) * s.conjugate()).real / np.where(L2 > 0, L2, 1), 0, 1)
        proj = c + t * s
        dmin = float(np.min(np.abs(x - proj))) if len(proj) else float("inf")
        best = min(best, dmin)
    return best


def _leaf(graph, x, lam, radius):
    qd = graph.qd
    w0 = cmath.sqrt(qd.q(x))
    stops = [(t.position, ("turning_point", t.id), graph.options["r_stop"])
             for t in graph.turning_points]
    stops += [(p, ("pole", j), graph.options["r_stop"]) for j, p, _ in graph.poles]
    pts, ws, phs, term = _integrate(qd, complex(x), w0, 0j, lam, stops, radius,
                                    max(graph.options["max_length"], 40 * radius), 1e-9)
    if term[0] == "escaped":
        term = ("escaped", _classify_escape(qd, pts[-1], _asymptotic_directions(qd)))
    return pts, term


def region_of_point(graph, x, on_curve_tol=None):
    """Stable label of the Stokes region containing x.

    The label combines the two ends of the horizontal leaf through x with
    the turning points whose Stokes curves the vertical leaf through x
    meets first on either side.
    """
    x = complex(x)
    tol = on_curve_tol if on_curve_tol is not None else 1e-6 * max(1.0, graph.radius)
    if _distance_to_graph(graph, x) < tol:
        raise OnStokesCurve("point lies on a Stokes curve")
    radius = max(graph.radius, 4 * abs(x))
    ends = []
    for lam in (1.0, -1.0):
        _, term = _leaf(graph, x, lam, radius)
        ends.append(_term_label(term))
    hits = []
    for lam in (1j, -1j):
        pts, term = _leaf(graph, x, lam, radius)
        h = _first_hit(np.asarray(pts), graph)
        if h:
            hits.append("tp%d" % h[1].source)
        else:
            # escape direction of a vertical leaf is not a region invariant
            hits.append("inf" if term[0] == "escaped" else _term_label(term))
    return "H(%s)V(%s)" % ("|".join(sorted(ends)), "|".join(sorted(hits)))


def _term_label(term):
    if term[0] == "escaped":
        return "inf%s" % term[1]
    if term[0] == "pole":
        return "pole%d" % term[1]
    if term[0] == "turning_point":
        return "tp%d" % term[1]
    return "rec"


def region_census(graph, n=12):
    """Region labels of a ring of sample points (cheap summary for JSON)."""
    out = []
    for k in range(n):
        x = 0.5 * graph.radius * cmath.exp(2j * math.pi * (k + 0.5) / n)
        try:
            out.append({"sample": [x.real, x.imag], "region": region_of_point(graph, x)})
        except StokesError:
            continue
    return out


# ---------------------------------------------------------------------------
# output

def _wiggle(a, b, n=24, amp=None):
    a, b = complex(a), complex(b)
    d = b - a
    L = abs(d) or 1.0
    amp = amp if amp is not None else 0.03 * L
    nrm = 1j * d / L
    return [a + d * k / n + nrm * amp * (1 if k % 2 else -1) * (0 < k < n) for k in range(n + 1)]


def to_svg(graph, size=600, cuts=None):
    R = graph.radius
    def tr(z):
        return ((z.real + R) / (2 * R) * size, (R - z.imag) / (2 * R) * size)
    out = ['<?xml version="1.0" encoding="UTF-8"?>',
           '<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="%d" height="%d" '
           'viewBox="0 0 %d %d">' % (size, size, size, size),
           '<rect width="100%" height="100%" fill="white"/>']
    if cuts is None:
        from .contour import default_cuts
        cuts = default_cuts([t.position for t in graph.turning_points if t.kind == "simple_zero"])
    for a, b in cuts:
        pts = " ".join("%.4f,%.4f" % tr(complex(z)) for z in _wiggle(a, b))
        out.append('<polyline points="%s" fill="none" stroke="#c33" stroke-width="1"/>' % pts)
    for t in graph.trajectories:
        pts = " ".join("%.4f,%.4f" % tr(complex(z)) for z in t.points)
        out.append('<polyline data-id="%d" points="%s" fill="none" stroke="black" stroke-width="1.2"/>'
                   % (t.id, pts))
    for t in graph.turning_points:
        cx, cy = tr(t.position)
        shape = "circle" if t.kind == "simple_zero" else "rect"
        if shape == "circle":
            out.append('<circle cx="%.4f" cy="%.4f" r="4" fill="#f80"/>' % (cx, cy))
        else:
            out.append('<rect x="%.4f" y="%.4f" width="8" height="8" fill="#08f"/>' % (cx - 4, cy - 4))
    for _, p, _ in graph.poles:
        cx, cy = tr(p)
        out.append('<text x="%.4f" y="%.4f" font-size="14" text-anchor="middle">&#215;</text>'
                   % (cx, cy + 5))
    out.append("</svg>")
    return "\n".join(out) + "\n"
