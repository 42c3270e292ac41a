"""Numeric integration on the double cover y^2 = Q0(x).

Paths are polylines.  Along a path the square root is continued by
choosing, at every node, the root closest in angle to the value predicted
from the previous node; panels are refined until the phase of Q0 moves by
less than ``_MAX_PHASE`` across each of them, which makes that choice
unambiguous away from zeros of Q0.
"""

import mpmath

from .fields import eval_frac


class ContourError(ArithmeticError):
    pass


class PathHitsTurningPoint(ContourError):
    pass


class BranchTrackingLost(ContourError):
    pass


_MAX_PHASE = 0.4
_MAX_DEPTH = 60


class NumericCurve:
    """Q0 with all parameters bound; ``q(x)`` is an mpc."""

    def __init__(self, Q0, param_values=()):
        self.Q0 = Q0
        self.params = [mpmath.mpmathify(v) for v in param_values]

    def q(self, x):
        return mpmath.mpc(eval_frac(self.Q0, [x] + self.params))

    def frac(self, f, x):
        return mpmath.mpc(eval_frac(f, [x] + self.params))


def _pick(root, guess):
    """+root or -root, whichever points the same way as ``guess``."""
    if guess == 0:
        return root
    return root if mpmath.re(root * mpmath.conj(guess)) >= 0 else -root


def _panels(curve, a, b, qa, zero_end):
    """Subdivide [a, b] so the phase of Q0 is slowly varying on each piece.

    ``zero_end`` = "a" or "b" marks an endpoint that is a zero or pole of
    Q0; there the partition is graded geometrically and Q0 is never
    evaluated at the endpoint itself.
    """
    pts = [mpmath.mpf(0), mpmath.mpf(1)]
    if zero_end == "b":
        pts = [mpmath.mpf(0)] + [1 - mpmath.mpf(2) ** -k for k in range(1, 40)] + [mpmath.mpf(1)]
    elif zero_end == "a":
        pts = [mpmath.mpf(0)] + [mpmath.mpf(2) ** -k for k in range(39, 0, -1)] + [mpmath.mpf(1)]
    out = []
    for s0, s1 in zip(pts, pts[1:]):
        out.extend(_refine(curve, a, b, s0, s1, zero_end, 0))
    return out


def _refine(curve, a, b, s0, s1, zero_end, depth):
    if (zero_end == "a" and s0 == 0) or (zero_end == "b" and s1 == 1):
        return [(s0, s1)]
    x0, x1 = a + (b - a) * s0, a + (b - a) * s1
    xm = (x0 + x1) / 2
    q0, q1, qm = curve.q(x0), curve.q(x1), curve.q(xm)
    if q0 == 0 or q1 == 0 or qm == 0:
        raise PathHitsTurningPoint("path passes through a zero of Q0 near %s" % mpmath.nstr(xm, 8))
    ph = max(abs(mpmath.arg(q1 / q0)), abs(mpmath.arg(qm / q0)))
    if ph < _MAX_PHASE:
        return [(s0, s1)]
    if depth > _MAX_DEPTH:
        raise PathHitsTurningPoint("panel refinement did not converge near %s" % mpmath.nstr(xm, 8))
    sm = (s0 + s1) / 2
    return (_refine(curve, a, b, s0, sm, zero_end, depth + 1)
            + _refine(curve, a, b, sm, s1, zero_end, depth + 1))


def integrate_segment(curve, integrand, a, b, w_a, zero_end=None, w_b_zero=False):
    """Integrate integrand(x, w) dx on [a, b] with w = sqrt(Q0) continued from w_a.

    Returns (value, w at b).  When ``zero_end`` == "b" the endpoint b is a
    zero of Q0 and the returned root there is 0.  When ``zero_end`` == "a"
    the starting point is the zero and ``w_a`` must be a nonzero value at a
    reference point just off it: pass the root at ``b`` via ``w_a`` and the
    routine tracks backwards.
    """
    if zero_end == "a":
        val, w = integrate_segment(curve, integrand, b, a, w_a, zero_end="b")
        return -val, w
    a = mpmath.mpc(a)
    b = mpmath.mpc(b)
    panels = _panels(curve, a, b, None, zero_end)
    total = mpmath.mpc(0)
    w_prev = mpmath.mpc(w_a)
    for s0, s1 in panels:
        x0, x1 = a + (b - a) * s0, a + (b - a) * s1
        end_is_zero = zero_end == "b" and s1 == 1
        if end_is_zero:
            w1 = mpmath.mpc(0)
        else:
            w1 = _pick(mpmath.sqrt(curve.q(x1)), w_prev)
        wa_loc, wb_loc = w_prev, w1

        def f(s, x0=x0, x1=x1, wa=wa_loc, wb=wb_loc, ez=end_is_zero):
            x = x0 + (x1 - x0) * s
            r = mpmath.sqrt(curve.q(x))
            guess = wa if ez else wa + (wb - wa) * s
            return integrand(x, _pick(r, guess)) * (x1 - x0)

        total += mpmath.quad(f, [0, 1])
        w_prev = w1
    return total, w_prev


def integrate_polyline(curve, integrand, pts, w0, zero_last=False):
    """Integral along the polyline ``pts`` starting with root ``w0`` at pts[0]."""
    total = mpmath.mpc(0)
    w = mpmath.mpc(w0)
    n = len(pts)
    for i in range(n - 1):
        ze = "b" if (zero_last and i == n - 2) else None
        v, w = integrate_segment(curve, integrand, pts[i], pts[i + 1], w, zero_end=ze)
        total += v
    return total, w


def integrate_to_infinity(curve, integrand, x0, w0, direction=None, decades=60):
    """Integral from x0 out to infinity along a ray (default: radially)."""
    x0 = mpmath.mpc(x0)
    if direction is None:
        direction = x0 / abs(x0) if x0 != 0 else mpmath.mpc(1)
    total = mpmath.mpc(0)
    w = mpmath.mpc(w0)
    scale = max(abs(x0), 1)
    a = x0
    eps = mpmath.mpf(10) ** (-mpmath.mp.dps - 2)
    small = 0
    for k in range(int(decades * 3.33)):
        b = x0 + direction * scale * (mpmath.mpf(2) ** k)
        v, w = integrate_segment(curve, integrand, a, b, w)
        total += v
        a = b
        small = small + 1 if abs(v) < eps * max(1, abs(total)) else 0
        if small >= 3:
            break
    return total, w


def loop_integral(curve, integrand, x, v, w_x, radius=None, turns=1):
    """Integral over the closed path x -> near v -> circle around v -> x.

    The path starts at x with root -w_x, so after one turn around a simple
    zero (or simple pole) it ends with +w_x.  Half of the result is the
    contour-regularized integral from v to x on the sheet of w_x.
    """
    x = mpmath.mpc(x)
    v = mpmath.mpc(v)
    d = x - v
    if radius is None:
        radius = abs(d) / 2
    p = v + d / abs(d) * radius
    total = mpmath.mpc(0)
    w = -mpmath.mpc(w_x)
    val, w = integrate_segment(curve, integrand, x, p, w)
    total += val
    n = 16 * turns
    th0 = mpmath.arg(d)
    prev = p
    for k in range(1, n + 1):
        nxt = v + radius * mpmath.expj(th0 + 2 * mpmath.pi * k / 16)
        val, w = integrate_segment(curve, integrand, prev, nxt, w)
        total += val
        prev = nxt
    val, w = integrate_segment(curve, integrand, prev, x, w)
    total += val
    return total, w


def sheet_sqrt(curve, x, ref, w_ref):
    """Root of Q0 at x continued along the straight segment from ``ref``."""
    a, b = mpmath.mpc(ref), mpmath.mpc(x)
    w = mpmath.mpc(w_ref)
    for s0, s1 in _panels(curve, a, b, None, None):
        w = _pick(mpmath.sqrt(curve.q(a + (b - a) * s1)), w)
    return w


def sheet_sign_at_infinity(curve, x, w_x, leading, exponent):
    """+1 or -1: the sheet of w_x seen from infinity along the ray through x.

    ``leading * X**exponent`` is the field's chosen asymptotic root.
    """
    x = mpmath.mpc(x)
    d = x / abs(x) if x != 0 else mpmath.mpc(1)
    X = x + d * max(abs(x), 1) * mpmath.mpf(2) ** 40
    w = sheet_sqrt(curve, X, x, w_x)
    ref = leading * mpmath.power(X, exponent)
    return 1 if mpmath.re(w * mpmath.conj(ref)) >= 0 else -1


def crossings(a, b, cuts):
    """Number of cut segments crossed by the segment [a, b]."""
    n = 0
    for c0, c1 in cuts:
        if _segments_cross(complex(a), complex(b), complex(c0), complex(c1)):
            n += 1
    return n


def _segments_cross(p, q, r, s):
    def cross(u, v):
        return u.real * v.imag - u.imag * v.real
    d = cross(q - p, s - r)
    if d == 0:
        return False
    t = cross(r - p, s - r) / d
    u = cross(r - p, q - p) / d
    return 0 < t < 1 and 0 < u < 1


def sqrt_with_cuts(curve, x, cuts, ref, w_ref):
    """sqrt(Q0(x)) on the sheet defined by explicit cut segments.

    The value is the straight-line continuation from ``ref`` corrected by a
    sign flip for every cut crossed, so it does not depend on the path as
    long as the cuts join turning points in pairs.
    """
    w = sheet_sqrt(curve, x, ref, w_ref)
    return -w if crossings(ref, x, cuts) % 2 else w


def default_cuts(points):
    """Straight cuts pairing turning points in ascending real part."""
    pts = sorted(points, key=lambda z: (float(mpmath.re(z)), float(mpmath.im(z))))
    return [(pts[i], pts[i + 1]) for i in range(0, len(pts) - 1, 2)]
