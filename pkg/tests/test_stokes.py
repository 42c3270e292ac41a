import pytest

from exactwkb.painleve1 import solve_u
from exactwkb.stokes import (OnStokesCurve, QuadraticDifferential, find_critical_points,
                             region_of_point, to_svg, trace_stokes_graph)


def test_airy_critical_points():
    crit = dict((str(p), o) for p, o in find_critical_points(QuadraticDifferential.from_string("x")))
    assert crit["oo"] == -5


def test_airy_three_curves_no_saddle():
    g = trace_stokes_graph(QuadraticDifferential.from_string("x"))
    assert len(g.trajectories) == 3 and not g.saddles
    assert all(t.terminus[0] == "escaped" for t in g.trajectories)


def test_airy_positive_axis_is_a_stokes_curve():
    g = trace_stokes_graph(QuadraticDifferential.from_string("x"))
    with pytest.raises(OnStokesCurve):
        region_of_point(g, 1.0)
    assert region_of_point(g, 1 + 0.5j) == region_of_point(g, 1.01 + 0.52j)


def test_svg_nodes_match_json():
    g = trace_stokes_graph(QuadraticDifferential.from_string("x"))
    svg = to_svg(g)
    assert svg.count('data-id="') == len(g.to_json()["trajectories"])


def test_painleve_curve_has_b_cycle_saddle():
    c = solve_u(-5, 1)
    u = complex(c.u)
    qd = QuadraticDifferential.from_string("4*x**3-10*x+u", {"u": u.real})
    g = trace_stokes_graph(qd)
    assert g.saddles
    # the B-cycle encircles the two lower real roots
    roots = sorted(float(r.real) for r in c.E.roots)
    ends = {tuple(sorted(round(g.turning_points[i].position.real, 6) for i in s.endpoints)) for s in g.saddles}
    assert (round(roots[0], 6), round(roots[1], 6)) in ends
