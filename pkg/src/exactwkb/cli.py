"""Command-line driver.

    exactwkb <command> [options]

Exit codes: 0 success, 1 computational failure, 2 usage error.
"""

import argparse
import csv
import io
import json
import sys

import mpmath

from . import SCHEMA_VERSION

COMMANDS = ("wkb", "stokes-graph", "borel-sum", "voros", "connection", "tr",
            "pi-tau", "pi-stokes", "verify")


class UsageError(Exception):
    pass


# -- parsing ---------------------------------------------------------------------------

def _potential(s):
    """One expression or a JSON list [Q0, Q1, Q2]."""
    if s is None:
        return None
    s = s.strip()
    if s.startswith("["):
        try:
            v = json.loads(s)
        except json.JSONDecodeError as exc:
            raise UsageError("bad --potential list: %s" % exc)
        if not v or not all(isinstance(e, str) for e in v):
            raise UsageError("--potential list must hold expression strings")
        return v
    return s


def _number(s):
    s = str(s).strip().replace("i", "j").replace(" ", "")
    try:
        z = complex(s)
    except ValueError:
        raise UsageError("not a number: %r" % s)
    return z.real if z.imag == 0 else z


def _real(s):
    """Decimal string to mpf without a binary float in between."""
    try:
        return mpmath.mpf(str(s).strip())
    except ValueError:
        raise UsageError("not a real number: %r" % s)


def _params(s):
    """'nu=1,th0=1/3' or a JSON object.  Values may be complex ('1j')."""
    if not s:
        return {}
    s = s.strip()
    if s.startswith("{"):
        try:
            raw = json.loads(s)
        except json.JSONDecodeError as exc:
            raise UsageError("bad --params object: %s" % exc)
        return {k: _number(v) for k, v in raw.items()}
    out = {}
    for part in s.split(","):
        if "=" not in part:
            raise UsageError("--params entries look like name=value, got %r" % part)
        k, v = part.split("=", 1)
        if "/" in v:
            a, b = v.split("/", 1)
            out[k.strip()] = _number(a) / _number(b)
        else:
            out[k.strip()] = _number(v)
    return out


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--potential", help="Q(x) or a JSON list [Q0, Q1, Q2]")
    common.add_argument("--params", help="name=value,... or a JSON object")
    common.add_argument("--order", type=int, help="truncation order in hbar")
    common.add_argument("--hbar", help="numeric hbar")
    common.add_argument("--precision-bits", type=int, default=256)
    common.add_argument("--out", help="output file (default stdout)")
    common.add_argument("--format", choices=("json", "svg", "csv"), default="json")
    common.add_argument("--print-config", action="store_true",
                        help="print the resolved configuration and exit")

    p = argparse.ArgumentParser(prog="exactwkb", description="Exact WKB analysis toolkit.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("wkb", parents=[common], help="WKB recursion P_m")
    s.add_argument("--sign", type=int, choices=(1, -1), default=1)

    s = sub.add_parser("stokes-graph", parents=[common], help="trace the Stokes graph")
    s.add_argument("--tolerance", type=float, default=1e-10)
    s.add_argument("--radius", type=float)

    s = sub.add_parser("borel-sum", parents=[common], help="Pade-Borel sum of a WKB solution")
    s.add_argument("--series", choices=("wkb", "weber-expw"), default="wkb")
    s.add_argument("--x", help="evaluation point")
    s.add_argument("--sign", type=int, choices=(1, -1), default=1)
    s.add_argument("--turning-point", default="0", help="normalization point")
    s.add_argument("--direction", type=float, default=0.0)
    s.add_argument("--lateral", action="store_true", help="both lateral sums")
    s.add_argument("--scan", action="store_true", help="also list Borel-plane singularities")

    s = sub.add_parser("voros", parents=[common], help="Voros period terms")
    s.add_argument("--cycle", choices=("residue", "relative_infinity"), default="residue")
    s.add_argument("--point", default="0", help="pole for a residue cycle ('oo' allowed)")

    s = sub.add_parser("connection", parents=[common], help="connection matrices")
    s.add_argument("--koike", metavar="LAMBDA", help="Koike multiplier at lambda")
    s.add_argument("--path", help="polyline 'x0;x1;...' for a Voros connection matrix")
    s.add_argument("--base", type=int, help="turning point id for the normalization")

    s = sub.add_parser("tr", parents=[common], help="topological recursion free energies")
    s.add_argument("--curve", choices=("airy", "weber", "pi"), default="weber")
    s.add_argument("--gmax", type=int, default=3)
    s.add_argument("--t", default="-5")
    s.add_argument("--nu", default="1")

    s = sub.add_parser("pi-tau", parents=[common], help="Painleve I tau function and residual")
    s.add_argument("--t", default="-5")
    s.add_argument("--nu", default="1")
    s.add_argument("--rho", default="0.1")
    s.add_argument("--gmax", type=int, default=2)
    s.add_argument("--no-centre", action="store_true",
                   help="use rho as given instead of centring the Fourier sum")

    s = sub.add_parser("pi-stokes", parents=[common], help="Stokes multiplier tables")
    s.add_argument("--check", choices=("cyclic", "ddp", "tables"), default="tables")

    s = sub.add_parser("verify", parents=[common], help="run the acceptance suite")
    s.add_argument("--only", help="comma separated criterion numbers")
    return p


# -- output ----------------------------------------------------------------------------

def _c(z):
    z = mpmath.mpc(z)
    return [float(z.real), float(z.imag)]


def _emit(args, payload, rows=None, svg=None, text=None):
    fmt = args.format
    if fmt == "svg":
        if svg is None:
            raise UsageError("--format svg is only available for stokes-graph")
        data = svg
    elif fmt == "csv":
        if rows is None:
            raise UsageError("--format csv is not available for %s" % args.command)
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        for r in rows:
            w.writerow(r)
        data = buf.getvalue()
    else:
        payload = dict(payload)
        payload["schema_version"] = SCHEMA_VERSION
        payload["command"] = args.command
        data = json.dumps(payload, sort_keys=True, indent=2, default=str) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as f:
            f.write(data)
    elif not text:
        sys.stdout.write(data)
    if text:
        print(text)


def resolved_config(args):
    d = {k: v for k, v in sorted(vars(args).items()) if k != "print_config"}
    d["schema_version"] = SCHEMA_VERSION
    return d


def _need_potential(args, default=None):
    pot = _potential(args.potential) or default
    if pot is None:
        raise UsageError("%s needs --potential" % args.command)
    return pot


def _input(args, pot, values):
    from .wkb import SchrodingerInput
    names = sorted(values)
    try:
        return SchrodingerInput.from_strings(pot, tuple(names), values)
    except (SyntaxError, TypeError, ValueError) as exc:
        raise UsageError("cannot parse potential: %s" % exc)


# -- commands ----------------------------------------------------------------------------

def cmd_wkb(args):
    from .wkb import wkb_recursion
    params = _params(args.params)
    pot = _need_potential(args)
    from .wkb import SchrodingerInput
    try:
        inp = SchrodingerInput.from_strings(pot, tuple(sorted(params)))
    except (SyntaxError, TypeError, ValueError) as exc:
        raise UsageError("cannot parse potential: %s" % exc)
    order = 4 if args.order is None else args.order
    c = wkb_recursion(inp, order)
    rows = [["m", "even", "odd_over_sqrtQ0"]]
    terms = {}
    for m in range(-1, order + 1):
        e = c.p(m, args.sign)
        terms[str(m)] = {"even": str(e.even.as_expr()), "odd_over_sqrtQ0": str(e.odd.as_expr())}
        rows.append([m, terms[str(m)]["even"], terms[str(m)]["odd_over_sqrtQ0"]])
    _emit(args, {"potential": pot, "sign": args.sign, "order": order, "P": terms}, rows)


def cmd_stokes_graph(args):
    from .stokes import QuadraticDifferential, to_svg, trace_stokes_graph
    pot = _need_potential(args)
    if isinstance(pot, list):
        pot = pot[0]
    params = _params(args.params)
    try:
        qd = QuadraticDifferential.from_string(pot, params)
    except (SyntaxError, TypeError, ValueError, KeyError) as exc:
        raise UsageError("cannot parse potential: %s" % exc)
    g = trace_stokes_graph(qd, tolerance=args.tolerance, bounding_radius=args.radius)
    rows = [["trajectory", "source", "node", "re", "im"]]
    for tr in g.trajectories:
        for k, p in enumerate(tr.points):
            rows.append([tr.id, tr.source, k, repr(float(p.real)), repr(float(p.imag))])
    _emit(args, {"potential": pot, "params": {k: str(v) for k, v in params.items()}, "graph": g.to_json()},
          rows, to_svg(g) if args.format == "svg" else None)


def cmd_borel_sum(args):
    from .borel import (binet_exp_w, borel_transform, lateral_borel_sums, pade_borel_sum,
                        scan_borel_singularities, weber_w_series)
    from .wkb import Normalization, wkb_log_series, wkb_recursion
    if args.hbar is None:
        raise UsageError("borel-sum needs --hbar")
    hbar = _real(args.hbar)
    order = 40 if args.order is None else args.order
    out = {"hbar": str(hbar), "order": order, "series": args.series}
    if args.series == "weber-expw":
        nu = _params(args.params).get("nu", 1)
        bs = borel_transform(weber_w_series(mpmath.mpmathify(nu), order).exp())
        out["oracle_binet"] = _c(binet_exp_w(mpmath.mpmathify(nu), hbar))
    else:
        if args.x is None:
            raise UsageError("borel-sum --series wkb needs --x")
        params = _params(args.params)
        inp = _input(args, _need_potential(args), params)
        c = wkb_recursion(inp, order)
        x = mpmath.mpc(_number(args.x))
        ls = wkb_log_series(c, Normalization("turning_point", _number(args.turning_point)), x, sign=args.sign)
        bs = borel_transform(ls)
        out["x"] = _c(x)
    rows = [["kind", "re", "im", "error"]]
    if args.lateral:
        lp, lm = lateral_borel_sums(bs, hbar, args.direction)
        out["lateral_plus"], out["lateral_minus"] = lp.to_json(), lm.to_json()
        rows += [["plus"] + _c(lp.value) + [float(lp.error)], ["minus"] + _c(lm.value) + [float(lm.error)]]
    else:
        r = pade_borel_sum(bs, hbar, args.direction)
        out["sum"] = r.to_json()
        rows.append(["sum"] + _c(r.value) + [float(r.error)])
    if args.scan:
        out["singularities"] = scan_borel_singularities(bs).to_json()
    _emit(args, out, rows)


def cmd_voros(args):
    from .connection import Cycle, voros_period
    from .local import INF
    from .wkb import SchrodingerInput, wkb_recursion
    params = _params(args.params)
    pot = _need_potential(args)
    try:
        inp = SchrodingerInput.from_strings(pot, tuple(sorted(params)))
    except (SyntaxError, TypeError, ValueError) as exc:
        raise UsageError("cannot parse potential: %s" % exc)
    order = 6 if args.order is None else args.order
    c = wkb_recursion(inp, order)
    if args.cycle == "residue":
        import sympy
        pt = INF if args.point in ("oo", "inf", "infinity") else sympy.Rational(args.point)
        cyc = Cycle("residue", pt)
    else:
        cyc = Cycle("relative_infinity")
    V = voros_period(c, cyc)
    d = V.to_json()
    rows = [["power", "term"]] + [[p, v] for p, v in sorted(d["terms"].items(), key=lambda kv: int(kv[0]))]
    _emit(args, {"potential": pot, "voros": d}, rows)


def cmd_connection(args):
    from .connection import assemble_connection, koike_multiplier, path_from_points
    import sympy
    if args.koike is not None:
        lam = sympy.Rational(args.koike) if "j" not in args.koike else sympy.sympify(args.koike)
        v = koike_multiplier(lam)
        _emit(args, {"lambda": str(lam), "koike_multiplier": str(v)}, [["lambda", "multiplier"], [lam, v]])
        return
    if not args.path:
        raise UsageError("connection needs --koike or --path")
    from .stokes import QuadraticDifferential, trace_stokes_graph
    from .wkb import wkb_recursion
    params = _params(args.params)
    pot = _need_potential(args)
    inp = _input(args, pot, params)
    c = wkb_recursion(inp, 6 if args.order is None else args.order)
    g = trace_stokes_graph(QuadraticDifferential.from_string(pot if isinstance(pot, str) else pot[0], params))
    pts = [complex(_number(p)) for p in args.path.split(";")]
    base = args.base
    if base is None:
        base = min(g.turning_points, key=lambda tp: abs(tp.position - pts[0])).id
    path = path_from_points(g, c, pts, base)
    M = assemble_connection(path, g)
    d = M.to_json()
    rows = [["row", "col0", "col1"]] + [[i] + d["entries"][i] for i in range(2)]
    _emit(args, {"potential": pot, "path": [_c(p) for p in pts], "base": base, "matrix": d}, rows)


def cmd_tr(args):
    gmax = args.gmax
    rows = [["g", "F_g"]]
    if args.curve == "weber":
        from .tr import weber_free_energies
        F = weber_free_energies(gmax)
        out = {"curve": "weber", "nu": "1", "homogeneity": "F_g(nu) = F_g(1) nu^(2-2g)",
               "F": {str(g): str(v) for g, v in sorted(F.items())}}
        rows += [[g, str(v)] for g, v in sorted(F.items())]
    elif args.curve == "airy":
        from .tr import airy_wave_check
        a = airy_wave_check(max(1, gmax))
        out = {"curve": "airy", "wave": {k: ({str(i): str(j) for i, j in v.items()} if isinstance(v, dict) else str(v))
                                         for k, v in a.items()}}
        rows = [["k", "series"]] + [[k, str(v)] for k, v in sorted(a["series"].items())]
    else:
        from .painleve1 import partition_function, solve_u
        c = solve_u(_number(args.t), _number(args.nu))
        pd = partition_function(c.t, c.nu, gmax=gmax, curve=c)
        out = {"curve": "painleve1", "spectral_curve": c.to_json(), "partition": pd.to_json()}
        rows += [[g, "%r %r" % tuple(_c(v))] for g, v in enumerate(pd.F)]
    _emit(args, out, rows)


def cmd_pi_tau(args):
    from .painleve1 import centred_rho, painleve_residual, solve_u
    if args.hbar is None:
        raise UsageError("pi-tau needs --hbar")
    c = solve_u(_real(args.t), _real(args.nu))
    rho = _real(args.rho)
    if not args.no_centre:
        rho = centred_rho(c, rho)
    r = painleve_residual(c, rho, _real(args.hbar), gmax=args.gmax)
    d = r.to_json()
    d["tau"] = d.pop("tau_log")
    d["tau_is_log"] = True
    rows = [["t", "nu", "hbar", "K", "gmax", "q_re", "q_im", "residual"],
            [d["t"][0], d["nu"][0], d["hbar"], d["K"], d["gmax"], d["q"][0], d["q"][1], d["residual"]]]
    _emit(args, d, rows)


def cmd_pi_stokes(args):
    from .painleve1 import cyclic_check, ddp_map_check, stokes_tables
    m, p = stokes_tables()
    out = {"tables": [m.to_json(), p.to_json()]}
    text = None
    status = 0
    if args.check == "cyclic":
        a, b = cyclic_check(m), cyclic_check(p)
        n = a[2] + b[2]
        out["cyclic"] = {"passed": n, "total": 10, "failing": [a[1], b[1]]}
        text = "%s %d/10" % ("PASS" if n == 10 else "FAIL", n)
        status = 0 if n == 10 else 1
    elif args.check == "ddp":
        ok, bad = ddp_map_check(m, p)
        out["ddp"] = {"pass": ok, "failing": bad}
        text = "PASS 5/5" if ok else "FAIL %d/5" % (5 - len(bad))
        status = 0 if ok else 1
    rows = [["side", "j", "s_j"]] + [[t.side, j, str(v)] for t in (m, p) for j, v in sorted(t.s.items())]
    _emit(args, out, rows, text=text)
    return status


def cmd_verify(args):
    from .acceptance import run_all
    only = None
    if args.only:
        try:
            only = {int(v) for v in args.only.split(",")}
        except ValueError:
            raise UsageError("--only takes comma separated integers")
    results = run_all(only)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as f:
            json.dump({"schema_version": SCHEMA_VERSION, "results": [r.to_json() for r in results]},
                      f, sort_keys=True, indent=2)
    return 0 if all(r.passed for r in results) else 1


HANDLERS = {"wkb": cmd_wkb, "stokes-graph": cmd_stokes_graph, "borel-sum": cmd_borel_sum,
            "voros": cmd_voros, "connection": cmd_connection, "tr": cmd_tr, "pi-tau": cmd_pi_tau,
            "pi-stokes": cmd_pi_stokes, "verify": cmd_verify}


def run(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.print_config:
        print(json.dumps(resolved_config(args), sort_keys=True, indent=2))
        return 0
    if args.precision_bits < 53:
        print("error: --precision-bits must be at least 53", file=sys.stderr)
        return 2
    try:
        with mpmath.workprec(args.precision_bits):
            return HANDLERS[args.command](args) or 0
    except UsageError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 2
    except (ArithmeticError, ValueError, NotImplementedError, RuntimeError) as exc:
        print("computation failed: %s: %s" % (type(exc).__name__, exc), file=sys.stderr)
        return 1


def main():
    sys.exit(run())
