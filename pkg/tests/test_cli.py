import json

from exactwkb.cli import run


def test_pi_stokes_cyclic(capsys):
    assert run(["pi-stokes", "--check", "cyclic"]) == 0
    assert capsys.readouterr().out.strip() == "PASS 10/10"


def test_usage_errors(capsys):
    assert run(["nope"]) == 2
    assert run(["wkb"]) == 2
    assert run(["pi-stokes", "--format", "svg"]) == 2
    capsys.readouterr()


def test_computational_failure_exit_code(capsys):
    # at t = 0 the Newton start u = 0 is on the discriminant locus
    assert run(["tr", "--curve", "pi", "--t", "0", "--nu", "1"]) == 1
    capsys.readouterr()


def test_json_has_schema_and_is_deterministic(capsys):
    assert run(["wkb", "--potential", "x", "--order", "3"]) == 0
    a = capsys.readouterr().out
    assert run(["wkb", "--potential", "x", "--order", "3"]) == 0
    assert capsys.readouterr().out == a
    d = json.loads(a)
    assert d["schema_version"] and d["P"]["0"]["even"] == "-1/(4*x)"


def test_print_config(capsys):
    assert run(["stokes-graph", "--potential", "x", "--print-config"]) == 0
    d = json.loads(capsys.readouterr().out)
    assert d["precision_bits"] == 256 and d["potential"] == "x"


def test_stokes_graph_svg(tmp_path):
    out = tmp_path / "airy.svg"
    assert run(["stokes-graph", "--potential", "x", "--format", "svg", "--out", str(out)]) == 0
    text = out.read_text()
    assert text.startswith("<?xml") and text.count("<polyline data-id") == 3


def test_koike_and_csv(capsys):
    assert run(["connection", "--koike=-1/4", "--format", "csv"]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out[0] == "lambda,multiplier" and out[1].endswith("2*I")
