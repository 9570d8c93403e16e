from __future__ import annotations

import json
import subprocess
import sys
from pathlib import Path

import pytest

from flatrack import castle as C
from flatrack.cli import main

DATA = Path(__file__).resolve().parent.parent / "data"


def run(capsys, *args):
    rc = main(list(args))
    out, err = capsys.readouterr()
    return rc, out, err


def test_cf(capsys):
    rc, out, _ = run(capsys, "cf", "--value", "sqrt(6)-2", "--digits", "6")
    assert rc == 0 and out.strip() == "[2,4,2,4,2,4]"
    rc, out, _ = run(capsys, "cf", "--value", "sqrt(6)-2", "--digits", "6", "--method", "gauss")
    assert out.strip() == "[2,4,2,4,2,4]"


def test_declared_field_accepts_its_own_and_rational_inputs(capsys):
    # sqrt(24) = 2 sqrt(6), so both tags name the same field
    for d in ("6", "24"):
        rc, out, _ = run(capsys, "--field", d, "cf", "--value", "sqrt(6)-2", "--digits", "3")
        assert rc == 0 and out.strip() == "[2,4,2]"
    rc, _, _ = run(capsys, "--field", "2", "castle", "validate", "--in", str(DATA / "trace_start.json"))
    assert rc == 0


def test_rv_and_rauzy(capsys):
    rc, out, _ = run(capsys, "rv", "step", "--perm", "AB/BA", "--lengths", "(sqrt(5)-1)/2,(3-sqrt(5))/2")
    assert rc == 0 and json.loads(out)["move"] in ("t", "b", "top", "bot")
    rc, out, _ = run(capsys, "rauzy", "class", "--perm", "ABCD/DCBA", "--count")
    assert out.strip() == "7"
    rc, out, _ = run(capsys, "rauzy", "class", "--perm", "ABCD/DCAB", "--reduced", "--count")
    assert out.strip() == "6"
    rc, out, _ = run(capsys, "rauzy", "graph", "--perm", "ABCD/DCBA")
    assert out.startswith("digraph")


def test_hyp_commands(capsys, tmp_path):
    quad = str(DATA / "golden_quad.json")
    assert run(capsys, "hyp", "validate", "--in", quad)[0] == 0
    moved = tmp_path / "moved.json"
    rc, _, _ = run(capsys, "hyp", "move", "--in", quad, "--cycle", "r(1)", "--out", str(moved))
    assert rc == 0 and json.loads(moved.read_text())["k"] == 1
    rc, out, _ = run(capsys, "hyp", "graph", "--pi-l", "(1 3)", "--pi-r", "(1 3 2)", "--k", "3", "--unlabeled", "--format", "json")
    data = json.loads(out)
    assert rc == 0 and (data["vertices"], data["unlabeled_vertices"], data["covering_degree"]) == (9, 3, 3)
    rc, out, _ = run(capsys, "hyp", "graph", "--pi-l", "(1 3)", "--pi-r", "(1 3 2)", "--k", "3", "--format", "dot")
    assert out.count("[label=") >= 9


def test_pa_commands(capsys):
    rc, out, _ = run(capsys, "pa", "enumerate", "--k", "1", "--max-len", "2", "--json")
    recs = json.loads(out)
    assert rc == 0 and len(recs if isinstance(recs, list) else recs["records"]) == 1
    rc, out, _ = run(capsys, "pa", "check-loop", "--pi-l", "()", "--pi-r", "()", "--k", "1", "--loop", "r l")
    assert rc == 0 and "sqrt(5)" in out
    rc, _, err = run(capsys, "pa", "enumerate", "--k", "2", "--max-len", "2")
    assert rc == 1 and err.startswith("error[EvenK]")


def test_castle_commands(capsys, tmp_path):
    start = str(DATA / "trace_start.json")
    rc, out, _ = run(capsys, "castle", "move", "--in", start, "--choice", "(1,r)", "--choice", "(3,r)", "--format", "text")
    assert rc == 0 and "(r3(r1 l3))(r2 l1)" in out.replace(" (", "(")
    rc, out, _ = run(capsys, "castle", "return", "--in", str(DATA / "3set.json"))
    assert rc == 0 and "log(2)/2" in out
    rc, out, _ = run(capsys, "castle", "orbit", "--in", str(DATA / "golden_castle.json"))
    assert rc == 0 and "2" in out
    bal = tmp_path / "bal.json"
    assert run(capsys, "castle", "balance", "--in", start, "--out", str(bal))[0] == 0
    P = C.castle_from_json(json.loads(bal.read_text()))
    assert C.is_balanced(P)


def test_surface_and_render(capsys, tmp_path):
    rc, out, _ = run(capsys, "surface", "info", "--in", str(DATA / "3set.json"))
    assert rc == 0 and "2" in out
    rc, out, _ = run(capsys, "surface", "systole", "--in", str(DATA / "golden_quad.json"), "--length", "2")
    assert rc == 0 and out.startswith("sqrt(")
    svg = tmp_path / "q.svg"
    assert run(capsys, "render", "--in", str(DATA / "golden_quad.json"), "--out", str(svg))[0] == 0
    text = svg.read_text()
    assert text.startswith("<svg") and "stroke-dasharray" in text
    # deterministic output
    run(capsys, "render", "--in", str(DATA / "golden_quad.json"), "--out", str(tmp_path / "r.svg"))
    assert (tmp_path / "r.svg").read_text() == text


@pytest.mark.parametrize(
    "args, code, tag",
    [
        (["cf", "--value", "sqrt(6"], 2, "error[parse]"),
        (["rv", "step", "--perm", "AB/BA", "--lengths", "1,1"], 1, "error[KeaneViolation]"),
        (["hyp", "validate"], 2, "error[usage]"),
        (["castle", "move", "--in", "-", "--choice", "zz"], 2, "error["),
        (["nosuch"], 2, "error[usage]"),
        (["--field", "4", "cf", "--value", "1/3"], 2, "error[usage]"),
        (["--field", "5", "cf", "--value", "sqrt(6)-2"], 1, "error[FieldMismatch]"),
        (["--field", "5", "castle", "orbit", "--in", str(DATA / "3set.json")], 1, "error[FieldMismatch]"),
    ],
)
def test_errors(capsys, monkeypatch, args, code, tag):
    monkeypatch.setattr(sys, "stdin", open(DATA / "trace_start.json"))
    rc, _, err = run(capsys, *args)
    assert rc == code and err.startswith(tag)


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "flatrack", "cf", "--value", "sqrt(2)-1", "--digits", "3"], capture_output=True, text=True)
    assert res.returncode == 0 and res.stdout.strip() == "[2,2,2]"
