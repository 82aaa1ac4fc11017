import json
import re
from pathlib import Path

import pytest

from circorder.cli import main
from circorder.pingpong import PingPongConfig, preset_schottky

GOLDEN = Path(__file__).parent / "golden"


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.fixture
def s1_json(tmp_path):
    p = tmp_path / "schottky1.json"
    p.write_text(preset_schottky(1).dumps())
    return str(p)


def test_golden_config_matches_preset():
    assert PingPongConfig.loads((GOLDEN / "schottky1.json").read_text()) == preset_schottky(1)


@pytest.mark.parametrize(
    "words,expected", [(("aBAb", "b", "Ab"), "+1"), (("a", "a", "b"), "0"), (("e", "b", "a"), "-1")]
)
def test_eval(capsys, s1_json, words, expected):
    code, out, _ = run(capsys, "eval", s1_json, *words)
    assert code == 0 and out.strip() == expected


def test_eval_accepts_preset_names(capsys):
    assert run(capsys, "eval", "schottky1", "a", "b", "ab")[1].strip() in ("+1", "-1")


def test_eval_parse_error_is_usage(capsys, s1_json):
    code, _, err = run(capsys, "eval", s1_json, "a", "x", "b")
    assert code == 2 and "cannot parse" in err


def test_missing_arguments_are_usage(capsys):
    assert run(capsys, "eval")[0] == 2
    assert run(capsys, "bogus")[0] == 2
    assert run(capsys, "eval", "no_such_file.json", "a", "b", "e")[0] == 2


def test_invalid_config_is_domain_error(capsys, tmp_path):
    data = json.loads(preset_schottky(1).dumps())
    del data["containment"]["a"]["0"]
    p = tmp_path / "bad.json"
    p.write_text(json.dumps(data))
    code, _, err = run(capsys, "eval", str(p), "a", "b", "e")
    assert code == 1 and "not total" in err
    code, out, _ = run(capsys, "validate", str(p))
    assert code == 1 and "not total" in out
    assert run(capsys, "validate", "schottky1")[:2] == (0, "ok\n")


def test_table_golden(tmp_path, capsys, s1_json):
    out = tmp_path / "t.csv"
    assert run(capsys, "table", s1_json, "--radius", "1", "--out", str(out))[0] == 0
    data = out.read_bytes()
    assert data == (GOLDEN / "schottky1_ball1.csv").read_bytes()
    assert data.count(b"\n") == 1 + 125
    again = tmp_path / "t2.csv"
    run(capsys, "table", s1_json, "--radius", "1", "--out", str(again))
    assert again.read_bytes() == data


def test_table_radius_two_rows(capsys):
    code, out, _ = run(capsys, "table", "schottky1", "--radius", "2")
    assert code == 0 and out.count("\n") == 1 + 17**3


def test_table_cap(capsys):
    code, _, err = run(capsys, "table", "schottky1", "--radius", "5")
    assert code == 1 and "exceeds the cap" in err and str(485**3) in err


def test_compare(capsys):
    code, out, _ = run(capsys, "compare", "schottky1", "three_boundary", "--radius", "1")
    assert code == 0 and out.startswith("differ at")
    assert run(capsys, "compare", "schottky1", "schottky1")[1].startswith("agree")
    assert run(capsys, "compare", "schottky1", "schottky2")[0] == 1


def test_lift(capsys, tmp_path):
    out = tmp_path / "l.json"
    assert run(capsys, "lift", "schottky1", "--k", "2", "--out", str(out))[0] == 0
    cfg = PingPongConfig.loads(out.read_text())
    assert len(cfg.slots) == 9 and cfg.lift[1] == 2


@pytest.mark.parametrize(
    "argv,expected",
    [
        (("rot", "schottky1", "BAba", "--k", "3"), "1/3"),
        (("rot", "schottky1/5", "aBAb"), "1/5"),
        (("rot", "schottky2", "aBAbcDCd", "--k", "4"), "3/4"),
        (("rot", "schottky1", "a", "--k", "2", "--max-denominator", "8"), "0"),
    ],
)
def test_rot(capsys, argv, expected):
    code, out, _ = run(capsys, *argv)
    assert code == 0 and out.strip() == expected


def test_ext_compare(capsys):
    assert run(capsys, "ext-compare", "e:1", "aBAb:0", "--k", "2")[1].strip() == "+1"
    assert run(capsys, "ext-compare", "e:1", "aBAbaBAb", "--k", "2")[1].strip() == "-1"
    assert run(capsys, "ext-compare", "a:q", "e", "--k", "2")[0] == 2


def test_chain(capsys, tmp_path):
    code, out, _ = run(capsys, "chain", "--k", "3")
    assert code == 0 and "verified" in out
    p = tmp_path / "c.json"
    assert run(capsys, "chain", "--k", "5", "--json", "--out", str(p))[0] == 0
    assert json.loads(p.read_text())["verified"]
    assert run(capsys, "chain", "--k", "1")[0] == 1


def test_render_is_deterministic(tmp_path, capsys):
    a, b = tmp_path / "a.svg", tmp_path / "b.svg"
    assert run(capsys, "render", "schottky1", "--out", str(a))[0] == 0
    run(capsys, "render", "schottky1", "--out", str(b))
    svg = a.read_text()
    assert a.read_bytes() == b.read_bytes()
    assert "x_0" in svg
    labels = re.findall(r">(D\([aAbB]\))", svg)
    assert labels == ["D(a)", "D(b)", "D(A)", "D(B)"]


def test_render_lift_labels(tmp_path, capsys):
    p = tmp_path / "l.svg"
    assert run(capsys, "render", "schottky1/2", "--out", str(p))[0] == 0
    assert "sheet 1" in p.read_text()


def test_gaps(capsys):
    code, out, _ = run(capsys, "gaps", "three_boundary", "--radius", "4")
    assert code == 0 and "unvisited gaps: 2" in out


def test_experiment_outputs(tmp_path, capsys):
    js, fig = tmp_path / "r.json", tmp_path / "r.svg"
    code, out, _ = run(
        capsys, "experiment", "singleton", "--seed", "3", "--trials", "4", "--out", str(js), "--figure", str(fig)
    )
    assert code == 0 and "4 passed" in out
    assert json.loads(js.read_text())["passed"] == 4
    assert fig.read_text().startswith("<?xml")


def test_experiment_stability_and_basepoint(capsys):
    assert run(capsys, "experiment", "stability", "--trials", "3")[0] == 0
    assert run(capsys, "experiment", "stability", "--trials", "1", "--margin", "1/5")[0] == 1
    code, out, _ = run(capsys, "experiment", "basepoint", "--config", "three_boundary")
    assert code == 0 and "basepoint-walk" in out


def test_report(tmp_path, capsys):
    out = tmp_path / "rep"
    assert run(capsys, "report", "--out", str(out), "--radius", "1", "--trials", "3")[0] == 0
    names = {p.name for p in out.iterdir()}
    assert {"tables.csv", "rotation.csv", "singleton.json", "singleton.svg", "schottky1.svg"} <= names
    rot = (out / "rotation.csv").read_text().splitlines()
    assert rot[0] == "n,k,word,rotation" and "2,5,aBAbcDCd,3/5" in rot
