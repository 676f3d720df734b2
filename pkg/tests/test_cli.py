import json
import math

import pytest

from aloha_region.cli import main, num, parse_rates


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_number_formatting():
    assert num(1 / 3) == 0.333333333333
    assert num(math.inf) == "inf"
    assert num(None) is None


def test_parse_rates_fractions():
    assert list(parse_rates("1/16, 9/16")) == [0.0625, 0.5625]


def test_membership_commands(capsys):
    code, out, _ = run(capsys, "membership", "--rates", "0.25,0.2")
    rec = json.loads(out)
    assert code == 0 and rec["results"]["class"] == "Interior"
    assert len(rec["results"]["controls"]) == 2
    assert json.loads(run(capsys, "membership", "--rates", "0.0625,0.5625")[1])["results"]["class"] == "Boundary"
    assert json.loads(run(capsys, "membership", "--rates", "0.25,0.3333333333")[1])["results"]["class"] == "Exterior"


def test_parse_errors(capsys):
    assert run(capsys, "membership", "--rates", "0.2,x")[0] == 2
    assert run(capsys, "membership", "--rates", "0.2")[0] == 2
    assert run(capsys, "nope")[0] == 2


def test_volume_commands(capsys):
    code, out, _ = run(capsys, "volume", "--set", "lambda", "--n", "4", "--method", "exact")
    res = json.loads(out)["results"]
    assert code == 0 and res["volume"]["fraction"] == "27691/14414400"
    assert round(res["volume"]["decimal"], 6) == 0.001921
    code, out, _ = run(capsys, "volume", "--set", "srs", "--n", "7", "--method", "exact")
    res = json.loads(out)["results"]
    assert res["volume"]["fraction"] == f"1/{math.factorial(14) // 128}"
    assert round(res["volume"]["decimal"] / 1e-7, 4) == 0.0147
    assert run(capsys, "volume", "--set", "po", "--n", "2", "--method", "exact")[0] == 4
    assert run(capsys, "volume", "--set", "lambda", "--n", "7", "--method", "exact")[0] == 4


def test_volume_mc(capsys):
    code, out, _ = run(capsys, "volume", "--set", "so_star", "--n", "2", "--method", "mc",
                       "--samples", "200000", "--seed", "7")
    res = json.loads(out)["results"]
    assert code == 0
    assert abs(res["volume"] - 0.2146) <= 3 * res["half_width"]


def test_env_seed(capsys, monkeypatch):
    argv = ("volume", "--set", "po", "--n", "3", "--method", "mc", "--samples", "5000")
    monkeypatch.setenv("ALOHA_SEED", "17")
    a = json.loads(run(capsys, *argv)[1])
    assert a["seed"] == 17
    b = json.loads(run(capsys, *argv, "--seed", "17")[1])
    assert a == b
    monkeypatch.setenv("ALOHA_SEED", "junk")
    assert run(capsys, *argv)[0] == 2


def test_table(capsys):
    argv = ("table", "--n-min", "2", "--n-max", "3", "--samples", "20000", "--seed", "3", "--csv")
    code, out, _ = run(capsys, *argv)
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "table,family,v2,d2,v3,d3"
    assert len(lines) == 1 + 2 * 9
    rows = {tuple(line.split(",")[:2]): line.split(",")[2:] for line in lines[1:]}
    assert rows["normalized", "lambda"][0] == "0.333333333333"
    assert rows["raw", "lambda"][1] == ""
    assert rows["raw", "srs"][1] == "" and rows["raw", "po"][1] != ""
    assert run(capsys, "table", "--n-max", "8")[0] == 2


def test_bounds_command(capsys):
    code, out, _ = run(capsys, "bounds", "--rates", "4/27,4/27,4/27")
    res = json.loads(out)["results"]
    assert code == 0 and res["class"] == "Boundary"
    assert res["families"]["pi_star"] and res["families"]["si"] and res["families"]["ei"]
    res = json.loads(run(capsys, "bounds", "--rates", "1,0")[1])["results"]
    assert res["class"] == "Boundary" and res["families"]["so"] and res["families"]["eo"]
    res = json.loads(run(capsys, "bounds", "--rates", "0.4,0.4")[1])["results"]
    assert res["class"] == "Exterior" and not res["families"]["po"]
    assert not any(res["families"][k] for k in ("srs", "pi_star", "si", "ei"))
    assert res["flags"] == []


def test_boundary_cloud(capsys):
    code, out, _ = run(capsys, "boundary-cloud", "--n", "2", "--density", "101", "--csv")
    lines = out.splitlines()
    assert code == 0 and lines[0] == "x1,x2" and len(lines) == 102
    assert "0.0625,0.5625" in lines and "0.25,0.25" in lines
    pts = json.loads(run(capsys, "boundary-cloud", "--n", "3", "--density", "5")[1])["results"]["points"]
    assert len(pts) == 15


def test_probe_commands(capsys):
    code, out, _ = run(capsys, "probe", "sandwich", "--n", "3", "--samples", "100000", "--seed", "1")
    assert code == 0 and json.loads(out)["results"]["violations"] == 0
    code, out, _ = run(capsys, "probe", "monotonicity", "--family", "ei", "--n", "3", "--c", "1.0,2.0,4.0")
    assert code == 0
    code, out, _ = run(capsys, "probe", "convexity", "--rates", "0.25,0.2", "--trials", "1000")
    assert code == 0 and json.loads(out)["results"]["checks"] == 9000
    assert run(capsys, "probe", "pseudoconvexity", "--n", "4", "--trials", "200")[0] == 0
    assert run(capsys, "probe", "sublevel", "--rates", "0.2,0.15,0.1", "--index", "2",
               "--level", "0.05", "--trials", "100")[0] == 0
    assert run(capsys, "probe", "convexity", "--trials", "10")[0] == 2


def test_probe_violation_exit_code(capsys, monkeypatch):
    import aloha_region.properties as props
    real = props.sandwich_suite

    def broken(X, c=2.0):
        rep = real(X, c)
        rep.violations["srs"] = 1
        return rep

    monkeypatch.setattr(props, "sandwich_suite", broken)
    assert run(capsys, "probe", "sandwich", "--n", "2", "--samples", "100")[0] == 5
