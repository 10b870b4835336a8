import json

import pytest

from cubecrux import io as cio
from cubecrux.cli import main
from cubecrux.generators import gen_grid, tree_ball


def run(capsys, *argv):
    code = main(list(argv))
    return code, json.loads(capsys.readouterr().out)


@pytest.fixture
def files(tmp_path):
    g = tmp_path / "grid.json"
    g.write_text(cio.dumps(cio.chart_to_json(gen_grid([2, 2]))))
    b = tmp_path / "tree.json"
    b.write_text(cio.dumps(cio.ball_to_json(tree_ball(5))))
    phi = tmp_path / "phi.json"
    pairs = [[f"{i},{j}", f"{j},{i}"] for i in range(3) for j in range(3) if (i, j) != (1, 1)]
    phi.write_text(cio.dumps({"pairs": pairs}))
    return {"grid": str(g), "tree": str(b), "phi": str(phi), "dir": tmp_path}


def test_chart_commands(capsys, files):
    code, out = run(capsys, "median", "--chart", files["grid"], "--x", "0,0", "--y", "2,2", "--z", "0,2")
    assert code == 0 and out["median"] == "0,2"
    code, out = run(capsys, "cr", "--chart", files["grid"], "--points", "0,0;2,2;0,2;2,0")
    assert code == 0
    code, out = run(capsys, "validate", "--chart", files["grid"])
    assert code == 0


def test_ball_commands(capsys, files):
    code, out = run(capsys, "length", "--ball", files["tree"], "--g", "ab")
    assert code == 0 and out["length"] == "2"
    code, out = run(capsys, "crfromell", "--ball", files["tree"], "--g", "ab", "--h", "bc", "--nmax", "4")
    assert out["s_stable"] == "2" and out["c_stable"] == "-1"


def test_extend_with_oracle(capsys, files):
    code, out = run(capsys, "extend", "--x", files["grid"], "--y", files["grid"], "--phi", files["phi"], "--oracle")
    assert code == 0 and out["oracle_agrees"] and out["map"]["2,1"] == "1,2"


def test_error_codes(capsys, files):
    code, out = run(capsys, "median", "--chart", files["grid"], "--x", "0,0", "--y", "9,9", "--z", "0,2")
    assert code == 1 and out["error"] and out["type"] == "UnknownVertex"
    bad = files["dir"] / "bad.json"
    bad.write_text('{"hyperplanes": [{"id": "a", "weight": "0"}], "vertices": [{"id": "x", "signs": {"a": "+"}}]}')
    code, out = run(capsys, "validate", "--chart", str(bad))
    assert code == 1 and out["type"] == "NonPositiveWeight"
    with pytest.raises(SystemExit) as info:
        main(["median", "--chart", files["grid"]])
    assert info.value.code == 2
    code, out = run(capsys, "accept", "nonsense")
    assert code == 1 and out["type"] == "UnknownSuite"


def test_manifest_is_deterministic(capsys, files, monkeypatch):
    paths = [files["dir"] / f"m{i}.json" for i in range(2)]
    for p in paths:
        run(capsys, "gen", "random", "--walls", "6", "--seed", "3", "--manifest", str(p))
    a, b = (json.loads(p.read_text()) for p in paths)
    assert a == b and a["seed"] == 3 and a["subcommand"] == "gen"
    monkeypatch.setenv("CUBECRUX_SEED", "3")
    _, out3 = run(capsys, "gen", "random", "--walls", "6")
    monkeypatch.delenv("CUBECRUX_SEED")
    _, out0 = run(capsys, "gen", "random", "--walls", "6", "--seed", "3")
    assert out3 == out0


def test_accept_fig1(capsys):
    code, out = run(capsys, "accept", "fig1")
    assert code == 0 and out["passed"]
