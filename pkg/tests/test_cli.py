import csv
import json

import numpy as np
import pytest

from walshlab.cli import main
from walshlab.dyadic import signal_to_json


@pytest.fixture
def files(tmp_path, rng):
    def write(name, obj):
        p = tmp_path / name
        p.write_text(json.dumps(obj))
        return str(p)

    return {
        "f": write("f.json", signal_to_json(rng.standard_normal(256))),
        "g": write("g.json", signal_to_json(rng.standard_cauchy(256))),
        "small": write("small.json", signal_to_json(rng.standard_normal(64))),
        "atom": write("atom.json", {"q": 1.5, "J": 2, "blocks": [{"k": 3, "intervals": [[4, 6], [7, 8]]},
                                                                 {"k": 7, "intervals": [[70, 100]]}]}),
        "symbol": write("symbol.json", {"pieces": [{"a": 1, "b": 9, "c": 2.0}]}),
        "broken": write("broken.json", {"pieces": [{"a": 9, "b": 1, "c": 2.0}]}),
        "dir": tmp_path,
    }


def test_transform_roundtrip(files):
    d = files["dir"]
    for extra in ([], ["--haar"]):
        assert main(["--N", "8", "transform", "--in", files["f"], "--out", str(d / "s.json"), *extra]) == 0
        assert main(["transform", "--inverse", *extra, "--in", str(d / "s.json"), "--out", str(d / "b.json")]) == 0
        a = json.load(open(files["f"]))["values"]
        b = json.load(open(d / "b.json"))["values"]
        assert np.abs(np.array(a) - b).max() <= 1e-12


def test_apply(files):
    out = files["dir"] / "a.json"
    assert main(["apply", "--multiplier", files["symbol"], "--in", files["f"], "--out", str(out)]) == 0
    assert json.load(open(out))["N"] == 8


def test_input_errors(files):
    assert main(["--N", "9", "apply", "--multiplier", files["symbol"], "--in", files["f"]]) == 1
    assert main(["apply", "--multiplier", files["broken"], "--in", files["f"]]) == 1
    assert main(["certify-multiplier", "--f", files["f"], "--phi", files["small"],
                 "--multiplier", files["atom"], "--q", "1.5"]) == 1
    assert main(["certify-multiplier", "--f", files["f"], "--phi", files["g"],
                 "--multiplier", files["symbol"], "--q", "1.5"]) == 1
    assert main(["apply", "--multiplier", str(files["dir"] / "missing.json"), "--in", files["f"]]) == 1
    assert main(["nonsense"]) == 1


def test_certify_multiplier(files):
    out = files["dir"] / "c.json"
    code = main(["--N", "8", "certify-multiplier", "--f", files["f"], "--phi", files["g"],
                 "--multiplier", files["atom"], "--q", "1.5", "--out", str(out)])
    cert = json.load(open(out))
    assert code == (0 if not cert["violations"] else 2)
    assert cert["collection"][0][0] == {"level": 0, "index": 0}


def test_certify_square(files):
    out = files["dir"] / "c.json"
    assert main(["certify-square", "--f", files["f"], "--g", files["g"], "--lambda", "3",
                 "--r", "1.5", "--out", str(out)]) == 0
    cert = json.load(open(out))
    assert cert["kappa"] == 6 and set(cert["parts"]) == {"martingale", "right", "left"}


def test_lowerbound_deterministic(files):
    a, b = files["dir"] / "a.json", files["dir"] / "b.json"
    assert main(["lowerbound", "--n", "8", "--out", str(a)]) == 0
    assert main(["lowerbound", "--n", "8", "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    assert json.load(open(a))["pairing"] == -8 * 2.0 ** -8


@pytest.mark.parametrize("kind", ["zygmund", "cww", "weights", "qscaling"])
def test_scans(files, kind):
    cfg = files["dir"] / "cfg.json"
    cfg.write_text(json.dumps({"N": 8, "trials": 1, "q_grid": [2.0], "ns": [4]}))
    out = files["dir"] / "out.csv"
    assert main(["scan", "--kind", kind, "--config", str(cfg), "--out", str(out)]) == 0
    rows = list(csv.reader(open(out, newline="")))
    assert len(rows) > 1 and all(len(r) == len(rows[0]) for r in rows)


def test_selftest_quick(capsys):
    assert main(["selftest", "--level", "quick"]) == 0
    assert capsys.readouterr().out.count("PASS") == 7
