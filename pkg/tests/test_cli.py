import json
import subprocess
import sys
from fractions import Fraction as F

import pytest

from horocarnot.algebra import heisenberg
from horocarnot.blowup import PiecewiseLinearFn, assemble_principal, pl_equal
from horocarnot.cli import main
from horocarnot.norms import euclidean, heisenberg_norm

EUCLID_H3 = json.dumps({"group": "H3", "layers": [{"type": "euclidean", "dim": 2}, {"type": "sup", "dim": 1}],
                        "heisenberg_lambda": "1"})


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.mark.parametrize("group,p,q,expected", [
    ("L4", "1,0,0,0", "0,1,0,0", ["1", "1", "1/2", "1/12"]),
    ("H3", "1,0,0", "0,1,0", ["1", "1", "1/2"]),
    ("H3", "1/2,-3,7", "0,0,0", ["1/2", "-3", "7"]),
    ("L4", "1,2,3,4", "-1,-2,-3,-4", ["0", "0", "0", "0"]),
])
def test_mult_golden(capsys, group, p, q, expected):
    code, out, _ = run(capsys, "mult", "--group", group, "--", p, q)
    assert code == 0
    assert json.loads(out)["product"] == expected


def test_mult_csv(capsys):
    code, out, _ = run(capsys, "mult", "--group", "H3", "1,0,0", "0,1,0", "--format", "csv")
    assert out == "product,1,1,1/2\n"


def test_group_file(capsys, tmp_path):
    path = tmp_path / "g.json"
    path.write_text(json.dumps(heisenberg(2).to_config()))
    code, out, _ = run(capsys, "mult", "--group", str(path), "1,0,0,0,0", "0,0,1,0,0")
    assert json.loads(out)["product"] == ["1", "0", "1", "0", "1/2"]


def test_pansu_x3_face(capsys):
    code, out, _ = run(capsys, "pansu", "--group", "L5", "--point", "1/3,-1/2,1,0,0")
    assert code == 0
    payload = json.loads(out)
    f = PiecewiseLinearFn.from_config(payload["principal"])
    assert f.pieces[0].coeffs == (F(1, 8), F(1, 12))


def test_pansu_seam_round_trip(capsys):
    code, out, _ = run(capsys, "pansu", "--group", "H3", "--norm", EUCLID_H3, "--point", "3/5,4/5,1")
    payload = json.loads(out)
    assert payload["face"]["label"] == "ceiling-seam"
    f = PiecewiseLinearFn.from_config(payload["principal"])
    norm = heisenberg_norm(heisenberg(1), euclidean(2), 1)
    assert pl_equal(f, assemble_principal(norm, (F(3, 5), F(4, 5), F(1))).principal)
    assert len(f.pieces) == 2


def test_norm_and_classify(capsys):
    code, out, _ = run(capsys, "norm", "--group", "H3", "--point", "0,0,4")
    assert json.loads(out)["norm_exact"] == "2"
    code, out, _ = run(capsys, "classify", "--group", "H3", "--norm", EUCLID_H3, "--point", "1,0,1")
    assert json.loads(out)["label"] == "ceiling-seam"


@pytest.mark.parametrize("argv", [
    ["pansu", "--group", "H3", "--point", "2,0,0"],
    ["mult", "--group", "H3", "1,0", "x"],
    ["mult", "--group", "H4", "1,0", "0,1"],
    ["mult", "--group", "{not json", "1", "1"],
    ["norm", "--group", "H3", "--norm", "/nonexistent/norm.json", "--point", "1,0,0"],
])
def test_bad_input_exit_2(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2
    assert err.startswith("error:")


def test_blowup_translate(capsys):
    code, out, _ = run(capsys, "blowup", "--group", "H3", "--norm", EUCLID_H3, "--point", "3/5,4/5,1",
                       "--translate", "inf,0")
    f = PiecewiseLinearFn.from_config(json.loads(out)["function"])
    assert f.pieces[0].coeffs == (F(-1, 5), F(3, 20))
    code, out, _ = run(capsys, "blowup", "--group", "R2", "--point", "1/2,0", "--set")
    assert json.loads(out)["kind"] == "all"


def test_heis_boundary(capsys):
    code, out, _ = run(capsys, "heis-boundary", "--first-layer", "euclidean:2", "--lambda", "4")
    payload = json.loads(out)
    assert payload["topology_label"].startswith("non-separated")
    assert payload["critical"]["critical_lambda_squared"] == "16"
    code, out, _ = run(capsys, "heis-boundary", "--n", "2", "--lambda", "1/2")
    payload = json.loads(out)
    assert payload["dimension"] == 4 and payload["topology_label"] == "button-pillow"


def test_filiform_dim(capsys):
    code, out, _ = run(capsys, "filiform-dim", "--n", "5")
    payload = json.loads(out)
    assert payload["dimension"] == 4 and payload["full_dimensional"]
    assert payload["witness"] == {"fixed": [3, 5], "free": [1, 2, 4]}
    code, out, _ = run(capsys, "filiform-dim", "--n", "3", "--to", "5", "--format", "csv")
    assert out.splitlines()[0] == "n,dimension,expected,witness"
    assert len(out.splitlines()) == 4


def test_verify_exit_codes(capsys, tmp_path):
    code, out, _ = run(capsys, "verify", "--group", "H3", "--norm", EUCLID_H3, "--point", "1/2,0,1")
    assert code == 0 and json.loads(out)["passed"]
    wrong = tmp_path / "f.json"
    wrong.write_text(json.dumps(PiecewiseLinearFn.linear((F(1, 10), F(1, 8)), (0, 1)).to_config()))
    code, out, _ = run(capsys, "verify", "--group", "H3", "--norm", EUCLID_H3, "--point", "1/2,0,1",
                       "--function", str(wrong))
    assert code == 1
    code, out, _ = run(capsys, "verify", "--mode", "embedding", "--group", "H3", "--norm", EUCLID_H3,
                       "--point", "1/2,0,1")
    assert code == 0
    code, out, _ = run(capsys, "verify", "--mode", "kuratowski", "--example", "shifted-base-5")
    assert code == 0
    code, _, _ = run(capsys, "verify", "--mode", "kuratowski", "--example", "nope")
    assert code == 2


def test_rescale(capsys):
    code, out, _ = run(capsys, "rescale", "--group", "H3", "--budget", "2000")
    payload = json.loads(out)
    assert code == 0 and payload["verified"] and payload["seed"] == 0


def test_out_file_and_determinism(capsys, tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for path in (a, b):
        assert main(["heis-boundary", "--first-layer", "sup", "--seed", "3", "--out", str(path)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_report(capsys, tmp_path):
    code, out, _ = run(capsys, "report", "heis", "--out-dir", str(tmp_path / "h"), "--samples", "300")
    assert code == 0
    files = json.loads(out)["files"]
    for name in files:
        assert (tmp_path / "h" / name).stat().st_size > 0
    rows = (tmp_path / "h" / "sphere.csv").read_text().splitlines()
    assert rows[0] == "x1,x2,x3,region" and len(rows) == 301
    code, out, _ = run(capsys, "report", "filiform", "--out-dir", str(tmp_path / "f"), "--max-n", "5")
    summary = json.loads((tmp_path / "f" / "summary.json").read_text())
    assert [r["dimension"] for r in summary["table"]] == [2, 3, 4]
    assert (tmp_path / "f" / "filiform_dims.png").read_bytes()[:4] == b"\x89PNG"


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "horocarnot", "mult", "--group", "H3", "1,0,0", "0,1,0",
                          "--format", "csv"], capture_output=True, text=True)
    assert res.returncode == 0 and res.stdout == "product,1,1,1/2\n"
