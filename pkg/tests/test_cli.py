import json
from pathlib import Path

import numpy as np
import pytest

from planks.cli import davenport_table, main

ROOT = Path(__file__).resolve().parents[1]
CORPUS = sorted((ROOT / "corpus").glob("*.json"))
DATA = Path(__file__).parent / "data"


def write(path, obj):
    path.write_text(json.dumps(obj))
    return str(path)


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def solve_to(capsys, tmp_path, instance, name="sol.json", *flags):
    out = tmp_path / name
    code, _, err = run(capsys, "solve", instance, "-o", out, *flags)
    assert code == 0, err
    return out


def test_solve_identity(capsys):
    code, out, _ = run(capsys, "solve", ROOT / "corpus" / "identity2.json")
    assert code == 0
    sol = json.loads(out)
    np.testing.assert_allclose(np.abs(sol["lambda"]), [0.5, 0.5])
    np.testing.assert_allclose(sol["margins"], [0.5, 0.5])
    assert sol["certificate"] == {"type": "EqualWidth"}


def test_solve_cube_line(capsys):
    code, out, _ = run(capsys, "solve", ROOT / "corpus" / "cube_one_line.json")
    sol = json.loads(out)
    assert code == 0 and sol["ratio"] == 0.5
    assert abs(sol["center"][0]) == pytest.approx(0.5)


def test_solve_verify_nonsymmetric(capsys, tmp_path):
    inst = ROOT / "corpus" / "nonsymmetric2.json"
    out = solve_to(capsys, tmp_path, inst)
    assert min(json.loads(out.read_text())["margins"]) >= 0.5 - 1e-9
    code, text, _ = run(capsys, "verify", inst, out)
    assert code == 0 and text.startswith("feasible: yes")


def test_solution_round_trips_bit_for_bit(capsys, tmp_path):
    inst = ROOT / "corpus" / "equal_n16.json"
    out = solve_to(capsys, tmp_path, inst)
    data = json.loads(out.read_text())
    again = json.loads(json.dumps(data))
    assert again["lambda"] == data["lambda"]


def test_tampered_lambda(capsys, tmp_path):
    inst = ROOT / "corpus" / "identity2.json"
    out = solve_to(capsys, tmp_path, inst)
    data = json.loads(out.read_text())
    data["lambda"][1] = 0.0
    bad = write(tmp_path / "bad.json", data)
    code, text, _ = run(capsys, "verify", inst, bad)
    assert code == 1
    assert "feasible: no" in text and "VIOLATED plank[1]" in text


def test_verify_dimension_mismatch(capsys, tmp_path):
    out = solve_to(capsys, tmp_path, ROOT / "corpus" / "identity2.json")
    code, _, err = run(capsys, "verify", ROOT / "corpus" / "equal_n4.json", out)
    assert code == 3
    assert json.loads(err)["error"]["field"] == "lambda"


def test_malformed_json(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{\n  "kind": "matrix",\n  "A": [[1]\n}')
    code, _, err = run(capsys, "solve", bad)
    assert code == 3
    error = json.loads(err)["error"]
    assert error["code"] == "ParseError" and error["line"] == 4


@pytest.mark.parametrize("obj, field", [
    ({"kind": "matrix", "A": [[1]], "m": [0]}, "w"),
    ({"kind": "matrix", "A": [[1, 0]], "m": [0], "w": [0.5]}, "A[0]"),
    ({"kind": "geometry", "body": {"type": "lp", "p": 0.5, "dim": 2},
      "hyperplanes": [{"normal": [1, 0], "offset": 0}]}, "body.p"),
    ({"kind": "geometry", "body": {"type": "lp", "p": "inf", "dim": 2},
      "hyperplanes": [{"normal": [1], "offset": 0}]}, "hyperplanes[0].normal"),
    ({"kind": "tensor"}, "kind"),
])
def test_parse_errors_name_the_field(capsys, tmp_path, obj, field):
    code, _, err = run(capsys, "solve", write(tmp_path / "x.json", obj))
    assert code == 3
    assert json.loads(err)["error"]["field"] == field


def test_instance_errors_exit_2(capsys, tmp_path):
    not_unit = {"kind": "matrix", "A": [[2, 0], [0, 1]], "m": [0, 0], "w": [0.5, 0.5]}
    code, _, err = run(capsys, "solve", write(tmp_path / "a.json", not_unit))
    assert code == 2 and json.loads(err)["error"]["code"] == "InstanceError"
    null = {"kind": "geometry", "body": {"type": "lp", "p": 2, "dim": 2},
            "hyperplanes": [{"normal": [0, 0], "offset": 1}]}
    code, _, err = run(capsys, "solve", write(tmp_path / "b.json", null))
    assert code == 2 and json.loads(err)["error"]["code"] == "NullNormal"


def test_shrink_boundary(capsys, tmp_path):
    inst = write(tmp_path / "edge.json",
                 {"kind": "matrix", "A": [[1, 0.3], [-0.2, 1]], "m": [0, 0], "w": [0.6, 0.4]})
    code, _, err = run(capsys, "solve", inst)
    assert code == 2 and json.loads(err)["error"]["code"] == "InsufficientSlack"
    # a gap of 1e-6 would need millions of sheets, so only direct weighting is practical
    code, _, err = run(capsys, "solve", inst, "--shrink-boundary")
    assert code == 2 and json.loads(err)["error"]["code"] == "TooLarge"
    out = solve_to(capsys, tmp_path, inst, "sol.json", "--shrink-boundary", "--strategy", "direct")
    assert json.loads(out.read_text())["width_scale"] == 1 - 1e-6
    code, _, _ = run(capsys, "verify", inst, out)
    assert code == 0


def test_direct_strategy_and_fixed_resolution(capsys, tmp_path):
    inst = ROOT / "corpus" / "general_n5.json"
    for flags in (["--strategy", "direct"], ["--sheet-resolution", "640"]):
        out = solve_to(capsys, tmp_path, inst, "sol.json", *flags)
        assert run(capsys, "verify", inst, out)[0] == 0


def test_symmetrize_identity(capsys, tmp_path):
    inst = write(tmp_path / "i.json", {"kind": "matrix", "A": np.eye(3).tolist(),
                                       "m": [0, 0, 0], "w": [0.1] * 3})
    code, out, _ = run(capsys, "symmetrize", inst)
    res = json.loads(out)
    assert code == 0 and res["theta"] == [1.0, 1.0, 1.0] and res["residual"] == 0


def test_symmetrize_nonsymmetric_ratio(capsys):
    code, out, _ = run(capsys, "symmetrize", ROOT / "corpus" / "nonsymmetric2.json")
    theta = json.loads(out)["theta"]
    assert code == 0
    assert theta[0] / theta[1] == pytest.approx(np.sqrt(5 / 8), abs=1e-8)


def test_symmetrize_random_and_null_row(capsys, tmp_path):
    rng = np.random.default_rng(8)
    A = rng.uniform(-1, 1, (8, 8))
    np.fill_diagonal(A, 1)
    inst = write(tmp_path / "r.json", {"kind": "matrix", "A": A.tolist(),
                                       "m": [0] * 8, "w": [0.1] * 8})
    code, out, _ = run(capsys, "symmetrize", inst)
    assert code == 0 and json.loads(out)["residual"] <= 1e-10
    # m and w are ignored, so a null row is only caught by the scaling itself
    A[3, :] = 0
    inst = write(tmp_path / "z.json", {"kind": "matrix", "A": A.tolist(),
                                       "m": [0] * 8, "w": [0.1] * 8})
    code, _, err = run(capsys, "symmetrize", inst)
    assert code == 2 and json.loads(err)["error"]["code"] == "NullRow"


def test_demo_svg(capsys, tmp_path, golden):
    for name, inst in (("cube_one_line", ROOT / "corpus" / "cube_one_line.json"),
                       ("sharpness_n3", ROOT / "corpus" / "sharpness_n3.json"),
                       ("disc_seed7", DATA / "disc_seed7.json")):
        svg = tmp_path / f"{name}.svg"
        code, table, _ = run(capsys, "demo-svg", inst, "--out", svg)
        assert code == 0
        data = svg.read_bytes()
        assert data.startswith(b"<?xml") and b"<svg" in data
        golden(f"{name}.svg", data)
        golden(f"{name}.tsv", table.encode())


def test_demo_svg_deterministic(capsys, tmp_path):
    outs = []
    for k in range(2):
        path = tmp_path / f"run{k}.svg"
        assert run(capsys, "demo-svg", DATA / "disc_seed7.json", "--out", path)[0] == 0
        outs.append(path.read_bytes())
    assert outs[0] == outs[1]


def test_demo_svg_wrong_dimension(capsys, tmp_path):
    code, _, err = run(capsys, "demo-svg", ROOT / "corpus" / "interval.json",
                       "--out", tmp_path / "x.svg")
    assert code == 2 and not (tmp_path / "x.svg").exists()


def test_davenport(capsys, golden, tmp_path):
    code, out, _ = run(capsys, "davenport", "--n", 1)
    assert code == 0 and out.splitlines()[1:] == ["0\t1\t1", "1\t0.5\t0.5"]
    assert davenport_table(5).splitlines()[-1] == "5\t0.03125\t0.1666667"
    rows = [line.split("\t") for line in davenport_table(10).splitlines()[1:]]
    assert all(float(h) > float(c) for n, c, h in rows if int(n) >= 2)
    code, out, _ = run(capsys, "davenport", "--n", 10)
    golden("davenport_10.tsv", out.encode())
    code, out, _ = run(capsys, "davenport", "--n", 3, "--csv", "--figure", tmp_path / "d.svg")
    assert out.splitlines()[0] == "n,davenport,homothet"
    assert (tmp_path / "d.svg").read_bytes().count(b"<svg") == 1
    assert run(capsys, "davenport", "--n", -1)[0] == 2


def test_solve_golden(capsys, golden):
    for name in ("identity2", "nonsymmetric2", "general_n3", "lpinf_d2_n3"):
        code, out, _ = run(capsys, "solve", ROOT / "corpus" / f"{name}.json")
        assert code == 0
        golden(f"solve_{name}.json", out.encode())
    code, out, _ = run(capsys, "symmetrize", ROOT / "corpus" / "nonsymmetric2.json")
    golden("symmetrize_nonsymmetric2.json", out.encode())


@pytest.mark.parametrize("inst", CORPUS, ids=lambda p: p.stem)
def test_corpus_round_trip(capsys, tmp_path, inst):
    out = solve_to(capsys, tmp_path, inst)
    code, text, _ = run(capsys, "verify", inst, out)
    assert code == 0, text


def test_generated_corpus_verifies(capsys, tmp_path):
    rng = np.random.default_rng(500)
    for k in range(500):
        n = int(rng.integers(2, 17))
        A = rng.uniform(-1, 1, (n, n))
        np.fill_diagonal(A, 1)
        inst = write(tmp_path / "inst.json", {"kind": "matrix", "A": A.tolist(),
                                              "m": rng.uniform(-2, 2, n).tolist(),
                                              "w": [1 / n] * n})
        out = solve_to(capsys, tmp_path, inst)
        code, text, _ = run(capsys, "verify", inst, out)
        assert code == 0, (k, text)
