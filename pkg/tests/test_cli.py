import json

import pytest

from gapcert.cli import eval_angle, main
from gapcert.group import free_abelian, parse_element


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def test_complex_build(capsys, fixtures_dir, tmp_path):
    code, out, _ = run(capsys, "complex", "build", "--group", fixtures_dir / "z2.json", "--check",
                       "--out", tmp_path / "z2c.json")
    assert code == 0 and "d1*d0 = 0 verified" in out
    assert json.loads((tmp_path / "z2c.json").read_text())["dims"] == [1, 2, 1]
    code, out, _ = run(capsys, "complex", "build", "--koszul", 3, "--check")
    assert code == 0 and json.loads(out.splitlines()[-1])["dims"] == [1, 3, 3, 1]


def test_bad_complex_exit_code(capsys, fixtures_dir):
    code, _, err = run(capsys, "complex", "build", "--group", fixtures_dir / "bad.json")
    assert code == 2 and "1 - s^2" in err


def test_missing_file(capsys, tmp_path):
    code, _, err = run(capsys, "laplacian", "show", "--complex", tmp_path / "nope.json",
                       "--degree", 0)
    assert code == 2 and err


def test_laplacian_show(capsys, fixtures_dir):
    code, out, _ = run(capsys, "laplacian", "show", "--complex", fixtures_dir / "z.json",
                       "--degree", 0)
    (entry,), = json.loads(out)["rows"]
    assert code == 0 and parse_element(free_abelian(1), entry) == \
        parse_element(free_abelian(1), "2 - s - s^-1")


def test_certify_and_verify(capsys, fixtures_dir, tmp_path):
    cert = tmp_path / "c4cert.json"
    code, out, _ = run(capsys, "certify", "--complex", fixtures_dir / "c4.json", "--form",
                       "gap_plus", "--degree", 1, "--radius", "full", "--out", cert)
    summary = json.loads(out)
    assert code == 0 and summary["status"] == "Exact"
    assert abs(summary["lambda_float"] - 2) <= 0.05
    code, out, _ = run(capsys, "verify", cert, "--complex", fixtures_dir / "c4.json")
    assert code == 0 and out.startswith("Exact")
    code, _, _ = run(capsys, "verify", cert, "--complex", fixtures_dir / "s3.json")
    assert code == 4


def test_certify_no_gap(capsys, fixtures_dir, tmp_path):
    code, out, _ = run(capsys, "certify", "--complex", fixtures_dir / "z.json", "--form",
                       "gap_plus", "--degree", 1, "--radius", 3, "--out", tmp_path / "z.json")
    summary = json.loads(out)
    assert code == 0 and summary["objective"] <= 0.01 and summary["lambda_float"] < 0.05


def test_explore_homology(capsys, fixtures_dir, tmp_path):
    code, out, _ = run(capsys, "explore", "homology", "--complex", fixtures_dir / "z2.json",
                       "--degree", 1, "--radius", 2)
    rep = json.loads(out)
    assert code == 0
    assert rep["summary"]["proven_outside_im_D"] >= 1
    z2 = free_abelian(2)
    target = parse_element(z2, "2 - t - t^-1")
    assert any(parse_element(z2, row["element"][0][0]) == target and row["im_D"] ==
               "proven_infeasible" for row in rep["table"])


def test_explore_sc_is_deterministic(capsys, fixtures_dir, tmp_path):
    outs = []
    for name in ("a.json", "b.json"):
        code, out, err = run(capsys, "explore", "sc", "--complex", fixtures_dir / "koszul3.json",
                             "--i", 2, "--samples", 20, "--seed", 7, "--out", tmp_path / name)
        assert code == 0 and "20/20 decomposed" in err
        outs.append((tmp_path / name).read_bytes())
    assert outs[0] == outs[1]
    code, out, _ = run(capsys, "explore", "sc", "--complex", fixtures_dir / "koszul3.json",
                       "--i", 2)
    assert json.loads(out)["table"] == []


def test_oracle_eig(capsys, fixtures_dir):
    code, out, _ = run(capsys, "oracle", "eig", "--complex", fixtures_dir / "c4.json",
                       "--degree", 1)
    rep = json.loads(out)
    assert code == 0 and rep["gap"] == pytest.approx(2) and rep["kernel_dim"] == 0
    code, out, _ = run(capsys, "oracle", "eig", "--complex", fixtures_dir / "z2.json",
                       "--degree", 1, "--theta", "pi,pi")
    assert json.loads(out)["kernel_dim"] == 0


def test_gns_and_extend(capsys, fixtures_dir, tmp_path):
    fn = tmp_path / "psi.json"
    fn.write_text(json.dumps({"k": 1, "hermitian": True, "radius": 1,
                              "entries": [{"i": 0, "j": 0, "word": "e", "value": "1"}]}))
    code, out, _ = run(capsys, "gns", "run", "--functional", fn, "--complex",
                       fixtures_dir / "c2.json", "--radius", 1)
    rep = json.loads(out)
    assert code == 0 and rep["dim"] == 2 and rep["reproduction_error"] <= 1e-8
    zero = tmp_path / "zero.json"
    zero.write_text(json.dumps({"k": 1, "entries": []}))
    code, out, _ = run(capsys, "functional", "extend", "--functional", zero, "--complex",
                       fixtures_dir / "c4.json", "--degree", 1)
    assert code == 0 and json.loads(out)["verdict"] == "ExtensionFound"


def test_angles():
    assert eval_angle("pi/2") == pytest.approx(1.5707963267948966)
    assert eval_angle("-pi") == pytest.approx(-3.141592653589793)
    assert eval_angle("0.5") == 0.5
