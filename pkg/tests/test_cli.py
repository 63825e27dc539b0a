import json

import pytest

from windmill.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_matrix(capsys):
    code, out, _ = run(capsys, "matrix", "--m", "3")
    assert code == 0 and json.loads(out) == [["3", "0"], ["1", "2"]]
    code, out, _ = run(capsys, "matrix", "--m", "4")
    assert json.loads(out) == [["3", "0", "0"], ["0", "3", "0"], ["1", "0", "2"]]


def test_matrix_rejects_zero(capsys):
    code, _, err = run(capsys, "matrix", "--m", "0")
    assert code == 2 and "error" in err


@pytest.mark.parametrize("argv, code", [
    (["--kind", "atmost", "--k", "7", "--arity", "12"], 0),
    (["--kind", "atleast", "--k", "3", "--arity", "11"], 1),
    (["--values", "3,1,1,1,1"], 0),
    (["--values", "4,1,1,1,1"], 1),
    (["--kind", "edge", "--w", "7/2"], 0),
])
def test_windcheck_exit_codes(capsys, argv, code):
    got, out, _ = run(capsys, "windcheck", *argv)
    assert got == code
    report = json.loads(out)
    assert report["verdict"] == ("Windable" if code == 0 else "NotWindable")


def test_windcheck_report_order(capsys):
    _, out, _ = run(capsys, "windcheck", "--kind", "atleast", "--k", "3", "--arity", "11")
    report = json.loads(out)
    assert list(report) == ["function", "verdict", "counterexample", "per_pinning"]
    keys = [(r["zeros"], r["ones"]) for r in report["per_pinning"]]
    assert keys == sorted(keys)
    assert report["counterexample"] == {"zeros": 0, "ones": 0}
    assert report["per_pinning"][0]["solution"] == ["0", "0", "0", "1/5040", "1/5040", "-1/10080"]


def test_windcheck_malformed(capsys):
    code, _, _ = run(capsys, "windcheck", "--values", "1,-2")
    assert code == 2
    code, _, _ = run(capsys, "windcheck", "--kind", "atmost", "--k", "1")
    assert code == 2


def test_windcheck_figure(capsys, tmp_path):
    fig = tmp_path / "sol.png"
    run(capsys, "windcheck", "--values", "4,1,1,1,1", "--figure", str(fig))
    assert fig.stat().st_size > 0


@pytest.mark.parametrize("fixture", ["triangle-matching-1", "triangle-edge-cover-1"])
def test_oracle(capsys, fixture):
    code, out, _ = run(capsys, "oracle", "--fixture", fixture)
    data = json.loads(out)
    assert code == 0 and data["Z"]["0"] == "4"
    assert data["ratio_within_bound"] is True and data["ratio_bound"] == "36"


def test_oracle_from_file(capsys, tmp_path):
    path = tmp_path / "g.json"
    path.write_text(json.dumps({"vertices": [0, 1, 2], "edges": [[0, 1], [1, 2], [0, 2]]}))
    code, out, _ = run(capsys, "oracle", "--input", str(path), "--problem", "matching", "--b", "1", "--k", "0")
    assert json.loads(out)["Z"] == {"0": "4"}


def test_count_triangle(capsys, tmp_path):
    out_path = tmp_path / "a.json"
    code, _, _ = run(capsys, "count", "--fixture", "triangle-matching-1", "--epsilon", "0.1",
                     "--seed", "42", "--output", str(out_path))
    assert code == 0
    est = json.loads(out_path.read_text())
    assert 3.6 <= float(est["estimate_decimal"]) <= 4.4


def test_count_is_byte_identical(capsys):
    a = run(capsys, "count", "--fixture", "triangle-matching-1", "--seed", "42")[1]
    b = run(capsys, "count", "--fixture", "triangle-matching-1", "--seed", "42")[1]
    assert a == b


def test_count_rejects_b8(capsys, tmp_path):
    path = tmp_path / "star.json"
    path.write_text(json.dumps({"edges": [[0, i] for i in range(1, 12)]}))
    code, _, err = run(capsys, "count", "--input", str(path), "--problem", "matching", "--b", "8")
    assert code == 2 and "not windable" in err


def test_count_exact_marginals_and_figure(capsys, tmp_path):
    fig = tmp_path / "m.png"
    code, out, _ = run(capsys, "count", "--fixture", "k4-matching-2", "--exact-marginals", "--oracle",
                       "--figure", str(fig))
    data = json.loads(out)
    assert data["estimate"] == data["oracle"] == "41"
    assert fig.exists()


def test_sample_diagnostics(capsys, tmp_path):
    traj = tmp_path / "t.ndjson"
    fig = tmp_path / "tv.png"
    code, out, _ = run(capsys, "sample", "--fixture", "triangle-matching-1", "--burn-in", "30",
                       "--seed", "1", "--trajectory", str(traj), "--figure", str(fig), "--tv-steps", "20")
    data = json.loads(out)
    assert code == 0
    assert data["diagnostics"]["stationary_check"] == "exact-pass"
    assert data["diagnostics"]["states"] == 13
    lines = traj.read_text().splitlines()
    assert len(lines) == 31
    assert list(json.loads(lines[-1])) == ["step", "assignment", "weight"]
    assert json.loads(lines[-1])["assignment"] == data["assignment"]
    assert fig.exists()


def test_sample_zero_burn_in(capsys):
    _, out, _ = run(capsys, "sample", "--fixture", "triangle-edge-cover-1", "--burn-in", "0", "--tv-steps", "0")
    data = json.loads(out)
    assert data["assignment"] == data["start"] == "3f"


@pytest.mark.parametrize("suite", ["rowsums", "com", "pdecom", "detailed-balance", "z2bound"])
def test_verify_suites_pass(capsys, suite):
    code, out, _ = run(capsys, "verify", suite)
    assert code == 0
    assert "FAIL" not in out


def test_verify_unknown_suite():
    with pytest.raises(SystemExit) as exc:
        main(["verify", "nope"])
    assert exc.value.code == 2
