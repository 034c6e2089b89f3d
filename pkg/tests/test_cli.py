import json
import math
import subprocess
import sys

import numpy as np
import pytest

from pcone.cli import main
from pcone.io import load_matrix, loads_matrix, save_matrix


@pytest.fixture
def files(tmp_path):
    def write(name, A):
        path = tmp_path / f"{name}.json"
        save_matrix(path, np.asarray(A, dtype=complex))
        return str(path)

    return write


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_dist_closed_form(capsys, files):
    a, b = files("a", np.diag([1.0, 4.0])), files("b", np.diag([4.0, 1.0]))
    code, out, _ = run(capsys, "dist", a, b, "--p", "2")
    assert code == 0
    assert float(out) == pytest.approx(math.sqrt(2) * math.log(4), abs=1e-14)


def test_dist_inf(capsys, files):
    a, b = files("a", np.diag([1.0, 4.0])), files("b", np.diag([4.0, 1.0]))
    _, out, _ = run(capsys, "dist", a, b, "--p", "inf")
    assert float(out) == pytest.approx(math.log(4), abs=1e-14)


def test_output_has_17_digits(capsys, files):
    a, b = files("a", np.diag([1.0, 2.0])), files("b", np.diag([3.0, 1.0]))
    _, out, _ = run(capsys, "dist", a, b)
    assert len(out.strip().replace(".", "").lstrip("0")) >= 16


def test_geodesic_midpoint(capsys, files):
    a, b = files("a", np.eye(2)), files("b", np.diag([4.0, 9.0]))
    code, out, _ = run(capsys, "geodesic", a, b, "--t", "0.5")
    assert code == 0
    M = loads_matrix(out)
    assert np.allclose(M, np.diag([2.0, 3.0]), atol=1e-13)


def test_geodesic_samples_csv(capsys, files):
    a, b = files("a", np.eye(2)), files("b", np.diag([4.0, 9.0]))
    _, out, _ = run(capsys, "geodesic", a, b, "--samples", "5")
    lines = out.strip().splitlines()
    assert lines[0] == "t,dist_from_a,dist_to_b" and len(lines) == 6
    rows = np.array([[float(x) for x in line.split(",")] for line in lines[1:]])
    total = rows[0, 2]
    assert np.allclose(rows[:, 1] + rows[:, 2], total, atol=1e-12)
    assert np.allclose(rows[:, 1], rows[:, 0] * total, atol=1e-12)


def test_logmap(capsys, files):
    a, b = files("a", np.diag([2.0, 1.0])), files("b", np.diag([2.0 * math.e, 1.0]))
    _, out, _ = run(capsys, "logmap", a, b)
    assert np.allclose(loads_matrix(out), np.diag([2.0, 0.0]), atol=1e-13)


def test_factorize_diagonal_g(capsys, files):
    g = files("g", np.diag([2.0, 3.0, 5.0]))
    code, out, _ = run(capsys, "factorize", g, "--p", "2")
    assert code == 0
    doc = json.loads(out)
    assert set(doc) >= {"g_A", "v", "u", "s", "residual"}
    v = np.array(doc["v"]["re"]) + 1j * np.array(doc["v"]["im"])
    assert np.abs(v).max() < 1e-12


def test_factorize_blocks_and_trace(capsys, files, rng):
    g = files("g", rng.standard_normal((4, 4)) + 4 * np.eye(4))
    code, out, err = run(capsys, "factorize", g, "--partition", "0,1|2,3", "--trace")
    assert code == 0
    v = json.loads(out)["v"]
    V = np.array(v["re"]) + 1j * np.array(v["im"])
    assert np.abs(V[:2, :2]).max() < 1e-8 and np.abs(V[2:, 2:]).max() < 1e-8
    assert err.startswith("iteration,norm_v,residual")


def test_factorize_keeps_nonhermitian_input(capsys, tmp_path):
    path = tmp_path / "g.json"
    path.write_text(json.dumps({"n": 2, "re": [[1.0, 2.0], [0.0, 1.0]], "im": [[0.0, 0.0], [0.0, 0.0]]}))
    _, out, _ = run(capsys, "factorize", str(path))
    doc = json.loads(out)
    f = {k: np.array(doc[k]["re"]) + 1j * np.array(doc[k]["im"]) for k in ("g_A", "v", "u")}
    w, U = np.linalg.eigh(f["v"])
    g = f["g_A"] @ (U * np.exp(w)) @ U.conj().T @ f["u"]
    assert np.allclose(g, [[1, 2], [0, 1]], atol=1e-10)


def test_project_diag(capsys, files):
    x = files("x", np.diag([2.0, 7.0]))
    code, out, _ = run(capsys, "project", x, "--submanifold", "diag")
    doc = json.loads(out)
    assert code == 0 and doc["value"] == pytest.approx(0.0, abs=1e-9)


def test_project_blocks(capsys, files, rng):
    A = rng.standard_normal((4, 4))
    x = files("x", A @ A.T + np.eye(4))
    code, out, _ = run(capsys, "project", x, "--submanifold", "blocks:0,1|2,3")
    assert code == 0 and json.loads(out)["first_order_gap"] >= -1e-6


def test_project_bad_submanifold(capsys, files):
    x = files("x", np.eye(2))
    code, _, err = run(capsys, "project", x, "--submanifold", "nope")
    assert code == 5 and err.count("\n") == 1


def test_circumcenter_two_points(capsys, files):
    a, b = files("a", np.eye(2)), files("b", np.diag([4.0, 9.0]))
    _, out, _ = run(capsys, "circumcenter", a, b)
    doc = json.loads(out)
    c = np.array(doc["center"]["re"])
    assert np.allclose(c, np.diag([2.0, 3.0]), atol=1e-6)
    assert doc["radius"] == pytest.approx(0.5 * math.hypot(math.log(4), math.log(9)), abs=1e-6)


def test_curvature_commuting(capsys, files):
    x, v, w = files("x", np.eye(2)), files("v", np.diag([1.0, 0.0])), files("w", np.diag([0.0, 1.0]))
    _, out, _ = run(capsys, "curvature", x, v, w)
    doc = json.loads(out)
    assert abs(doc["limit"]) < 1e-6 and doc["estimate"] <= 1e-9


def test_verify_zero_trials(capsys):
    code, out, _ = run(capsys, "verify", "--suite", "emi", "--trials", "0")
    summary = json.loads(out.strip().splitlines()[-1])["summary"]
    assert code == 0 and summary["checks"] == 0 and summary["pass"] is True


def test_verify_csv_and_trace(capsys):
    code, out, err = run(capsys, "verify", "--suite", "cpr", "--trials", "2", "--n", "3", "--format", "csv", "--trace")
    assert code == 0
    assert out.startswith("suite,trial,name") and err.startswith("suite,trial,solver")


def test_verify_deterministic(capsys):
    args = ("verify", "--suite", "emi", "--trials", "10", "--seed", "7")
    assert run(capsys, *args)[1] == run(capsys, *args)[1]


@pytest.mark.parametrize(
    "argv",
    [
        ("verify", "--tol", "-1"),
        ("verify", "--suite", "nope"),
        ("verify", "--trials", "-3"),
        ("dist",),
        ("frobnicate",),
        ("dist", "a", "b", "--p", "0.5"),
    ],
)
def test_usage_errors(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 5
    assert err.strip() and err.count("\n") == 1


def test_missing_file(capsys, files, tmp_path):
    a = files("a", np.eye(2))
    code, _, err = run(capsys, "dist", a, str(tmp_path / "missing.json"))
    assert code == 2 and "missing.json" in err


@pytest.mark.parametrize(
    "text",
    ["{not json", '{"n": 2, "re": [[1]], "im": [[0]]}', '{"re": [[1]]}', '[1, 2]'],
)
def test_malformed_file(capsys, files, tmp_path, text):
    a = files("a", np.eye(2))
    bad = tmp_path / "bad.json"
    bad.write_text(text)
    code, _, _ = run(capsys, "dist", a, str(bad))
    assert code == 3


def test_dimension_mismatch(capsys, files):
    code, _, _ = run(capsys, "dist", files("a", np.eye(2)), files("b", np.eye(3)))
    assert code == 4


def test_not_positive_definite(capsys, files):
    code, _, err = run(capsys, "dist", files("a", np.eye(2)), files("b", np.diag([1.0, -1.0])))
    assert code == 1 and err.strip()


def test_round_trip_bit_exact(tmp_path, rng):
    A = rng.standard_normal((5, 5)) + 1j * rng.standard_normal((5, 5))
    A = A + A.conj().T
    save_matrix(tmp_path / "m.json", A)
    assert np.array_equal(load_matrix(tmp_path / "m.json"), A)


def test_console_entry_point(tmp_path):
    a = tmp_path / "a.json"
    save_matrix(a, np.diag([1.0, 4.0]))
    save_matrix(tmp_path / "b.json", np.diag([4.0, 1.0]))
    res = subprocess.run(
        [sys.executable, "-m", "pcone.cli", "dist", str(a), str(tmp_path / "b.json")],
        capture_output=True,
        text=True,
    )
    assert res.returncode == 0 and abs(float(res.stdout) - 1.9605162869370945) < 1e-12


def test_version(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["--version"])
    assert exc.value.code == 0
    assert "pcone" in capsys.readouterr().out
