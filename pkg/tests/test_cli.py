import io
import json
import math

import numpy as np
import pytest

from sl2c_semigroups import cli
from sl2c_semigroups import io as tio
from sl2c_semigroups import kernels as K
from sl2c_semigroups import metaplectic as MP


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_csv_round_trip():
    xi = np.array([-1.0, 0.1, 1 / 3])
    vals = np.array([math.pi, 1e-300, -2.5e-17])
    buf = io.StringIO()
    tio.write_csv(buf, xi, vals, ["a=1"])
    text = buf.getvalue()
    assert "\r" not in text and text.endswith("\n")
    comments, xi2, vals2 = tio.read_csv(io.StringIO(text))
    assert comments == ["a=1"]
    assert np.array_equal(xi, xi2) and np.array_equal(vals, vals2)
    with pytest.raises(ValueError):
        tio.write_csv(io.StringIO(), [0.0], [math.nan])


def test_json_encoding():
    text = tio.dumps({"m": np.array([[0.1, 2.0]]), "z": np.array([1 + 2j]), "ok": True, "n": 3})
    doc = json.loads(text)
    assert doc["m"] == [[0.1, 2.0]] and doc["z"] == [[1.0, 2.0]] and doc["ok"] is True
    assert "0.10000000000000001" in text
    assert tio.complex_matrix(doc["z"])[0] == 1 + 2j


def test_density_q(capsys):
    code, out, _ = run(capsys, "density", "q", "--t", "1", "--grid", "-10", "10", "101")
    assert code == 0
    _, xi, vals = tio.read_csv(io.StringIO(out))
    assert xi.size == 101
    assert np.array_equal(vals, vals[::-1])
    assert np.allclose(vals, K.qt_density(1.0, xi), rtol=0, atol=0)


def test_density_g_atom_line(capsys):
    code, out, _ = run(capsys, "density", "g", "--t", "0.3", "--omega", "0.8", "--grid", "-5", "5", "11")
    assert code == 0
    first = out.splitlines()[0]
    assert first.startswith("# atom_location=")
    mass = float(first.split("atom_mass=")[1])
    assert mass == pytest.approx(math.exp(0.3) * 0.5 / 0.8, rel=1e-15)


def test_density_p_zero_branch(capsys):
    code, out, _ = run(capsys, "density", "p", "--t", "1", "--omega", "0", "--grid", "-3", "3", "13")
    _, xi, vals = tio.read_csv(io.StringIO(out))
    assert np.array_equal(vals, -xi * K.qt_density_derivative(1.0, xi))


def test_density_json(capsys):
    code, out, _ = run(capsys, "density", "c", "--t", "1", "--omega", "0.5", "--grid", "0", "2", "3",
                       "--format", "json")
    doc = json.loads(out)
    assert code == 0 and len(doc["value"]) == 3


@pytest.mark.parametrize("argv", [
    ("density", "g", "--t", "0.9", "--omega", "0.8"),
    ("density", "c", "--t", "0.3", "--omega", "0.8"),
    ("density", "q", "--t", "-1"),
    ("density", "q", "--grid", "0", "1", "1"),
    ("density", "q", "--rel-tol", "2"),
    ("metaplectic", "--alpha", "0"),
])
def test_usage_errors_exit_2(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2 and err.startswith("error:") and len(err.strip().splitlines()) == 1


def test_argparse_errors_exit_2(capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(["density", "z"])
    assert exc.value.code == 2


def test_nonconvergence_exit_3(capsys):
    code, _, err = run(capsys, "density", "q", "--rel-tol", "1e-30", "--grid", "0", "1", "3")
    assert code == 3 and "non-convergence" in err


def test_config_precedence(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# settings\nt = 0.5\ngrid = -1 1 5\nrel-tol = 1e-9\n")
    code, out, _ = run(capsys, "density", "q", "--config", str(cfg))
    _, xi, vals = tio.read_csv(io.StringIO(out))
    assert xi.size == 5 and "rel_tol=1.0000000000000001e-09" in out
    assert np.array_equal(vals, K.qt_density(0.5, xi, K.TruncationPolicy(rel_tol=1e-9)))
    code, out, _ = run(capsys, "density", "q", "--config", str(cfg), "--t", "2")
    _, xi, vals = tio.read_csv(io.StringIO(out))
    assert np.array_equal(vals, K.qt_density(2.0, xi, K.TruncationPolicy(rel_tol=1e-9)))
    cfg.write_text("colour = red\n")
    assert run(capsys, "density", "q", "--config", str(cfg))[0] == 2


def test_output_env_and_determinism(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv(cli.OUTPUT_DIR_ENV, str(tmp_path))
    assert run(capsys, "density", "p", "--t", "1", "--omega", "0.7", "--grid", "-2", "2", "9")[0] == 0
    first = (tmp_path / "density_p.csv").read_bytes()
    run(capsys, "density", "p", "--t", "1", "--omega", "0.7", "--grid", "-2", "2", "9")
    assert (tmp_path / "density_p.csv").read_bytes() == first
    explicit = tmp_path / "x.csv"
    run(capsys, "density", "p", "--t", "1", "--omega", "0.7", "--grid", "-2", "2", "9", "-o", str(explicit))
    assert explicit.read_bytes() == first


def test_tabulate(tmp_path, capsys):
    code, out, _ = run(capsys, "tabulate", "q", "--times", "0.5", "1", "--grid", "-1", "1", "5",
                       "-o", str(tmp_path))
    assert code == 0
    assert sorted(p.name for p in tmp_path.iterdir()) == ["q_t0.5_w0.csv", "q_t1_w0.csv"]


def test_metaplectic_json_round_trip(capsys):
    code, out, _ = run(capsys, "metaplectic", "--alpha", "0.5", "--t", "1")
    doc = json.loads(out)
    assert code == 0 and doc["residuals"]["reassembly"] <= 1e-12
    assert all(ok for _, ok in MP.reverify(doc).values())
    code, out, _ = run(capsys, "metaplectic", "--alpha", "1", "--t", "0")
    doc = json.loads(out)
    assert np.array_equal(np.array(doc["exp_neg_tA"]), np.eye(4))
    assert np.allclose(tio.complex_matrix(doc["sl2c"]), np.eye(2), atol=1e-15)


def test_verify_metaplectic(capsys):
    code, out, _ = run(capsys, "verify", "metaplectic", "--alpha", "1", "--t", "0.7")
    report = json.loads(out)
    assert code == 0 and report["passed"]
    lam = {c["name"]: c["measured"] for c in report["checks"] if c["name"].startswith("lambda_")}
    assert lam == {"lambda_1 alpha=1 t=0.7": 1.0, "lambda_2 alpha=1 t=0.7": 1.0}
    assert set(report["checks"][0]) == {"name", "target", "measured", "tolerance", "passed"}


def test_verify_qt_and_fault(capsys):
    code, out, _ = run(capsys, "verify", "qt")
    assert code == 0 and json.loads(out)["passed"]
    code, out, err = run(capsys, "verify", "qt", "--fault")
    report = json.loads(out)
    assert code == 1 and report["fault_injected"]
    semigroup = [c for c in report["checks"] if c["name"].startswith("semigroup")][0]
    assert not semigroup["passed"]
    assert "FAIL semigroup" in err


def test_area_sim(capsys):
    code, out, _ = run(capsys, "area-sim", "--t", "0.5", "--x", "0", "1", "--n-paths", "20000",
                       "--n-steps", "128", "--seed", "5")
    doc = json.loads(out)
    assert code == 0 and doc["results"][0]["estimate"] == 1.0
    assert doc["results"][1]["target"] == pytest.approx(0.7276340728631698, rel=1e-14)
