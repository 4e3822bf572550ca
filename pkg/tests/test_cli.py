"""Command line driver: exit codes, artifacts, determinism."""

import json

import numpy as np
import pytest

from ccegeom import cli

ARTIFACTS = ("report.txt", "report.json", "integrals.csv",
             "volumes.csv", "eigen_grid.csv")


def _run(argv):
    return cli.main(argv)


@pytest.fixture(scope="module")
def analyze_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("analyze")
    code = _run(["analyze", "--model", "hyperbolic", "--out", str(out)])
    assert code == 0
    return out


def test_analyze_writes_all_artifacts(analyze_dir):
    names = sorted(p.name for p in analyze_dir.iterdir())
    assert names == sorted(ARTIFACTS)


def test_analyze_report_values(analyze_dir):
    doc = json.loads((analyze_dir / "report.json").read_text())
    assert doc["gates"] and all(g["ok"] for g in doc["gates"])
    fit = doc["volume_fit"]
    assert abs(fit["V"] - 4 * np.pi ** 2 / 3) < 1e-6
    assert abs(fit["c0"] - 2 * np.pi ** 2 / 3) < 1e-6
    assert abs(fit["c2"] + 1.5 * np.pi ** 2) < 1e-6
    assert doc["identities"]["gauss_bonnet_volume_relative"] < 1e-3
    assert doc["eigenfunction"]["w2"] == 0.25
    assert doc["topology"]["consistent"] is True
    assert len(doc["topology"]["conclusions"]) >= 4
    text = (analyze_dir / "report.txt").read_text()
    assert "[pass]" in text and "FAIL" not in text
    # headline number appears in both renderings
    assert f"{fit['V']:.12g}"[:10] in text


def test_analyze_is_deterministic(analyze_dir, tmp_path):
    second = tmp_path / "again"
    second.mkdir()
    assert _run(["analyze", "--model", "hyperbolic", "--out", str(second)]) == 0
    for name in ARTIFACTS:
        assert (analyze_dir / name).read_bytes() == (second / name).read_bytes()


def test_suite_csv_schema(analyze_dir):
    lines = (analyze_dir / "integrals.csv").read_text().splitlines()
    assert lines[0] == "# integral-suite v1"
    assert lines[1].split(",") == ["domain", "quantity", "value",
                                   "error_estimate"]
    rows = [ln.split(",") for ln in lines[2:]]
    quantities = {r[1] for r in rows}
    assert {"weyl_energy", "sigma2_integral", "volume",
            "euler_gb", "signature"} <= quantities
    domains = {r[0] for r in rows}
    assert len(domains) == 2  # collar and compactified


def test_eigen_grid_schema(analyze_dir):
    lines = (analyze_dir / "eigen_grid.csv").read_text().splitlines()
    assert lines[0] == "# eigen-grid v1"
    assert lines[1] == "s,u,du,compactified_scalar"
    first = [float(x) for x in lines[2].split(",")]
    s, u = first[0], first[1]
    assert u == pytest.approx(1 / s + s / 4, rel=1e-8)
    assert first[3] == pytest.approx(12.0, abs=1e-5)


def test_exit_code_unknown_model(tmp_path, capsys):
    assert _run(["analyze", "--model", "klein_bottle",
                 "--out", str(tmp_path)]) == 2
    assert "configuration error" in capsys.readouterr().err


def test_exit_code_bad_ladder(tmp_path, capsys):
    assert _run(["volume", "--model", "hyperbolic", "--ladder", "0.1,0.2",
                 "--out", str(tmp_path)]) == 2
    assert "configuration error" in capsys.readouterr().err


def test_exit_code_injected_defect(tmp_path, capsys):
    code = _run(["check", "--model", "round_sphere", "--inject-defect",
                 "--out", str(tmp_path)])
    assert code == 1
    out = capsys.readouterr().out
    assert "[FAIL] bianchi-symmetries round_sphere" in out
    assert "failing:" in out


def test_check_single_model_passes(tmp_path, capsys):
    assert _run(["check", "--model", "flat_torus", "--out", str(tmp_path)]) == 0
    out = capsys.readouterr().out
    assert "4/4 checks passed" in out
    assert "FAIL" not in out


def test_check_rejects_unknown_scope(tmp_path, capsys):
    assert _run(["check", "--model", "moebius", "--out", str(tmp_path)]) == 2


def test_volume_subcommand_and_ladder_extension(tmp_path, capsys):
    code = _run(["volume", "--model", "hyperbolic",
                 "--ladder", "0.2,0.1,0.05", "--out", str(tmp_path)])
    assert code == 0
    out = capsys.readouterr().out
    line = next(ln for ln in out.splitlines() if ln.startswith("V = "))
    v = float(line.split("=")[1])
    assert abs(v - 4 * np.pi ** 2 / 3) < 1e-6
    table = (tmp_path / "volumes.csv").read_text().splitlines()
    body = [ln for ln in table if ln and not ln.startswith("#")]
    # 3 user rungs extended to the default depth of 8
    assert len(body) - 1 == 8


def test_volume_rejects_closed_model(tmp_path, capsys):
    assert _run(["volume", "--model", "round_sphere",
                 "--out", str(tmp_path)]) == 2
    assert "configuration error" in capsys.readouterr().err


def test_config_file_with_flag_override(tmp_path, capsys):
    cfg = {
        "model": {"name": "ads_schwarzschild", "m": 1.0},
        "numerics": {"ladder": [0.2, 0.14, 0.098, 0.0686, 0.04802,
                                0.033614, 0.0235298, 0.01647086]},
        "outputs": {"dir": str(tmp_path), "artifacts": ["csv-tables"]},
    }
    path = tmp_path / "run.json"
    path.write_text(json.dumps(cfg))
    # flag overrides the config model; stale parameters must not leak
    code = _run(["volume", "--config", str(path), "--model", "hyperbolic"])
    assert code == 0
    out = capsys.readouterr().out
    assert "hyperbolic" in out
    v = float(next(ln for ln in out.splitlines()
                   if ln.startswith("V = ")).split("=")[1])
    assert abs(v - 4 * np.pi ** 2 / 3) < 1e-6


def test_curvature_table(tmp_path):
    code = _run(["curvature", "--model", "round_sphere", "--out", str(tmp_path)])
    assert code == 0
    lines = (tmp_path / "curvature.csv").read_text().splitlines()
    assert lines[0] == "# curvature-packet v1"
    header = lines[1].split(",")
    for col in ("scalar", "sigma2", "weyl_sq", "traceless_ricci_sq"):
        assert col in header
    row = dict(zip(header, lines[2].split(",")))
    assert float(row["scalar"]) == pytest.approx(12.0, abs=1e-9)
    assert float(row["sigma2"]) == pytest.approx(6.0, abs=1e-9)
