"""End-to-end tests of the mlab command line."""

import json
import shutil
from pathlib import Path

import numpy as np
import pytest

from minklab.minklab import EXIT_FAILED, EXIT_OK, EXIT_USAGE, run

from .conftest import quartic_metric_oracle

SPECS = Path(__file__).resolve().parent.parent / "specs"


@pytest.fixture(autouse=True)
def isolated_home(tmp_path, monkeypatch):
    monkeypatch.setenv("HOME", str(tmp_path / "home"))
    monkeypatch.setenv("MLAB_THREADS", "1")


@pytest.fixture
def specs(tmp_path):
    target = tmp_path / "specs"
    shutil.copytree(SPECS, target)
    return target


def run_json(capsys, argv):
    code = run(argv)
    out = capsys.readouterr().out
    return code, json.loads(out) if out.strip() else None


def test_flatness_of_euclidean(specs, capsys):
    code, report = run_json(capsys, ["flatness", "--norm", str(specs / "euclid3.json"),
                                     "--seed", "7", "--count", "200", "--no-timestamp"])

    assert code == EXIT_OK
    assert report["suite"] == "flatness"
    assert report["overall"] == "pass"
    assert report["classification"]["flat"] is True
    assert "generated_at" not in report


def test_timestamp_present_by_default(specs, capsys):
    code, report = run_json(capsys, ["axioms", "--norm", str(specs / "quartic.json"), "--count", "5"])

    assert code == EXIT_OK
    assert "generated_at" in report


def test_tensors_at_point(specs, capsys):
    code, data = run_json(capsys, ["tensors", "--norm", str(specs / "quartic.json"), "--at", "1,1,1"])

    assert code == EXIT_OK
    assert data["christoffel_cartan_residual"] < 1e-10
    assert len(data["g"]) == 3 and len(data["R"][0][0][0]) == 3
    np.testing.assert_allclose(data["g"], quartic_metric_oracle(np.ones(3)), rtol=1e-12)
    assert data["g"][0][0] == pytest.approx(1.1188619, abs=1e-6)


def test_tensors_text_output(specs, capsys):
    code = run(["tensors", "--norm", str(specs / "quartic.json"), "--at", "1,1,1", "--format", "text"])

    assert code == EXIT_OK
    assert "Christoffel-Cartan residual" in capsys.readouterr().out


def test_brickell_vacuous_for_randers(specs, capsys):
    code, report = run_json(capsys, ["brickell", "--norm", str(specs / "randers3.json"), "--count", "10"])

    assert code == EXIT_OK
    assert "hypothesis failed: absolute homogeneity" in report["notes"]


def test_witness_points_join_the_plan(tmp_path, capsys):
    spec_path = tmp_path / "randers2.json"
    spec_path.write_text(json.dumps({"dim": 2, "family": "randers", "A": [[1.0, 0.0], [0.0, 1.0]], "b": [0.5, 0.0]}))

    code, report = run_json(capsys, ["axioms", "--norm", str(spec_path), "--count", "3", "--witness=-1,0"])

    assert code == EXIT_OK
    assert report["plan"]["extra_points"] == [[-1.0, 0.0]]
    residual = {c["name"]: c["residual"] for c in report["checks"]}["absolute_homogeneity"]
    assert residual == pytest.approx(2.0, rel=1e-12)


def test_theorem1_model_case(specs, capsys):
    code, report = run_json(capsys, ["theorem1", "--norm", str(specs / "euclid_identity3.json"),
                                     "--surface", str(specs / "sphere_offcenter.json"), "--count", "3"])

    assert code == EXIT_OK
    assert {c["name"]: c["verdict"] for c in report["checks"]}["obata"] == "pass"


def test_forced_failure_exit_code(specs, capsys):
    code, report = run_json(capsys, ["identities", "--norm", str(specs / "quartic.json"), "--count", "10",
                                     "--tol", "tol_cross_route=1e-30"])

    assert code == EXIT_FAILED
    assert report["overall"] == "fail"


@pytest.mark.parametrize("argv", [
    [],
    ["frobnicate"],
    ["flatness"],
    ["flatness", "--norm", "missing.json"],
    ["flatness", "--norm", "{specs}/quartic.json", "--tol", "tol_bogus=1"],
    ["flatness", "--norm", "{specs}/quartic.json", "--tol", "tol_flat"],
    ["axioms", "--norm", "{specs}/quartic.json", "--witness", "1,0"],
    ["flatness", "--norm", "{specs}/quartic.json", "--tol", "tol_flat=-1"],
    ["flatness", "--norm", "{specs}/quartic.json", "--count", "0"],
    ["tensors", "--norm", "{specs}/quartic.json", "--at", "1,1"],
    ["theorem1", "--norm", "{specs}/quartic.json"],
    ["theorem1", "--norm", "{specs}/quartic.json", "--surface", "{specs}/sphere_offcenter.json"],
    ["parallel", "--norm", "{specs}/quartic.json", "--b", "0,0,0"],
    ["flatness", "--norm", "{specs}/quartic.json", "--config", "{specs}/nope.json"],
])
def test_usage_and_spec_errors(argv, specs, capsys):
    argv = [a.format(specs=specs) for a in argv]

    assert run(argv) == EXIT_USAGE


def test_invalid_spec_names_invariant(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"dim": 2, "family": "quartic_reg", "eps": -1}))

    assert run(["axioms", "--norm", str(path)]) == EXIT_USAGE
    assert "eps must be positive" in capsys.readouterr().err


def test_reports_are_byte_identical(specs, tmp_path, capsys):
    outputs = []
    for name in ("a.json", "b.json"):
        out = tmp_path / name
        code = run(["all", "--norm", str(specs / "euclid_identity3.json"), "--surface",
                    str(specs / "unit_indicatrix.json"), "--count", "3", "--no-timestamp", "--out", str(out)])
        assert code == EXIT_OK
        outputs.append(out.read_bytes())

    assert outputs[0] == outputs[1]
    payload = json.loads(outputs[0])
    assert payload["overall"] == "pass"
    assert [r["suite"] for r in payload["reports"]][-1] == "theorem1"


def test_csv_output(specs, capsys):
    code = run(["deicke", "--norm", str(specs / "quartic.json"), "--count", "4", "--format", "csv"])
    lines = capsys.readouterr().out.splitlines()

    assert code == EXIT_OK
    assert lines[0] == "sample_index,y1,y2,y3,name,value"
    assert len(lines) == 5
    assert lines[1].split(",")[4] == "mean_cartan"


def test_text_output(specs, capsys):
    code = run(["axioms", "--norm", str(specs / "randers3.json"), "--count", "5", "--format", "text"])

    assert code == EXIT_OK
    assert "axioms (randers, n=3): PASS" in capsys.readouterr().out


def test_config_command(tmp_path, capsys):
    code, config = run_json(capsys, ["config", "--count", "50", "--tol", "tol_flat=1e-6"])

    assert code == EXIT_OK
    assert config["count"] == 50
    assert config["tolerances"]["tol_flat"] == 1e-6

    target = tmp_path / "saved.json"
    assert run(["config", "--seed", "3", "--write", str(target)]) == EXIT_OK
    assert json.loads(target.read_text())["seed"] == 3
