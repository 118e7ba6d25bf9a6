"""
Tests for configuration lookup, result files, manifests and error payloads.
"""
import os
import json
import logging

import numpy as np
import pandas as pd
import pytest

from henon_blowup.utils.config import (
    get_config,
    get_log_level,
    get_out_dir,
    get_verbose,
    get_workers,
    load_config_file,
    set_log_level,
)
from henon_blowup.utils.errors import (
    BlowupDetected,
    HenonLabError,
    MethodDisagreement,
    NoBlowup,
    NoCrossing,
    NoSignChange,
    RangeError,
    SchemaMismatch,
    ValidationError,
)
from henon_blowup.utils.output import SCHEMAS, ResultWriter, RunManifest, load_output


def test_environment_getters(monkeypatch, tmp_path):
    monkeypatch.setenv("HBL_OUT_DIR", str(tmp_path))
    monkeypatch.setenv("HBL_LOG_LEVEL", "debug")
    monkeypatch.setenv("HBL_VERBOSE", "True")
    monkeypatch.setenv("HBL_WORKERS", "4")
    assert get_out_dir() == str(tmp_path)
    assert get_log_level() == "DEBUG"
    assert get_verbose() is True
    assert get_workers() == 4
    assert get_config("HBL_MISSING_KEY", "fallback") == "fallback"


def test_workers_fall_back_to_one(monkeypatch):
    monkeypatch.setenv("HBL_WORKERS", "many")
    assert get_workers() == 1
    monkeypatch.setenv("HBL_WORKERS", "0")
    assert get_workers() == 1


def test_default_out_dir(monkeypatch):
    monkeypatch.delenv("HBL_OUT_DIR", raising=False)
    assert get_out_dir().endswith(os.path.join("lab_workspace", "outputs"))


def test_load_config_file(tmp_path):
    path = tmp_path / "lab.conf"
    path.write_text("# scheme\nR-MAX = 12\nTau_End=4\nperturb=gauss:0.01\n")
    assert load_config_file(str(path)) == {"r_max": "12", "tau_end": "4", "perturb": "gauss:0.01"}
    assert load_config_file(None) == {}
    with pytest.raises(FileNotFoundError):
        load_config_file(str(tmp_path / "absent.conf"))


def test_set_log_level():
    root = logging.getLogger()
    before = root.level
    try:
        set_log_level("error")
        assert root.level == logging.ERROR
        set_log_level("nonsense")
        assert root.level == logging.ERROR
    finally:
        root.setLevel(before)


def test_exit_codes():
    assert ValidationError.exit_code == 2
    assert RangeError("x").exit_code == 2
    assert MethodDisagreement.exit_code == 3
    assert BlowupDetected.exit_code == 4
    assert NoSignChange.exit_code == 5
    assert NoCrossing.exit_code == 0
    assert NoBlowup.exit_code == 1
    assert issubclass(RangeError, ValueError)
    error = HenonLabError("failed", {"value": 1.5})
    assert str(error) == "failed"
    assert error.payload == {"value": 1.5}
    assert HenonLabError().payload == {}


def test_writer_records_outputs(tmp_path):
    writer = ResultWriter(str(tmp_path / "nested" / "outputs"))
    json_path = writer.write_json("scan.json", "scan", {
        "ell": 1, "c_lo": 0.02, "c_hi": 0.25, "status": "crossing",
        "c_star": np.float64(0.06), "counts": np.array([1, 0]),
    })
    frame = pd.DataFrame({"c": [0.1, 0.2], "lambda_B": [-0.1, 1.0 / 3.0], "count": [1, 0]})
    csv_path = writer.write_csv("scan_curve.csv", "scan_curve", frame)
    assert [entry["path"] for entry in writer.outputs] == ["scan.json", "scan_curve.csv"]
    assert [entry["format"] for entry in writer.outputs] == ["json", "csv"]

    document = load_output(json_path, "scan")
    assert document["counts"] == [1, 0]
    assert document["c_star"] == 0.06
    assert document["schema"] == "1"
    curve = load_output(csv_path, "scan_curve")
    assert curve["lambda_B"].iloc[1] == pytest.approx(1.0 / 3.0, rel=1e-11)
    assert ",0.333333333333,0" in open(csv_path).read()


def test_non_finite_values_are_strings(tmp_path):
    writer = ResultWriter(str(tmp_path))
    path = writer.write_json("e.json", "evolve", {
        "mode": "similarity", "verdict": "exact_profile", "params": {}, "scheme": {},
        "decay_orders": float("inf"), "rate": np.nan,
    })
    with open(path) as f:
        raw = json.load(f)
    assert raw["decay_orders"] == "inf"
    assert raw["rate"] == "nan"


def test_schema_mismatches(tmp_path):
    writer = ResultWriter(str(tmp_path))
    path = writer.write_json("g.json", "ggmt", {"c": 0.09})
    with pytest.raises(SchemaMismatch) as info:
        load_output(path, "ggmt")
    assert "delta" in info.value.payload["missing"]
    with pytest.raises(SchemaMismatch):
        load_output(path, "scan")
    with pytest.raises(SchemaMismatch):
        load_output(path, "no_such_schema")

    old = tmp_path / "old.json"
    old.write_text(json.dumps({"schema": "0", "schema_id": "ggmt"}))
    with pytest.raises(SchemaMismatch) as info:
        load_output(str(old), "ggmt")
    assert info.value.payload["found"] == "0"

    broken = tmp_path / "broken.json"
    broken.write_text("{not json")
    with pytest.raises(SchemaMismatch):
        load_output(str(broken), "ggmt")

    table = tmp_path / "t.csv"
    pd.DataFrame({"r": [0.0]}).to_csv(table, index=False)
    with pytest.raises(SchemaMismatch) as info:
        load_output(str(table), "snapshot")
    assert info.value.payload["missing"] == ["value"]


def test_schema_registry_formats():
    assert {schema["format"] for schema in SCHEMAS.values()} == {"json", "csv", "text"}


def test_run_manifest(tmp_path):
    writer = ResultWriter(str(tmp_path))
    writer.write_text("report.md", "report_markdown", "# Reproduction report\n")
    manifest = RunManifest.start({"c": 0.3}, {"h": 0.01}, "0.1.0", ["henon_blowup", "report"])
    path = manifest.finish(writer, 2, "SchemaMismatch", name="manifest_report.json",
                           error={"message": "no result files"})
    document = load_output(path, "manifest")
    assert document["command_line"] == ["henon_blowup", "report"]
    assert document["exit_code"] == 2
    assert document["status"] == "SchemaMismatch"
    assert document["outputs"] == [{"path": "report.md", "schema_id": "report_markdown", "format": "text"}]
    assert document["duration_s"] >= 0.0
    assert load_output(str(tmp_path / "report.md"), "report_markdown").startswith("# Reproduction")
