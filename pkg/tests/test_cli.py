"""
End-to-end tests for the command-line front end.
"""
import os
import json
from dataclasses import replace

import pandas as pd
import pytest

from henon_blowup.cli import build_parser, main, parse_perturbation, parse_range, run_cli
from henon_blowup.cli import commands
from henon_blowup.utils.errors import ValidationError
from henon_blowup.utils.output import load_output

FAST_SPECTRAL = ["--r-max", "12", "--n", "2000"]
FAST_SIMILARITY = ["--h", "0.02", "--dtau", "0.002"]


def read_json(path):
    with open(path) as f:
        return json.load(f)


def manifest(out_dir, command):
    return read_json(os.path.join(out_dir, f"manifest_{command}.json"))


def test_profile_command(out_dir):
    assert run_cli("profile", "--p", 3, "--c", 0.3, "--r-max", 10, "--n", 1000, "--out-dir", out_dir) == 0
    frame = load_output(os.path.join(out_dir, "profile.csv"), "profile_table")
    assert len(frame) == 1000
    assert frame["phi"].iloc[0] == pytest.approx(3.121445, abs=1e-5)
    summary = load_output(os.path.join(out_dir, "profile.json"), "profile")
    assert summary["residual_max"] < 1e-9
    assert summary["params"]["c"] == "0.29999999999999999"


@pytest.mark.parametrize("argv, message", [
    (["profile", "--p", "4", "--c", "0.1"], "odd"),
    (["profile", "--p", "3", "--c", "0.34"], "c must lie"),
])
def test_validation_exit_code(out_dir, argv, message):
    assert main(argv + ["--out-dir", str(out_dir)]) == 2
    record = manifest(out_dir, "profile")
    assert record["exit_code"] == 2
    assert message in record["error"]["message"]


def test_every_output_is_declared_and_parses(out_dir):
    assert run_cli("spectrum", "--p", 3, "--c", 0.3, "--ell", 0, 1, "--k", 2, *FAST_SPECTRAL, "--out-dir", out_dir) == 0
    record = load_output(os.path.join(out_dir, "manifest_spectrum.json"), "manifest")
    declared = {entry["path"] for entry in record["outputs"]}
    written = {name for name in os.listdir(out_dir) if name != "manifest_spectrum.json"}
    assert declared == written
    for entry in record["outputs"]:
        load_output(os.path.join(out_dir, entry["path"]), entry["schema_id"])
    l0 = read_json(os.path.join(out_dir, "spectrum_Q_ELL_l0_p3_c0.3.json"))
    assert l0["eigenvalues"][0] == pytest.approx(-1.0, abs=1e-5)
    assert l0["lambda_L"][0] == pytest.approx(1.0, abs=1e-5)
    assert l0["unstable_count"] == 1
    assert len(l0["shooting"]["eigenvalues"]) == 2
    l1 = read_json(os.path.join(out_dir, "spectrum_Q_ELL_l1_p3_c0.3.json"))
    assert l1["eigenvalues"][0] > 0.0


def test_limit_spectrum(out_dir):
    assert run_cli("spectrum", "--limit", "--ell", 0, "--k", 4, "--no-shooting", *FAST_SPECTRAL, "--out-dir", out_dir) == 0
    data = read_json(os.path.join(out_dir, "spectrum_Q_ELL_LIMIT_l0.json"))
    assert data["eigenvalues"] == pytest.approx([-1.0, 0.0, 1.0, 2.0], abs=1e-4)
    assert "shooting" not in data


def test_method_disagreement_exit_code(out_dir, monkeypatch):
    real = commands.shooting_spectrum

    def skewed(spec, k, grid=None, guesses=None):
        spectrum = real(spec, k, grid, guesses)
        return replace(spectrum, eigenvalues=spectrum.eigenvalues + 0.5)

    monkeypatch.setattr(commands, "shooting_spectrum", skewed)
    assert run_cli("spectrum", "--limit", "--ell", 0, "--k", 1, *FAST_SPECTRAL, "--out-dir", out_dir) == 3
    record = manifest(out_dir, "spectrum")
    assert record["status"] == "MethodDisagreement"
    assert "matrix" in record["error"]["payload"]


def test_ggmt_command(out_dir):
    assert run_cli("ggmt", "--c", 0.3, "--delta", 1, "--kappa", 1.5, "--convention", "both", "--out-dir", out_dir) == 0
    theorem = load_output(os.path.join(out_dir, "ggmt_c0.3_theorem.json"), "ggmt")
    appendix = load_output(os.path.join(out_dir, "ggmt_c0.3_appendix.json"), "ggmt")
    assert theorem["G"] < 1.0
    assert theorem["G"] == pytest.approx(1.25 * appendix["G"], rel=1e-12)
    table = load_output(os.path.join(out_dir, "ggmt_c0.3.csv"), "ggmt_table")
    assert len(table) == 2


def test_ggmt_optimize(out_dir):
    argv = ["ggmt", "--c", 0.09, "--convention", "appendix", "--optimize",
            "--delta-grid", "0.8:1.2:0.2", "--kappa-grid", "1.5:2.0:0.5", "--out-dir", out_dir]
    assert run_cli(*argv) == 0
    data = read_json(os.path.join(out_dir, "ggmt_c0.09_appendix.json"))
    assert data["optimum"]["G"] <= data["G"]
    grid = load_output(os.path.join(out_dir, "ggmt_grid_c0.09_appendix.csv"), "ggmt_table")
    assert len(grid) == 6


def test_ggmt_range_error(out_dir):
    assert run_cli("ggmt", "--c", 0.09, "--delta", 3.0, "--out-dir", out_dir) == 2


def test_outputs_are_deterministic(tmp_path):
    first, second = tmp_path / "a", tmp_path / "b"
    for target in (first, second):
        assert run_cli("ggmt", "--c", 0.3, "--out-dir", target) == 0
        assert run_cli("profile", "--n", 200, "--out-dir", target) == 0
    for name in ("ggmt_c0.3_theorem.json", "ggmt_c0.3.csv", "profile.csv", "profile.json"):
        assert (first / name).read_bytes() == (second / name).read_bytes()


def test_scan_without_crossing_exits_zero(out_dir):
    argv = ["scan", "--p", 3, "--ell", 2, "--c-lo", 0.05, "--c-hi", 0.3, "--points", 5, *FAST_SPECTRAL]
    assert run_cli(*argv, "--out-dir", out_dir) == 0
    data = load_output(os.path.join(out_dir, "scan_p3_l2.json"), "scan")
    assert data["status"] == "no_crossing"
    assert data["counts"] == [0, 0]
    assert manifest(out_dir, "scan")["status"] == "no_crossing"


def test_scan_l0_keeps_symmetry_eigenvalue(out_dir):
    argv = ["scan", "--p", 3, "--ell", 0, "--c-lo", 0.26, "--c-hi", 0.32, "--points", 5, *FAST_SPECTRAL]
    assert run_cli(*argv, "--out-dir", out_dir) == 0
    data = read_json(os.path.join(out_dir, "scan_p3_l0.json"))
    assert data["counts"] == [1, 1]


def test_linear_growth_of_symmetry_mode(out_dir):
    argv = ["evolve", "--mode", "linear", "--p", 3, "--c", 0.3, "--ell", 0, "--perturb", "eig:0",
            "--tau-end", 4, *FAST_SIMILARITY]
    assert run_cli(*argv, "--out-dir", out_dir) == 0
    data = load_output(os.path.join(out_dir, "evolve_linear_l0.json"), "evolve")
    assert data["growth_rate"] == pytest.approx(1.0, rel=5e-2)
    assert data["expected_rate"] == pytest.approx(1.0, abs=1e-5)
    assert data["verdict"] == "growing"


def test_similarity_exact_profile(out_dir):
    argv = ["evolve", "--mode", "similarity", "--perturb", "none", "--tau-end", 1, *FAST_SIMILARITY]
    assert run_cli(*argv, "--out-dir", out_dir) == 0
    assert read_json(os.path.join(out_dir, "evolve_similarity.json"))["verdict"] == "exact_profile"


def test_similarity_snapshots(out_dir):
    argv = ["evolve", "--mode", "similarity", "--perturb", "gauss:0.001", "--tau-end", 1,
            "--checkpoints", 0.5, 1, *FAST_SIMILARITY]
    assert run_cli(*argv, "--out-dir", out_dir) == 0
    for name in ("evolve_similarity_snapshot_tau0.5.csv", "evolve_similarity_snapshot_tau1.csv"):
        frame = load_output(os.path.join(out_dir, name), "snapshot")
        assert len(frame) == 600
        assert frame["r"].iloc[0] == 0.0
    declared = {entry["path"] for entry in manifest(out_dir, "evolve")["outputs"]}
    assert "evolve_similarity_snapshot_tau0.5.csv" in declared


def test_unexpected_blowup_exit_code(out_dir):
    argv = ["evolve", "--mode", "similarity", "--perturb", "gauss:5", "--tau-end", 1, *FAST_SIMILARITY]
    assert run_cli(*argv, "--out-dir", out_dir) == 4
    record = manifest(out_dir, "evolve")
    assert record["status"] == "BlowupDetected"
    assert set(record["error"]["payload"]) == {"tau", "sup_norm", "unstable_coef"}


def test_tuning_failure_exit_code(out_dir):
    argv = ["evolve", "--mode", "similarity", "--perturb", "gauss:5", "--tune-T", "--tau-end", 2, *FAST_SIMILARITY]
    assert run_cli(*argv, "--out-dir", out_dir) == 5


def test_physical_run(out_dir):
    argv = ["evolve", "--mode", "physical", "--perturb", "none", "--t-max", 2, "--checkpoints", 0.5]
    assert run_cli(*argv, "--out-dir", out_dir) == 0
    data = load_output(os.path.join(out_dir, "evolve_physical.json"), "evolve")
    assert data["T_est"] == pytest.approx(1.0, abs=1e-2)
    assert data["rescaled_errors"][0]["error"] < 1e-2
    load_output(os.path.join(out_dir, "evolve_physical_snapshot_t0.5.csv"), "snapshot")
    history = load_output(os.path.join(out_dir, "evolve_physical_history.csv"), "physical_history")
    assert list(history.columns) == ["t", "sup_norm", "sigma_norm", "unstable_coef"]
    assert history["sigma_norm"].iloc[0] < 0.1


@pytest.mark.slow
def test_tuned_similarity_run(out_dir):
    argv = ["evolve", "--mode", "similarity", "--p", 3, "--c", 0.3, "--perturb", "gauss:0.01", "--tune-T",
            "--tau-end", 8, "--tol", 1e-7, *FAST_SIMILARITY]
    assert run_cli(*argv, "--out-dir", out_dir) == 0
    data = read_json(os.path.join(out_dir, "evolve_similarity.json"))
    assert abs(data["T"] - 1.0) < 0.05
    assert data["verdict"] == "stable"
    load_output(os.path.join(out_dir, "evolve_similarity_trials.csv"), "tuning_trials")


def test_report_anchors_and_determinism(out_dir):
    argv = ["spectrum", "--limit", "--ell", 0, 1, 2, "--k", 2, "--no-shooting", *FAST_SPECTRAL]
    assert run_cli(*argv, "--out-dir", out_dir) == 0
    assert run_cli("report", "--out-dir", out_dir) == 0
    first = (out_dir / "report.json").read_bytes()
    report = load_output(os.path.join(out_dir, "report.json"), "report")
    anchors = sorted((a["ell"], a["n"], a["exact"]) for a in report["anchors"])
    assert anchors == [(0, 0, -1.0), (0, 1, 0.0), (1, 0, -0.5), (2, 0, 0.0)]
    for anchor in report["anchors"]:
        assert anchor["lambda_B"] == pytest.approx(anchor["exact"], abs=1e-4)
    assert "# Reproduction report" in (out_dir / "report.md").read_text()
    assert run_cli("report", "--out-dir", out_dir) == 0
    assert (out_dir / "report.json").read_bytes() == first


def test_report_on_empty_directory(tmp_path, out_dir):
    empty = tmp_path / "empty"
    empty.mkdir()
    assert run_cli("report", "--results-dir", empty, "--out-dir", out_dir) == 2


def test_config_file_precedence(tmp_path, out_dir):
    config = tmp_path / "lab.conf"
    config.write_text("c=0.2\nr-max=5\n")
    assert run_cli("profile", "--n", 200, "--config", config, "--out-dir", out_dir) == 0
    data = read_json(os.path.join(out_dir, "profile.json"))
    assert float(data["params"]["c"]) == 0.2
    assert load_output(os.path.join(out_dir, "profile.csv"), "profile_table")["r"].iloc[-1] == pytest.approx(5.0)
    assert run_cli("profile", "--n", 200, "--c", 0.25, "--config", config, "--out-dir", out_dir) == 0
    assert float(read_json(os.path.join(out_dir, "profile.json"))["params"]["c"]) == 0.25
    assert run_cli("profile", "--config", tmp_path / "missing.conf", "--out-dir", out_dir) == 2


@pytest.mark.parametrize("argv", [
    ["--c", "0.2"],
    ["--c=0.2"],
])
def test_short_flag_is_not_read_as_config(out_dir, argv):
    assert main(["profile", "--n", "200", *argv, "--out-dir", str(out_dir)]) == 0
    assert float(read_json(os.path.join(out_dir, "profile.json"))["params"]["c"]) == 0.2
    assert manifest(out_dir, "profile")["parameters"]["config"] is None


def test_abbreviated_flags_are_rejected(out_dir):
    with pytest.raises(SystemExit):
        main(["profile", "--conf", "lab.conf", "--out-dir", str(out_dir)])


def test_unexpected_error_is_recorded(out_dir, monkeypatch):
    def broken(args, writer):
        raise RuntimeError("disk on fire")

    monkeypatch.setattr(commands, "cmd_profile", broken)
    assert run_cli("profile", "--out-dir", out_dir) == 1
    record = manifest(out_dir, "profile")
    assert record["exit_code"] == 1
    assert record["status"] == "failed"
    assert record["error"]["message"] == "disk on fire"
    assert record["error"]["payload"] == {"type": "RuntimeError"}


def test_config_values_are_converted():
    args = build_parser({"ell": "0,1 2", "limit": "true", "shooting": "false"}).parse_args(["spectrum"])
    assert args.ell == [0, 1, 2]
    assert args.limit is True
    assert args.shooting is False


def test_help_lists_flags_with_defaults(capsys):
    parser = build_parser()
    for command in ("profile", "spectrum", "ggmt", "scan", "evolve", "report"):
        with pytest.raises(SystemExit):
            parser.parse_args([command, "--help"])
        text = capsys.readouterr().out
        assert "--out-dir" in text
        assert "(default:" in text
    with pytest.raises(SystemExit):
        parser.parse_args(["evolve", "--help"])
    text = capsys.readouterr().out
    for flag in ("--mode", "--perturb", "--tune-T", "--tau-end", "--t-max", "--checkpoints"):
        assert flag in text


def test_manifest_records_resolved_parameters(out_dir):
    assert run_cli("profile", "--n", 200, "--out-dir", out_dir) == 0
    record = manifest(out_dir, "profile")
    assert record["parameters"]["n"] == 200
    assert record["parameters"]["c"] == 0.3
    assert record["command_line"][0] == "henon_blowup"
    assert record["scheme"]["r_max"] == 10.0


def test_perturbation_language():
    assert parse_perturbation("none").radial() is None
    assert parse_perturbation("gauss:0.01").radial()(0.0) == pytest.approx(0.01)
    bump = parse_perturbation("bump:1:2:0.5")
    assert bump.radial()(2.0) == pytest.approx(1.0)
    assert bump.describe() == "bump:1:2:0.5"
    assert parse_perturbation("eig:2").index == 2
    for text in ("gauss", "eig:-1", "bump:1:2:0", "wave:1"):
        with pytest.raises(ValidationError):
            parse_perturbation(text)
    with pytest.raises(ValidationError):
        parse_perturbation("eig:0").radial()


def test_parse_range():
    assert parse_range("0.5:0.8:0.1") == [0.5, 0.6, 0.7, 0.8]
    with pytest.raises(ValidationError):
        parse_range("1:0:0.1")
    with pytest.raises(ValidationError):
        parse_range("1:2")
