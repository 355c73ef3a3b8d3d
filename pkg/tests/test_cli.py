"""
Tests for the command-line interface.
"""

import filecmp
import json
import os

import pytest
import yaml
from click.testing import CliRunner

from bandsel import __version__
from bandsel.cli import cli, main
from bandsel.config import load_config
from bandsel.utils import OUTPUT_DIR_ENV, read_table


@pytest.fixture(autouse=True)
def workdir(tmp_path, monkeypatch):
    """Run every command in an empty directory without a config file or .env."""
    monkeypatch.chdir(tmp_path)
    monkeypatch.delenv(OUTPUT_DIR_ENV, raising=False)
    return tmp_path


def run_json(capsys, args):
    code = main(args)
    out = capsys.readouterr().out
    assert code == 0, out
    return json.loads(out)


def last_error(capsys):
    err = capsys.readouterr().err.strip().splitlines()
    return json.loads(err[-1])


def test_version(capsys):
    assert main(["--version"]) == 0
    assert __version__ in capsys.readouterr().out


def test_moments(capsys):
    record = run_json(capsys, ["moments"])
    assert record["kernel"] == "biweight"
    assert record["second_moment"] == pytest.approx(1.0 / 28.0, abs=1e-10)
    assert record["k_sq"] == pytest.approx(10.0 / 7.0, abs=1e-10)
    assert record["kg_sq"] == pytest.approx(10.0 / 7.0, abs=1e-10)
    assert record["k_zero"] == 1.875


def test_moments_as_csv(capsys):
    assert main(["moments", "--kernel", "triweight", "--format", "csv"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0].startswith("kernel,half_width,second_moment")
    assert lines[1].startswith("triweight,1,")


def test_theory(capsys):
    report = run_json(capsys, ["theory", "--n", "32768", "--alpha", "0.577", "--sigma", "0.32"])
    assert report["c"] == pytest.approx(0.867, abs=5e-4)
    assert report["h_star"] == pytest.approx(0.1084, abs=5e-5)
    assert report["gap_sd"] == pytest.approx(0.0207, abs=1e-4)
    assert report["moment_order"] == 4


def test_usage_error_exit_code(capsys):
    assert main(["study", "--bogus"]) == 2
    error = last_error(capsys)
    assert error["error"] == "usage"
    assert error["exit_code"] == 2


def test_validation_error_exit_code(capsys):
    assert main(["simulate", "--alpha", "1.5"]) == 3
    error = last_error(capsys)
    assert error["error"] == "validation"
    assert error["exit_code"] == 3
    assert "alpha" in error["message"]


def test_non_periodic_uniform_weight_is_refused(capsys):
    assert main(["select", "--criterion", "D_n", "--no-periodic"]) == 3


def test_data_criterion_needs_input(capsys):
    assert main(["select", "--criterion", "CL"]) == 3
    assert "--input" in last_error(capsys)["message"]


def test_degenerate_setup_exit_code(capsys):
    assert main(["theory", "--trend", "zero"]) == 1
    assert last_error(capsys)["error"] == "degenerate"


def test_simulate_smooth_select_pipeline(capsys, workdir):
    assert main(["simulate", "--n", "512", "--alpha", "0.162", "--data", "--output", "data.csv"]) == 0
    data = read_table(str(workdir / "data.csv"))
    assert list(data.columns) == ["index", "value", "x", "trend", "y"]
    assert len(data) == 512
    capsys.readouterr()

    assert main(["smooth", "--input", "data.csv", "--column", "y", "--h", "0.1"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "x,y,r_hat"
    assert len(lines) == 513

    record = run_json(capsys, ["select", "--input", "data.csv", "--column", "y", "--criterion", "CL",
                               "--output-dir", "out"])
    assert record["criterion"] == "CL"
    assert record["n"] == 512
    curve = read_table(str(workdir / "out" / "curve_CL.csv"))
    assert record["h_star"] == curve["h"][record["index"]]
    assert curve["value"].min() == curve["value"][record["index"]]


def test_simulate_is_reproducible(capsys):
    assert main(["simulate", "--n", "64", "--seed", "5"]) == 0
    first = capsys.readouterr().out
    assert main(["simulate", "--n", "64", "--seed", "5"]) == 0
    assert capsys.readouterr().out == first


def test_study_outputs_are_byte_identical(capsys, workdir):
    args = ["study", "--n", "512", "--alphas", "0.01", "--replicates", "10", "--seed", "42",
            "--grid-size", "30"]
    assert main(args + ["--output-dir", "a"]) == 0
    assert main(args + ["--output-dir", "b"]) == 0
    out = capsys.readouterr().out
    assert "✓ alpha=0.01" in out

    names = sorted(os.listdir(workdir / "a"))
    assert names == sorted(os.listdir(workdir / "b"))
    assert "summary.json" in names
    _, mismatch, errors = filecmp.cmpfiles(str(workdir / "a"), str(workdir / "b"), names, shallow=False)
    assert mismatch == [] and errors == []

    with open(workdir / "a" / "summary.json") as f:
        summary = json.load(f)
    assert summary["config"]["seed"] == 42
    assert summary["cells"][0]["replicates"] == 10


def test_study_rejects_bad_alpha_list(capsys):
    assert main(["study", "--alphas", "0.1,abc"]) == 2


def test_print_config_does_not_compute(capsys, workdir):
    settings = run_json(capsys, ["study", "--print-config", "--n", "1024", "--alphas", "0.1,0.2"])
    assert settings["n"] == 1024
    assert settings["alphas"] == [0.1, 0.2]
    assert settings["output_dir"] == "bandsel_output"
    assert not (workdir / "bandsel_output").exists()


def test_output_dir_from_environment(capsys, workdir, monkeypatch):
    monkeypatch.setenv(OUTPUT_DIR_ENV, "env_out")
    record = run_json(capsys, ["select", "--criterion", "D_n", "--grid-size", "20"])
    assert record["curve"] == os.path.join("env_out", "curve_D_n.csv")
    assert (workdir / "env_out" / "curve_D_n.csv").exists()


def test_config_file_is_used(capsys, workdir):
    with open(workdir / "custom.yaml", "w") as f:
        yaml.dump({"study": {"n": 256, "kernel": "triweight"}}, f)
    report = run_json(capsys, ["theory", "--config-file", "custom.yaml"])
    assert report["n"] == 256
    # Flags override the file
    report = run_json(capsys, ["theory", "--config-file", "custom.yaml", "--n", "2048"])
    assert report["n"] == 2048


def test_quadform(capsys):
    record = run_json(capsys, ["quadform", "--n", "256", "--replicates", "10", "--seed", "3"])
    assert record["n"] == 256
    assert record["replicates"] == 10
    assert record["variance"] > 0
    assert record["expansion"] > 0


def test_init_creates_config(workdir):
    runner = CliRunner()
    result = runner.invoke(cli, ["init", "--path", "bandsel_config.yaml"])
    assert result.exit_code == 0
    assert "✓ Configuration file created" in result.output

    config = load_config("bandsel_config.yaml")
    assert config["study"]["n"] == 512
    assert config["output"]["directory"] is None


def test_init_completes_existing_config(workdir):
    with open(workdir / "bandsel_config.yaml", "w") as f:
        yaml.dump({"study": {"n": 4096}}, f)

    runner = CliRunner()
    result = runner.invoke(cli, ["init"])
    assert result.exit_code == 0
    assert "updated with missing settings" in result.output

    with open(workdir / "bandsel_config.yaml") as f:
        config = yaml.safe_load(f)
    assert config["study"]["n"] == 4096
    assert config["study"]["replicates"] == 100
