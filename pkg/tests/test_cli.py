import json
import math

import pytest
from click.testing import CliRunner

import rydberg_expansion
from rydberg_expansion.cli import EXIT_CONFIG, EXIT_NUMERICAL, main
from rydberg_expansion.data import read_csv


@pytest.fixture
def runner():
    return CliRunner()


def test_version(runner):
    result = runner.invoke(main, ["--version"])
    assert result.exit_code == 0
    assert rydberg_expansion.__version__ in result.output


def test_gamma_table(runner, tmp_path):
    out = tmp_path / "table1.csv"
    result = runner.invoke(main, ["gamma-table", "--preset", "table1", "--out", str(out)])
    assert result.exit_code == 0, result.output
    assert str(out) in result.output
    table = read_csv(out).set_index("pulse")
    assert table.loc["square", "c6"] == pytest.approx(128.0 * math.pi ** 2 / 189.0,
                                                      rel=1e-6)
    assert table.loc["gaussian", "isotropic_c3"] == pytest.approx(32.1138, abs=1e-3)


def test_saturation_json(runner, tmp_path):
    out = tmp_path / "singer.json"
    result = runner.invoke(main, ["saturation", "--preset", "singer-params", "--format",
                                  "json", "--out", str(out)])
    assert result.exit_code == 0, result.output
    document = json.loads(out.read_text(encoding="utf-8"))
    assert document["config"]["preset"] == "singer-params"
    assert 0.074 <= document["results"]["rows"][0]["P0"] <= 0.090


def test_default_output_location(runner, tmp_path, monkeypatch):
    monkeypatch.setenv("RYDBERG_OUTPUT_DIR", str(tmp_path))
    result = runner.invoke(main, ["density-sweep", "--preset", "fig2", "--set",
                                  "density.points=5"])
    assert result.exit_code == 0, result.output
    frame = read_csv(tmp_path / "fig2.csv")
    assert len(frame) == 5


def test_pexc(runner, tmp_path):
    out = tmp_path / "fig1.csv"
    result = runner.invoke(main, ["pexc", "--preset", "fig1", "--set",
                                  "intensity.points=11", "--out", str(out)])
    assert result.exit_code == 0, result.output
    frame = read_csv(out)
    assert list(frame.columns) == ["I_over_Isat", "P_model", "P_series", "P_isolated"]
    assert frame["P_isolated"].iloc[-1] == pytest.approx(1.0)
    text = out.read_text(encoding="utf-8")
    assert "# result.P0 = " in text


def test_correlation_family(runner, tmp_path):
    out = tmp_path / "fig3b.csv"
    result = runner.invoke(main, ["correlation", "--preset", "fig3b", "--set",
                                  "correlation.points=20", "--workers", "2", "--out",
                                  str(out)])
    assert result.exit_code == 0, result.output
    frame = read_csv(out)
    assert len(frame) == 100
    assert frame["curve"].unique().tolist() == ["-20 MHz", "-10 MHz", "+0 MHz",
                                                "+10 MHz", "+20 MHz"]


def test_oracle(runner, tmp_path):
    out = tmp_path / "oracle.csv"
    result = runner.invoke(main, ["oracle", "--set", "pulse.shape=square", "--set",
                                  "pulse.T=1e-8", "--set", "oracle.n_atoms=2", "--set",
                                  "oracle.points=11", "--out", str(out)])
    assert result.exit_code == 0, result.output
    frame = read_csv(out)
    assert list(frame.columns) == ["tau", "P_0", "P_1", "nn_0_1", "norm"]
    assert frame["norm"].tolist() == pytest.approx([1.0] * 11, abs=1e-9)


def test_check_prints_configuration(runner, tmp_path):
    result = runner.invoke(main, ["saturation", "--preset", "singer-params", "--check",
                                  "--out", str(tmp_path / "never.csv")])
    assert result.exit_code == 0
    assert "rho = 2000000000.0" in result.output
    assert not (tmp_path / "never.csv").exists()


def test_config_errors_exit_with_status_2(runner, tmp_path):
    result = runner.invoke(main, ["pexc", "--preset", "fig1", "--set", "rho=abc",
                                  "--out", str(tmp_path / "x.csv")])
    assert result.exit_code == EXIT_CONFIG
    assert "rho" in result.output


def test_numerical_errors_exit_with_status_3(runner, tmp_path):
    result = runner.invoke(main, ["mc-validate", "--set", "pulse.shape=square", "--set",
                                  "pulse.T=1e-7", "--set", "kernel.c_au=3e21", "--set",
                                  "rho=1e10", "--set", "mc.n_atoms=10", "--out",
                                  str(tmp_path / "mc.csv")])
    assert result.exit_code == EXIT_NUMERICAL
    assert "blockade radii" in result.output


def test_mc_validate(runner, tmp_path):
    out = tmp_path / "mc.csv"
    result = runner.invoke(main, ["mc-validate", "--set", "pulse.shape=square", "--set",
                                  "pulse.T=1e-7", "--set", "kernel.c_au=3e21", "--set",
                                  "rho=1e9", "--set", "mc.samples=3", "--seed", "5",
                                  "--out", str(out)])
    assert result.exit_code == 0, result.output
    record = read_csv(out).iloc[0]
    assert record["n_samples"] == 3
    assert record["averaged"] > 0.0


def test_oracle_atom_limit_is_a_config_error(runner, tmp_path, monkeypatch):
    monkeypatch.setenv("RYDBERG_ORACLE_MAX_N", "8")
    result = runner.invoke(main, ["oracle", "--set", "pulse.T=1e-8", "--set",
                                  "oracle.n_atoms=20", "--out", str(tmp_path / "x.csv")])
    assert result.exit_code == EXIT_CONFIG
    assert "oracle.n_atoms" in result.output
    assert not (tmp_path / "x.csv").exists()


def test_mc_validate_keeps_estimate_when_average_diverges(runner, tmp_path):
    out = tmp_path / "mc.csv"
    result = runner.invoke(main, ["mc-validate", "--set", "pulse.T=1e-7", "--set",
                                  "pulse.detuning_mhz=5", "--set", "kernel.s=3", "--set",
                                  "kernel.c_au=5e3", "--set", "rho=1e9", "--set",
                                  "mc.samples=3", "--seed", "5", "--out", str(out)])
    assert result.exit_code == 0, result.output
    record = read_csv(out).iloc[0]
    assert record["n_samples"] == 3
    assert math.isfinite(record["mean"])
    assert math.isnan(record["averaged"])
    assert "deviation_sigma" not in record.index
    assert "# result.averaged = divergent" in out.read_text(encoding="utf-8")
