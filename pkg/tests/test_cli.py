import numpy as np
import pytest
from click.testing import CliRunner

from multiac import cli
from multiac.config import ExperimentConfig
from multiac.krotov import MonotonicityError


@pytest.fixture
def runner():
    return CliRunner()


def write_config(tmp_path, **kwargs):
    path = tmp_path / "exp.yaml"
    kwargs.setdefault("output_dir", str(tmp_path / "out"))
    ExperimentConfig(**kwargs).save(path)
    return str(path)


def test_spectrum_outputs(tmp_path, runner):
    cfg = write_config(tmp_path)
    result = runner.invoke(cli.main, ["spectrum", "--config", cfg])
    assert result.exit_code == 0, result.output
    assert (tmp_path / "out" / "spectrum.csv").exists()
    assert (tmp_path / "out" / "spectrum.svg").exists()
    assert "crossing 0" in result.output and "crossing 1" in result.output


def test_optimize_outputs(tmp_path, runner):
    cfg = write_config(tmp_path, N=2, deltas=[1.0], K=1, max_iters=40)
    result = runner.invoke(cli.main, ["optimize", "--config", cfg])
    assert result.exit_code == 0, result.output
    out = tmp_path / "out"
    for name in [
        "field_initial.csv",
        "field_final.csv",
        "infidelity.csv",
        "populations.csv",
        "summary.csv",
        "optimize.svg",
    ]:
        assert (out / name).exists(), name
    header, row = (out / "summary.csv").read_text().splitlines()
    assert header == "converged,iterations,final_infidelity,f_eps,A_max"
    assert int(row.split(",")[1]) <= 40


def test_optimize_override_changes_run(tmp_path, runner):
    cfg = write_config(tmp_path, N=2, deltas=[1.0], K=1, max_iters=40)
    result = runner.invoke(
        cli.main, ["optimize", "--config", cfg, "--set", "max_iters=12"]
    )
    assert result.exit_code == 0, result.output
    row = (tmp_path / "out" / "summary.csv").read_text().splitlines()[1]
    assert int(row.split(",")[1]) <= 12


def test_qsl_sweep_time(tmp_path, runner):
    cfg = write_config(
        tmp_path,
        N=2,
        deltas=[1.0],
        K=1,
        max_iters=60,
        sweep_lo=0.9,
        sweep_hi=1.1,
        sweep_points=3,
    )
    result = runner.invoke(cli.main, ["qsl-sweep", "--config", cfg])
    assert result.exit_code == 0, result.output
    out = tmp_path / "out"
    assert (out / "qsl_sweep.csv").exists()
    assert (out / "qsl_sweep.svg").exists()
    lines = (out / "classifications.csv").read_text().splitlines()
    assert lines[0] == "T,classification"
    assert len(lines) == 4


def test_rwa_compare_outputs(tmp_path, runner):
    cfg = write_config(tmp_path, lambda_A=0.5, T_factor=0.9)
    result = runner.invoke(cli.main, ["rwa-compare", "--config", cfg])
    assert result.exit_code == 0, result.output
    out = tmp_path / "out"
    lines = (out / "rwa_traces.csv").read_text().splitlines()
    assert lines[0].startswith("t,P_0_analytic")
    summary = (out / "rwa_summary.csv").read_text().splitlines()
    assert summary[0] == "lambda_A,t_m,T,max_deviation"
    assert float(summary[1].split(",")[0]) == 0.5
    assert "max_deviation" in result.output


def test_rwa_compare_requires_three_levels(tmp_path, runner):
    cfg = write_config(tmp_path, N=2, deltas=[1.0], K=1)
    result = runner.invoke(cli.main, ["rwa-compare", "--config", cfg])
    assert result.exit_code == 2


def test_missing_config_is_usage_error(tmp_path, runner):
    result = runner.invoke(
        cli.main, ["optimize", "--config", str(tmp_path / "nope.yaml")]
    )
    assert result.exit_code == 2


def test_bad_config_is_usage_error(tmp_path, runner):
    path = tmp_path / "exp.yaml"
    path.write_text("guess_family: staircase\n")
    result = runner.invoke(cli.main, ["optimize", "--config", str(path)])
    assert result.exit_code == 2


def test_bad_override_is_usage_error(tmp_path, runner):
    cfg = write_config(tmp_path)
    result = runner.invoke(
        cli.main, ["optimize", "--config", cfg, "--set", "no_such_key=1"]
    )
    assert result.exit_code == 2


def test_invariant_violation_exit_code(tmp_path, runner, monkeypatch):
    def boom(cfg):
        raise MonotonicityError("infidelity rose")

    monkeypatch.setattr(cli, "run_optimization", boom)
    cfg = write_config(tmp_path, N=2, deltas=[1.0], K=1)
    result = runner.invoke(cli.main, ["optimize", "--config", cfg])
    assert result.exit_code == 3


def test_run_optimization_helper_matches_config(tmp_path):
    cfg = ExperimentConfig(N=2, deltas=[1.0], K=1, max_iters=30).validate()
    model, guess, record = cli.run_optimization(cfg)
    assert model.N == 2
    assert record.iterations_used <= 30
    assert np.all(np.diff(record.infidelities) <= 1e-9)
