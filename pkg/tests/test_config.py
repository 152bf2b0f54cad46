import pytest
import yaml

from multiac.config import SCHEMA_VERSION, ConfigError, ExperimentConfig


def test_defaults_validate():
    cfg = ExperimentConfig().validate()
    assert cfg.N == 3 and cfg.K == 2
    assert cfg.schema_version == SCHEMA_VERSION


def test_round_trip(tmp_path):
    cfg = ExperimentConfig(N=4, epsilon0=20.0, deltas=[1.0, 1.0, 2.0], K=3)
    path = tmp_path / "exp.yaml"
    cfg.save(path)
    loaded = ExperimentConfig.load(path)
    assert loaded == cfg


def test_load_rejects_unknown_keys(tmp_path):
    path = tmp_path / "exp.yaml"
    path.write_text("N: 3\nfrobnicate: 1\n")
    with pytest.raises(ConfigError, match="frobnicate"):
        ExperimentConfig.load(path)


def test_load_rejects_wrong_schema(tmp_path):
    path = tmp_path / "exp.yaml"
    path.write_text(f"schema_version: {SCHEMA_VERSION + 1}\n")
    with pytest.raises(ConfigError, match="schema_version"):
        ExperimentConfig.load(path)


def test_load_rejects_non_mapping(tmp_path):
    path = tmp_path / "exp.yaml"
    path.write_text("- 1\n- 2\n")
    with pytest.raises(ConfigError):
        ExperimentConfig.load(path)


def test_empty_file_gives_defaults(tmp_path):
    path = tmp_path / "exp.yaml"
    path.write_text("")
    assert ExperimentConfig.load(path) == ExperimentConfig()


def test_overrides_parse_yaml_values():
    cfg = ExperimentConfig().with_overrides(
        ["epsilon0=20.0", "deltas=[1.0, 2.0]", "max_iters=500"]
    )
    assert cfg.epsilon0 == 20.0
    assert cfg.deltas == [1.0, 2.0]
    assert cfg.max_iters == 500


def test_override_rejects_bad_syntax():
    with pytest.raises(ConfigError):
        ExperimentConfig().with_overrides(["epsilon0"])
    with pytest.raises(ConfigError):
        ExperimentConfig().with_overrides(["nonsense=1"])


def test_validation_rules():
    with pytest.raises(ConfigError):
        ExperimentConfig(K=3).validate()  # out of range for N=3
    with pytest.raises(ConfigError):
        ExperimentConfig(guess_family="staircase").validate()
    with pytest.raises(ConfigError):
        ExperimentConfig(sweep_kind="delta").validate()
    with pytest.raises(ConfigError):
        ExperimentConfig(threshold=0.0).validate()
    with pytest.raises(ConfigError):
        ExperimentConfig(sweep_lo=1.2, sweep_hi=0.8).validate()
    with pytest.raises(ConfigError):
        ExperimentConfig(N=3, deltas=[1.0]).validate()


def test_saved_file_is_plain_yaml(tmp_path):
    path = tmp_path / "exp.yaml"
    ExperimentConfig().save(path)
    raw = yaml.safe_load(path.read_text())
    assert isinstance(raw, dict)
    assert raw["schema_version"] == SCHEMA_VERSION
    assert raw["guess_family"] == "sudden-smooth"
