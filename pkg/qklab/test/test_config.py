import pytest

from qklab.config import (DEFAULT_P_GRID, ExperimentConfig, load_config, parse_override,
                          parse_values, read_config_file, resolve_config_path)
from qklab.exceptions import ConfigError

PRESETS = ("gaussian", "toy", "heart", "cancer", "wine", "htru2")


def test_defaults():
    config = ExperimentConfig()
    assert config.p_grid == DEFAULT_P_GRID
    assert len(config.p_grid) == 16 and config.p_grid[-1] == 0.75
    assert config.corruption_grid[-1] == 1.0
    assert config.c_prime == "auto"


@pytest.mark.parametrize("name", PRESETS)
def test_presets_load(name):
    config = load_config(name, env={})
    assert config.name == name
    assert resolve_config_path(name).name == f"{name}.cfg"


def test_gaussian_preset_values():
    config = load_config("gaussian", env={})
    assert (config.subset, config.n_qubits, config.n_layers) == (500, 2, 2)
    assert config.cluster_std == 3.0
    assert config.c0 == 100.0 and config.beta == 0.0
    assert config.c0_grid == ()
    assert config.centers == ((-4.0, -4.0), (4.0, 4.0))
    assert len(config.p_grid) == 16


def test_grid_syntax_and_comments(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text("# comment\nname = run  # trailing\np_grid = 0:0.2:0.1\n"
                    "corruption_grid = 0, 0.25\nstrict = yes\nsubset = none\n")
    values = read_config_file(path)
    assert values["name"] == "run"
    assert values["p_grid"] == (0.0, 0.1, 0.2)
    assert values["corruption_grid"] == (0.0, 0.25)
    assert values["strict"] is True
    assert values["subset"] is None


def test_unknown_and_bad_values(tmp_path):
    with pytest.raises(ConfigError, match="Unknown config key"):
        parse_values({"qubits": "2"})
    with pytest.raises(ConfigError, match="Bad value for 'n_qubits'"):
        parse_values({"n_qubits": "two"})
    with pytest.raises(ConfigError, match="not found"):
        load_config(str(tmp_path / "missing.cfg"), env={})


def test_validation_errors():
    with pytest.raises(ConfigError, match="p_grid value"):
        ExperimentConfig(p_grid=(0.0, 0.8))
    assert ExperimentConfig(noise_model="global", p_grid=(0.0, 0.8)).p_grid[-1] == 0.8
    with pytest.raises(ConfigError, match="Unknown dataset"):
        ExperimentConfig(dataset="iris")
    with pytest.raises(ConfigError, match="c_prime"):
        ExperimentConfig(c_prime="large")
    with pytest.raises(ConfigError, match="c_prime"):
        ExperimentConfig(c_prime="-1")
    with pytest.raises(ConfigError):
        ExperimentConfig(holdout="75/")
    with pytest.raises(ConfigError, match="folds"):
        ExperimentConfig(folds=1)


def test_override_precedence(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text("out_dir = from_file\nseed = 1\n")
    assert load_config(path, env={}).out_dir == "from_file"
    assert load_config(path, env={"QKLAB_OUT": "from_env"}).out_dir == "from_env"
    config = load_config(path, overrides={"out_dir": "from_flag", "seed": "5"},
                         env={"QKLAB_OUT": "from_env"})
    assert (config.out_dir, config.seed) == ("from_flag", 5)


def test_parse_override():
    assert parse_override("p_grid=0,0.1") == ("p_grid", "0,0.1")
    assert parse_override(" c_prime = 3 ") == ("c_prime", " 3 ")
    with pytest.raises(ConfigError):
        parse_override("seed")


def test_config_hash_ignores_run_only_fields():
    base = ExperimentConfig()
    assert len(base.config_hash) == 12
    assert base.replace(out_dir="elsewhere", parallel=True).config_hash == base.config_hash
    assert base.replace(seed=1).config_hash != base.config_hash
