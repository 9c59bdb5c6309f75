import json

import pytest

from core.config import CONFIG_ENV_VAR, DEFAULT_CONFIG, apply_overrides, default_config_path, load_config
from core.errors import ConfigError


def test_bundled_config_matches_defaults(monkeypatch):
    monkeypatch.delenv(CONFIG_ENV_VAR, raising=False)
    cfg = load_config()
    for section, values in DEFAULT_CONFIG.items():
        for key, value in values.items():
            assert cfg[section][key] == value, f"{section}.{key}"
    assert cfg.PHYSICS.SPEED_OF_LIGHT == pytest.approx(2.99792458e8)
    assert isinstance(cfg.VIBRATION.T_N, float)


def test_partial_file_falls_back_to_defaults(tmp_path):
    path = tmp_path / "cfg.yaml"
    path.write_text("SPECTRUM:\n  N_MAX: 4\n", encoding="utf-8")
    cfg = load_config(str(path))
    assert cfg.SPECTRUM.N_MAX == 4
    assert cfg.SPECTRUM.S_LIST == DEFAULT_CONFIG["SPECTRUM"]["S_LIST"]
    assert cfg.RADIATIVE.L == 30


def test_empty_file_is_default(tmp_path):
    path = tmp_path / "empty.yaml"
    path.write_text("", encoding="utf-8")
    assert load_config(str(path)).OUTPUT.FORMAT == "csv"


def test_json_config(tmp_path):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps({"OUTPUT": {"FORMAT": "json"}, "VIBRATION": {"LEVEL": 2}}), encoding="utf-8")
    cfg = load_config(str(path))
    assert cfg.OUTPUT.FORMAT == "json"
    assert cfg.VIBRATION.LEVEL == 2


def test_env_var_selects_file(tmp_path, monkeypatch):
    path = tmp_path / "env.yaml"
    path.write_text("EXPERIMENT:\n  G_FACTOR: 1\n", encoding="utf-8")
    monkeypatch.setenv(CONFIG_ENV_VAR, str(path))
    assert default_config_path() == path
    assert load_config().EXPERIMENT.G_FACTOR == 1


def test_missing_file(tmp_path):
    with pytest.raises(FileNotFoundError):
        load_config(str(tmp_path / "nope.yaml"))


@pytest.mark.parametrize("text", [
    "SPECTRUM:\n  NMAX: 4\n",
    "PLOTTING:\n  DPI: 300\n",
    "SPECTRUM: 3\n",
    "- 1\n- 2\n",
    "SPECTRUM: [unclosed\n",
])
def test_malformed_files_rejected(tmp_path, text):
    path = tmp_path / "bad.yaml"
    path.write_text(text, encoding="utf-8")
    with pytest.raises(ConfigError):
        load_config(str(path))


@pytest.mark.parametrize("section,key,value", [
    ("PHYSICS", "MASS", -1.0),
    ("PHYSICS", "GRAVITY", "9.8"),
    ("SPECTRUM", "S_LIST", [0.5, 2]),
    ("SPECTRUM", "S_LIST", []),
    ("SPECTRUM", "N_MAX", 0),
    ("SPECTRUM", "N_MAX", 2.5),
    ("VIBRATION", "N_SUM_MAX", 1),
    ("VIBRATION", "UPSILON_POWER", 2),
    ("EXPERIMENT", "G_FACTOR", 0.5),
    ("EXPERIMENT", "DELTA_E_EXP_PEV", [0.1]),
    ("EXPERIMENT", "HEIGHTS_COMBINE", "max"),
    ("RADIATIVE", "L", 5),
    ("RADIATIVE", "TO_LEVEL", 2),
    ("RADIATIVE", "S_SWEEP", [10]),
    ("RADIATIVE", "QUADRUPOLE_POWER", 4),
    ("OUTPUT", "FORMAT", "xml"),
    ("OUTPUT", "NUM_WORKERS", 0),
])
def test_validation_errors(default_cfg, section, key, value):
    with pytest.raises(ConfigError):
        apply_overrides(default_cfg, {(section, key): value})


def test_overrides_skip_none(default_cfg):
    cfg = apply_overrides(default_cfg, {("SPECTRUM", "N_MAX"): None, ("RADIATIVE", "L"): 60})
    assert cfg.SPECTRUM.N_MAX == 10
    assert cfg.RADIATIVE.L == 60


def test_overrides_reject_unknown_key(default_cfg):
    with pytest.raises(ConfigError):
        apply_overrides(default_cfg, {("SPECTRUM", "NMAX"): 3})
