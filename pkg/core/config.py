import copy
import os
from pathlib import Path
from typing import Any, Dict, Mapping, Optional, Tuple

import yaml
from easydict import EasyDict as edict

from core.errors import ConfigError

__all__ = [
    "DEFAULT_CONFIG",
    "RunConfig",
    "CONFIG_ENV_VAR",
    "default_config_path",
    "load_config",
    "apply_overrides",
    "validate_config",
]

CONFIG_ENV_VAR = "BOUNCER_CONFIG"

# sectioned run configuration with attribute access
RunConfig = edict

# 默认配置, 与 configs/config.yaml 保持一致
DEFAULT_CONFIG: Dict[str, Dict[str, Any]] = {
    "PHYSICS": {
        "MASS": 1.674927e-27,           # kg, neutron
        "GRAVITY": 9.806,               # m/s^2
        "HBAR": 1.054571817e-34,        # J s
        "PLANCK_MASS": 2.176434e-8,     # kg
        "SPEED_OF_LIGHT": 2.99792458e8, # m/s
    },
    "SPECTRUM": {
        "S_LIST": [1, 2, 3, 4, 5, 6, 7, 8, 9, 10],
        "N_MAX": 10,
        "MAX_DIMENSION": 50_000_000,
        "PROFILE_S": 10,
        "PROFILE_N": 1,
        "PROFILE_RESOLUTION": 400,
    },
    "VIBRATION": {
        "S_A": 1.0e-10,                 # m^2 Hz^3
        "T_N": 1.0e5,                   # s
        "DELTA_T_EXP": 1.0,             # s
        "LEVEL": 1,
        "N_SUM_MAX": 20,
        "S": 10,
        "UPSILON_POWER": 1,
    },
    "EXPERIMENT": {
        "LEVELS": [1, 2],
        "DELTA_E_EXP_PEV": [0.102, 0.051],
        "G_FACTOR": 1.0e7,
        "HEIGHTS_COMBINE": "quadrature",
    },
    "RADIATIVE": {
        "FROM_LEVEL": 2,
        "TO_LEVEL": 1,
        "L": 30,
        "S_SWEEP": [10, 14, 20],
        "QUADRUPOLE_POWER": 3,
    },
    "OUTPUT": {
        "FORMAT": "csv",
        "OUT": None,
        "NUM_WORKERS": 1,
    },
}

_POSITIVE_KEYS: Tuple[Tuple[str, str], ...] = (
    ("PHYSICS", "MASS"),
    ("PHYSICS", "GRAVITY"),
    ("PHYSICS", "HBAR"),
    ("PHYSICS", "PLANCK_MASS"),
    ("PHYSICS", "SPEED_OF_LIGHT"),
    ("SPECTRUM", "MAX_DIMENSION"),
    ("SPECTRUM", "PROFILE_S"),
    ("SPECTRUM", "PROFILE_N"),
    ("SPECTRUM", "PROFILE_RESOLUTION"),
    ("VIBRATION", "S_A"),
    ("VIBRATION", "T_N"),
    ("VIBRATION", "DELTA_T_EXP"),
    ("VIBRATION", "LEVEL"),
    ("VIBRATION", "S"),
    ("EXPERIMENT", "G_FACTOR"),
    ("RADIATIVE", "FROM_LEVEL"),
    ("RADIATIVE", "TO_LEVEL"),
)

_FORMATS = ("csv", "json", "table")


def default_config_path() -> Path:
    """Config path from ``$BOUNCER_CONFIG`` or the bundled default."""
    env = os.environ.get(CONFIG_ENV_VAR)
    if env:
        return Path(env)
    return Path(__file__).resolve().parents[1] / "configs" / "config.yaml"


def _merge(defaults: Mapping[str, Any], raw: Mapping[str, Any], where: str = "") -> Dict[str, Any]:
    """Recursively overlay ``raw`` on ``defaults``, rejecting unknown keys."""
    merged = copy.deepcopy(dict(defaults))
    for key, value in raw.items():
        path = f"{where}.{key}" if where else str(key)
        if key not in defaults:
            raise ConfigError(f"Unknown config key: {path}")
        if isinstance(defaults[key], dict):
            if not isinstance(value, Mapping):
                raise ConfigError(f"Config section {path} must be a mapping, got {type(value).__name__}")
            merged[key] = _merge(defaults[key], value, path)
        else:
            merged[key] = value
    return merged


def load_config(cfg_path: Optional[str] = None) -> RunConfig:
    """Load a YAML configuration file and return a validated ``EasyDict``.

    The file keeps the sectioned layout of ``configs/config.yaml``; any
    section or key may be omitted and falls back to :data:`DEFAULT_CONFIG`.
    JSON files with the same layout load too, JSON being a subset of YAML::

        cfg = load_config("configs/config.yaml")
        print(cfg.SPECTRUM.N_MAX)

    Args:
        cfg_path: Path to the configuration file; ``None`` means
            :func:`default_config_path`.

    Returns:
        EasyDict: nested mapping with attribute access.
    """
    path = Path(cfg_path) if cfg_path is not None else default_config_path()
    if not path.exists():
        raise FileNotFoundError(f"Config file not found: {path}")

    with path.open("r", encoding="utf-8") as f:
        try:
            raw_cfg = yaml.safe_load(f) or {}
        except yaml.YAMLError as exc:
            raise ConfigError(f"Cannot parse config file {path}: {exc}") from exc

    if not isinstance(raw_cfg, Mapping):
        raise ConfigError(f"Config file {path} must contain a mapping at top level")

    return validate_config(edict(_merge(DEFAULT_CONFIG, raw_cfg)))


def apply_overrides(cfg: edict, overrides: Mapping[Tuple[str, str], Any]) -> edict:
    """Set ``(SECTION, KEY) -> value`` pairs (``None`` values are skipped) and re-validate."""
    for (section, key), value in overrides.items():
        if value is None:
            continue
        if section not in cfg or key not in cfg[section]:
            raise ConfigError(f"Unknown config key: {section}.{key}")
        cfg[section][key] = value
    return validate_config(cfg)


def _as_number(cfg: edict, section: str, key: str) -> float:
    value = cfg[section][key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{section}.{key} must be a number, got {value!r}")
    return float(value)


def validate_config(cfg: edict) -> edict:
    """Check ranges and enumerations; raise :class:`ConfigError` on the first problem."""
    for section, key in _POSITIVE_KEYS:
        if _as_number(cfg, section, key) <= 0:
            raise ConfigError(f"{section}.{key} must be positive, got {cfg[section][key]!r}")

    if _as_number(cfg, "EXPERIMENT", "G_FACTOR") < 1:
        raise ConfigError("EXPERIMENT.G_FACTOR must be >= 1")
    if _as_number(cfg, "SPECTRUM", "PROFILE_S") < 1:
        raise ConfigError("SPECTRUM.PROFILE_S must be >= 1")

    s_list = cfg.SPECTRUM.S_LIST
    if not s_list or any(isinstance(s, bool) or not isinstance(s, (int, float)) or s < 1 for s in s_list):
        raise ConfigError(f"SPECTRUM.S_LIST must be a non-empty list of numbers >= 1, got {s_list!r}")
    sweep = cfg.RADIATIVE.S_SWEEP
    if len(sweep) < 2 or any(not isinstance(s, (int, float)) or s < 1 for s in sweep):
        raise ConfigError(f"RADIATIVE.S_SWEEP needs at least two values >= 1, got {sweep!r}")

    for section, key, minimum in (("SPECTRUM", "N_MAX", 1), ("VIBRATION", "N_SUM_MAX", 2),
                                  ("RADIATIVE", "L", 10), ("OUTPUT", "NUM_WORKERS", 1)):
        value = cfg[section][key]
        if isinstance(value, bool) or not isinstance(value, int) or value < minimum:
            raise ConfigError(f"{section}.{key} must be an integer >= {minimum}, got {value!r}")

    if cfg.VIBRATION.N_SUM_MAX <= cfg.VIBRATION.LEVEL:
        raise ConfigError("VIBRATION.N_SUM_MAX must exceed VIBRATION.LEVEL")
    if cfg.RADIATIVE.FROM_LEVEL == cfg.RADIATIVE.TO_LEVEL:
        raise ConfigError("RADIATIVE.FROM_LEVEL and TO_LEVEL must differ")
    if cfg.RADIATIVE.QUADRUPOLE_POWER not in (2, 3):
        raise ConfigError("RADIATIVE.QUADRUPOLE_POWER must be 2 or 3")
    if cfg.VIBRATION.UPSILON_POWER not in (1, 3):
        raise ConfigError("VIBRATION.UPSILON_POWER must be 1 or 3")

    levels = cfg.EXPERIMENT.LEVELS
    energies = cfg.EXPERIMENT.DELTA_E_EXP_PEV
    if len(levels) != len(energies) or not levels:
        raise ConfigError("EXPERIMENT.LEVELS and DELTA_E_EXP_PEV must have the same non-zero length")
    if any(e <= 0 for e in energies) or any(int(n) != n or n < 1 for n in levels):
        raise ConfigError("EXPERIMENT levels must be positive integers and energies positive")
    if cfg.EXPERIMENT.HEIGHTS_COMBINE not in ("quadrature", "linear"):
        raise ConfigError("EXPERIMENT.HEIGHTS_COMBINE must be 'quadrature' or 'linear'")

    if cfg.OUTPUT.FORMAT not in _FORMATS:
        raise ConfigError(f"OUTPUT.FORMAT must be one of {_FORMATS}, got {cfg.OUTPUT.FORMAT!r}")
    return cfg
