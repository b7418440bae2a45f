# qklab/config.py

"""
Experiment configuration.

Config files are flat ``key = value`` text with ``#`` comments; lists are
comma-separated and grids may also be written ``start:stop:step`` (stop
included). Values from the file are overridden by the QKLAB_OUT environment
variable (output directory only) and then by command-line overrides.
"""

import configparser
import dataclasses
import hashlib
import json
import logging
import math
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Tuple

from .exceptions import ConfigError, ValidationError

logger = logging.getLogger(__name__)

PRESET_DIR = Path(__file__).resolve().parent / "configs"
OUT_ENV = "QKLAB_OUT"
# fields that do not influence results
UNHASHED = ("out_dir", "parallel", "n_processes")

DEFAULT_P_GRID = tuple(round(0.05 * i, 2) for i in range(16))
DEFAULT_CORRUPTION_GRID = tuple(round(0.1 * i, 1) for i in range(11))


@dataclass(frozen=True)
class ExperimentConfig:
    name: str = "experiment"
    dataset: str = "blobs"
    path: Optional[str] = None
    subset: Optional[int] = None
    subset_mode: str = "seeded"
    seed: int = 0
    cluster_std: float = 3.0
    centers: Optional[Tuple[Tuple[float, float], ...]] = None
    n_qubits: int = 2
    n_layers: int = 1
    entanglement: str = "linear"
    noise_model: str = "local"
    p_grid: Tuple[float, ...] = DEFAULT_P_GRID
    corruption_grid: Tuple[float, ...] = DEFAULT_CORRUPTION_GRID
    c0: float = 1.0
    c0_grid: Tuple[float, ...] = ()
    beta: float = 1.0
    tol: float = 1e-6
    max_iter: int = 1_000_000
    holdout: str = "75/25"
    folds: int = 5
    c_prime: str = "auto"
    export_p: float = 0.0
    strict: bool = False
    parallel: bool = False
    n_processes: Optional[int] = None
    out_dir: str = "results"

    def __post_init__(self):
        self.validate()

    def validate(self):
        from .datasets import SCHEMAS, parse_holdout

        if self.dataset != "blobs" and self.dataset not in SCHEMAS:
            raise ConfigError(f"Unknown dataset: {self.dataset}")
        if self.subset is not None and self.subset < 2:
            raise ConfigError(f"subset must be >= 2, got {self.subset}")
        if self.subset_mode not in ("seeded", "first"):
            raise ConfigError(f"Unknown subset mode: {self.subset_mode}")
        if self.n_qubits < 1 or self.n_layers < 1:
            raise ConfigError("n_qubits and n_layers must be >= 1")
        if self.entanglement not in ("linear", "circular"):
            raise ConfigError(f"Unknown entanglement: {self.entanglement}")
        if self.noise_model not in ("none", "local", "global"):
            raise ConfigError(f"Unknown noise model: {self.noise_model}")
        if not self.p_grid:
            raise ConfigError("p_grid must not be empty")
        p_max = 1.0 if self.noise_model == "global" else 0.75
        for p in self.p_grid:
            if not 0.0 <= p <= p_max:
                raise ConfigError(f"p_grid value {p} outside [0, {p_max}] for {self.noise_model} noise")
        for f in self.corruption_grid:
            if not 0.0 <= f <= 1.0:
                raise ConfigError(f"corruption_grid value {f} outside [0, 1]")
        if not self.c0 > 0 or any(not c > 0 for c in self.c0_grid):
            raise ConfigError("c0 and every c0_grid value must be positive")
        if not self.tol > 0 or self.max_iter < 1:
            raise ConfigError("tol must be positive and max_iter >= 1")
        if self.folds < 2:
            raise ConfigError(f"folds must be >= 2, got {self.folds}")
        try:
            parse_holdout(self.holdout)
        except ValidationError as e:
            raise ConfigError(str(e))
        if self.c_prime not in ("auto", "theoretical"):
            try:
                value = float(self.c_prime)
            except ValueError:
                raise ConfigError(f"c_prime must be 'auto', 'theoretical' or a number, got {self.c_prime}")
            if not value > 0:
                raise ConfigError(f"c_prime must be positive, got {self.c_prime}")
        if not 0.0 <= self.export_p <= p_max:
            raise ConfigError(f"export_p {self.export_p} outside [0, {p_max}]")
        if self.n_processes is not None and self.n_processes < 1:
            raise ConfigError(f"n_processes must be >= 1, got {self.n_processes}")

    def to_dict(self):
        return dataclasses.asdict(self)

    @property
    def config_hash(self):
        """First 12 hex digits of the SHA-256 of the result-relevant fields."""
        payload = {k: v for k, v in self.to_dict().items() if k not in UNHASHED}
        canonical = json.dumps(payload, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:12]

    def replace(self, **changes):
        return dataclasses.replace(self, **changes)


def _parse_bool(text):
    value = text.strip().lower()
    if value in ("1", "true", "yes", "on"):
        return True
    if value in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text}")


def _parse_optional_int(text):
    text = text.strip()
    return None if text.lower() in ("", "none") else int(text)


def _parse_optional_str(text):
    text = text.strip()
    return None if text.lower() in ("", "none") else text


def _parse_grid(text):
    text = text.strip()
    if not text:
        return ()
    if ":" in text:
        start, stop, step = (float(v) for v in text.split(":"))
        if step <= 0:
            raise ValueError("grid step must be positive")
        count = int(math.floor((stop - start) / step + 1e-9)) + 1
        return tuple(round(start + i * step, 10) for i in range(count))
    return tuple(float(v) for v in text.split(","))


def _parse_centers(text):
    text = text.strip()
    if text.lower() in ("", "none"):
        return None
    centers = tuple(tuple(float(v) for v in part.split(",")) for part in text.split(";"))
    if len(centers) != 2 or any(len(c) != 2 for c in centers):
        raise ValueError("centers must be two 2-D points, e.g. '-4,-4; 4,4'")
    return centers


PARSERS = {
    "name": str.strip,
    "dataset": str.strip,
    "path": _parse_optional_str,
    "subset": _parse_optional_int,
    "subset_mode": str.strip,
    "seed": int,
    "cluster_std": float,
    "centers": _parse_centers,
    "n_qubits": int,
    "n_layers": int,
    "entanglement": str.strip,
    "noise_model": lambda v: v.strip().lower(),
    "p_grid": _parse_grid,
    "corruption_grid": _parse_grid,
    "c0": float,
    "c0_grid": _parse_grid,
    "beta": float,
    "tol": float,
    "max_iter": int,
    "holdout": str.strip,
    "folds": int,
    "c_prime": lambda v: v.strip().lower(),
    "export_p": float,
    "strict": _parse_bool,
    "parallel": _parse_bool,
    "n_processes": _parse_optional_int,
    "out_dir": str.strip,
}


def parse_values(raw):
    """Convert a mapping of key -> text into typed field values."""
    values = {}
    for key, text in raw.items():
        key = key.strip().lower()
        if key not in PARSERS:
            raise ConfigError(f"Unknown config key: {key}")
        try:
            values[key] = PARSERS[key](text)
        except ValueError as e:
            raise ConfigError(f"Bad value for '{key}': {text!r} ({e})")
    return values


def read_config_file(path):
    """Parse a flat key = value file into a dict of typed values."""
    path = resolve_config_path(path)
    parser = configparser.ConfigParser(inline_comment_prefixes=("#",), interpolation=None)
    try:
        parser.read_string("[experiment]\n" + path.read_text(), source=str(path))
    except configparser.Error as e:
        raise ConfigError(f"{path}: {e}")
    return parse_values(dict(parser["experiment"]))


def resolve_config_path(name_or_path):
    """A file path, or the name of a shipped preset (e.g. 'gaussian')."""
    path = Path(name_or_path)
    if path.exists():
        return path
    preset = PRESET_DIR / f"{name_or_path}.cfg"
    if preset.exists():
        return preset
    raise ConfigError(f"Config file not found: {name_or_path}")


def parse_override(text):
    """'key=value' -> (key, value)."""
    if "=" not in text:
        raise ConfigError(f"Override must look like key=value, got {text!r}")
    key, value = text.split("=", 1)
    return key.strip(), value


def load_config(path=None, overrides=None, env=None):
    """
    Build an ExperimentConfig.

    Parameters:
    path (str, optional): Config file or preset name; defaults are used when None.
    overrides (dict, optional): key -> text values applied last.
    env (mapping, optional): Environment (defaults to os.environ); QKLAB_OUT
        replaces the file's out_dir.

    Raises:
    ConfigError: on unknown keys, unparsable values or failed validation.
    """
    env = os.environ if env is None else env
    values = read_config_file(path) if path is not None else {}
    if env.get(OUT_ENV):
        values["out_dir"] = env[OUT_ENV]
    if overrides:
        values.update(parse_values(overrides))
    try:
        config = ExperimentConfig(**values)
    except ConfigError:
        raise
    except (TypeError, ValidationError) as e:
        raise ConfigError(str(e))
    logger.debug("Loaded config %s (hash %s)", config.name, config.config_hash)
    return config
