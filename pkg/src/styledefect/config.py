"""TOML run configuration.  Relative paths resolve against the config file's directory."""

from __future__ import annotations

import sys
from dataclasses import dataclass, field
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .errors import ConfigError, TrainingError
from .learners import DEFAULT_HYPERPARAMS, canonical_algorithm
from .repo import DEFAULT_KEYWORDS, SOURCE_EXTENSIONS

KNOWN_KEYS = {"projects", "keywords", "extensions", "vif_threshold", "smote_k", "hyperparams",
              "master_seed", "output_dir", "branch", "max_combo_size"}


@dataclass(frozen=True)
class ProjectConfig:
    name: str
    source: Path
    releases_file: Path


@dataclass(frozen=True)
class Config:
    projects: tuple[ProjectConfig, ...]
    keywords: tuple[str, ...] = DEFAULT_KEYWORDS
    extensions: tuple[str, ...] = SOURCE_EXTENSIONS
    vif_threshold: float = 5.0
    smote_k: int = 5
    hyperparams: dict = field(default_factory=dict)
    master_seed: int = 1
    output_dir: Path = Path("out")
    branch: str = "master"
    max_combo_size: int = 3

    def project(self, name: str) -> ProjectConfig:
        for p in self.projects:
            if p.name == name:
                return p
        raise ConfigError(f"no project named {name!r} in the configuration")


def _require(cond: bool, message: str):
    if not cond:
        raise ConfigError(message)


def parse_config(data: dict, base: Path) -> Config:
    unknown = sorted(set(data) - KNOWN_KEYS)
    _require(not unknown, f"unknown configuration keys: {', '.join(unknown)}")
    raw_projects = data.get("projects")
    _require(isinstance(raw_projects, list) and raw_projects, "configuration needs at least one [[projects]] entry")
    projects = []
    for i, p in enumerate(raw_projects):
        _require(isinstance(p, dict), f"projects[{i}] must be a table")
        missing = [k for k in ("name", "source", "releases_file") if k not in p]
        _require(not missing, f"projects[{i}] lacks {', '.join(missing)}")
        projects.append(ProjectConfig(str(p["name"]), base / str(p["source"]), base / str(p["releases_file"])))
    names = [p.name for p in projects]
    _require(len(set(names)) == len(names), "project names must be unique")

    vif = float(data.get("vif_threshold", 5.0))
    _require(vif > 1, f"vif_threshold must be > 1, got {vif}")
    k = data.get("smote_k", 5)
    _require(isinstance(k, int) and k >= 1, f"smote_k must be an integer >= 1, got {k!r}")
    seed = data.get("master_seed", 1)
    _require(isinstance(seed, int), f"master_seed must be an integer, got {seed!r}")
    combo = data.get("max_combo_size", 3)
    _require(isinstance(combo, int) and 1 <= combo <= 3, "max_combo_size must be 1, 2 or 3")

    hyper = {}
    for name, values in (data.get("hyperparams") or {}).items():
        try:
            algo = canonical_algorithm(name)
        except TrainingError as exc:
            raise ConfigError(str(exc)) from None
        _require(isinstance(values, dict), f"hyperparams.{name} must be a table")
        unknown = sorted(set(values) - set(DEFAULT_HYPERPARAMS[algo]))
        _require(not unknown, f"unknown hyperparameters for {algo}: {', '.join(unknown)}")
        hyper[algo] = dict(values)

    keywords = tuple(str(w) for w in data.get("keywords", DEFAULT_KEYWORDS))
    extensions = tuple(str(e).lstrip(".").lower() for e in data.get("extensions", SOURCE_EXTENSIONS))
    _require(bool(extensions), "extensions must not be empty")
    return Config(tuple(projects), keywords, extensions, vif, k, hyper, seed,
                  base / str(data.get("output_dir", "out")), str(data.get("branch", "master")), combo)


def load_config(path: str | Path, check_files: bool = True) -> Config:
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"configuration file not found: {path}")
    try:
        data = tomllib.loads(path.read_text(encoding="utf-8"))
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from None
    cfg = parse_config(data, path.resolve().parent)
    if check_files:
        for p in cfg.projects:
            _require(p.releases_file.is_file(), f"releases_file not found for {p.name}: {p.releases_file}")
    return cfg
