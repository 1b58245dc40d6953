"""YAML run configuration.

Every key has a default; a config file only needs the keys it changes
(plus ``data`` for commands that read a season file). Defaults are the
full-size settings: p=0.5, q=3, 3000 walks of 3500 hops, d=128,
alpha=0.85 and an 80/20 split.
"""

from __future__ import annotations

import copy
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import yaml

from .embed import EmbedConfig, WalkConfig
from .evaluation import SplitSpec
from .pipeline import ExperimentConfig
from .synth import SynthConfig

DEFAULTS: dict[str, Any] = {
    "seed": 0,
    "data": None,
    "output_dir": "runs",
    "min_minutes": 0.0,
    "team_records": None,
    "walk": {"p": 0.5, "q": 3.0, "num_walks": 3000, "walk_length": 3500, "seed": None},
    "embed": {"d": 128, "window": 10, "negatives": 5, "epochs": 1, "lr_initial": 0.025, "seed": None},
    "model": {"l2": 1.0},
    "pagerank": {"alpha": 0.85, "weighted": True},
    "apm": {"ridge": 100.0},
    "split": {"train_fraction": 0.8, "seed": None},
    "synth": {
        "n_teams": 8,
        "lineups_per_team": 6,
        "ability_sd": 1.0,
        "noise_sd": 0.5,
        "matchup_density": 0.5,
        "minutes_range": [1.0, 20.0],
        "players_per_team": 8,
        "seed": None,
    },
}


class ConfigError(ValueError):
    pass


def _merge(base: dict, override: dict, prefix: str = "") -> dict:
    out = copy.deepcopy(base)
    for key, value in override.items():
        name = f"{prefix}{key}"
        if key not in base:
            raise ConfigError(f"unknown config key {name!r}")
        if isinstance(base[key], dict):
            if not isinstance(value, dict):
                raise ConfigError(f"config key {name!r} must be a mapping")
            out[key] = _merge(base[key], value, name + ".")
        else:
            out[key] = value
    return out


def apply_override(raw: dict, assignment: str) -> None:
    """Apply one ``section.key=value`` override in place (value parsed as YAML)."""
    if "=" not in assignment:
        raise ConfigError(f"override {assignment!r} is not of the form key=value")
    path, value = assignment.split("=", 1)
    keys = path.strip().split(".")
    node = raw
    for k in keys[:-1]:
        node = node.setdefault(k, {})
        if not isinstance(node, dict):
            raise ConfigError(f"override {path!r} descends into a non-mapping")
    node[keys[-1]] = yaml.safe_load(value)


@dataclass(frozen=True)
class RunConfig:
    raw: dict

    @classmethod
    def load(cls, path: str | Path | None, overrides=()) -> "RunConfig":
        raw: dict = {}
        if path is not None:
            try:
                with open(path, encoding="utf-8") as fh:
                    raw = yaml.safe_load(fh) or {}
            except OSError as exc:
                raise ConfigError(f"cannot read config file {path}: {exc.strerror}") from None
            if not isinstance(raw, dict):
                raise ConfigError(f"config file {path} must contain a mapping")
            base = Path(path).resolve().parent
            for key in ("data", "team_records", "output_dir"):
                if isinstance(raw.get(key), str) and not Path(raw[key]).is_absolute():
                    raw[key] = str(base / raw[key])
        for item in overrides:
            apply_override(raw, item)
        return cls(_merge(DEFAULTS, raw))

    def __getitem__(self, key):
        return self.raw[key]

    @property
    def seed(self) -> int:
        return int(self.raw["seed"])

    def _seeded(self, section: str) -> dict:
        values = dict(self.raw[section])
        if values.get("seed") is None:
            values["seed"] = self.seed
        return values

    def require(self, key: str):
        value = self.raw.get(key)
        if value is None:
            raise ConfigError(f"missing config key {key!r}")
        return value

    def _build(self, cls, section: str):
        try:
            return cls(**self._seeded(section))
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"invalid [{section}] settings: {exc}") from None

    def walk(self) -> WalkConfig:
        return self._build(WalkConfig, "walk")

    def embed(self) -> EmbedConfig:
        return self._build(EmbedConfig, "embed")

    def split(self) -> SplitSpec:
        return self._build(SplitSpec, "split")

    def synth(self) -> SynthConfig:
        values = self._seeded("synth")
        values["minutes_range"] = tuple(values["minutes_range"])
        try:
            return SynthConfig(**values)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"invalid [synth] settings: {exc}") from None

    def experiment(self) -> ExperimentConfig:
        return ExperimentConfig(
            walk=self.walk(),
            embed=self.embed(),
            l2=float(self.raw["model"]["l2"]),
            alpha=float(self.raw["pagerank"]["alpha"]),
            pagerank_weighted=bool(self.raw["pagerank"]["weighted"]),
            apm_ridge=float(self.raw["apm"]["ridge"]),
            split=self.split(),
        )
