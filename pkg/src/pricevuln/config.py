"""Run configuration: one structured file (JSON or YAML) plus command-line overrides."""

from __future__ import annotations

import dataclasses
import json
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from .zones import ThetaGrid


class ConfigError(ValueError):
    pass


_CHOICES = {
    "center_update": ("median", "mean"),
    "switch_rule": ("pairwise", "strict"),
    "benefit_basis": ("actual", "normalized"),
    "disguise_extent": ("cr", "full"),
}


@dataclass
class RunConfig:
    profiles_path: str | None = None
    prices_path: str | None = None
    synthetic_prices: bool = False
    k: int = 30
    seed: int = 0
    H: int = 24
    center_update: str = "median"
    switch_rule: str = "pairwise"
    benefit_basis: str = "actual"
    disguise_extent: str = "cr"
    theta_grid: dict = field(default_factory=lambda: {"start": 0.0, "stop": 0.5, "step": 0.005})
    utility: dict | None = None  # {"u_max": .., "c": ..}
    output_dir: str = "out"
    max_iters: int = 300
    tol: float = 1e-10
    threads: int | None = None

    def grid(self) -> ThetaGrid:
        g = self.theta_grid
        return ThetaGrid(float(g["start"]), float(g["stop"]), float(g["step"]))

    def n_threads(self) -> int:
        return self.threads or os.cpu_count() or 1

    def validate(self) -> "RunConfig":
        for key, allowed in _CHOICES.items():
            if getattr(self, key) not in allowed:
                raise ConfigError(f"{key} must be one of {allowed}, got {getattr(self, key)!r}")
        if self.k < 1 or self.H < 1 or self.max_iters < 1:
            raise ConfigError("k, H and max_iters must be positive")
        if not 0 <= self.seed < 2**64:
            raise ConfigError("seed must be a 64-bit unsigned integer")
        try:
            self.grid()
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"bad theta_grid: {exc}") from exc
        if self.utility is not None:
            extra = set(self.utility) - {"u_max", "c"}
            if extra or float(self.utility.get("c", 0.0)) < 0:
                raise ConfigError("utility takes u_max and a non-negative c")
        return self

    def echo(self) -> dict[str, Any]:
        """Config as written to the manifest; threads are left out as they never change results."""
        d = dataclasses.asdict(self)
        d.pop("threads")
        return d


def load_config(path: str | Path) -> dict[str, Any]:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror or exc}") from exc
    if path.suffix.lower() in (".yaml", ".yml"):
        import yaml

        raw = yaml.safe_load(text) or {}
    else:
        raw = json.loads(text)
    if not isinstance(raw, dict):
        raise ConfigError(f"{path}: top level must be a mapping")
    return raw


def make_config(file_values: dict[str, Any] | None = None, **overrides: Any) -> RunConfig:
    """Merge file values with non-None overrides (flags win) into a validated config."""
    known = {f.name for f in dataclasses.fields(RunConfig)}
    values = dict(file_values or {})
    unknown = set(values) - known
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    grid = dict(RunConfig().theta_grid)
    grid.update(values.pop("theta_grid", None) or {})
    for key in ("start", "stop", "step"):
        v = overrides.pop(f"theta_{key}", None)
        if v is not None:
            grid[key] = v
    values["theta_grid"] = grid
    values.update({k: v for k, v in overrides.items() if v is not None})
    unknown = set(values) - known
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    return RunConfig(**values).validate()
