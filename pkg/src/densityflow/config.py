"""Run configuration: flat key = value files merged with CLI flags."""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from typing import Optional

from .flow import FlowParams

MODES = ("simulate", "compare", "oracle", "validate", "conformality")
FLOWS = ("density", "ordinary", "rescaled")


class ConfigError(ValueError):
    """Invalid configuration key, value or combination."""


@dataclass
class RunConfig:
    """Everything a command needs, mirrored one-to-one by CLI flags."""

    mode: str = "simulate"
    shape: str = ""              # generator spec or file path
    out: str = ""                # output directory ('' = stdout only)
    flow: str = "density"        # flow variant for simulate
    epsilon: int = -1
    mu: float = 1.0
    cfl: float = 0.25
    max_dt: float = 1e-2
    max_time: float = math.inf
    max_steps: int = 5_000_000
    resample_every: int = 0
    seed: int = 0
    snapshot_stride: int = 100
    shrink_diameter_tol: Optional[float] = None
    roundness_tol: float = 0.05
    guard: float = 1e-3
    fixed_point_tol: float = 1e-9
    max_inradius: float = math.inf
    auto_orient: bool = False
    density: str = "gaussian"    # gaussian | none
    case: str = ""               # validate: a | bi | bii | biii
    checkpoints: str = "0.05,0.1"  # compare: hatted checkpoint times
    rho0: float = 1.0            # oracle: initial sphere radius
    n: int = 1                   # oracle/conformality dimension
    samples: int = 25            # oracle: table rows
    field: str = "gaussian"      # conformality: gaussian | zero | power:k[,C]
    r_min: float = 0.1
    r_max: float = 4.0
    r_count: int = 40

    def __post_init__(self):
        if self.mode not in MODES:
            raise ConfigError(f"mode must be one of {MODES}, got '{self.mode}'")
        if self.flow not in FLOWS:
            raise ConfigError(f"flow must be one of {FLOWS}, got '{self.flow}'")
        if self.density not in ("gaussian", "none"):
            raise ConfigError(f"density must be 'gaussian' or 'none', got '{self.density}'")
        if self.mode in ("simulate", "compare", "validate") and not self.shape:
            raise ConfigError(f"mode '{self.mode}' needs --shape")
        if self.mode == "validate" and self.case not in ("a", "bi", "bii", "biii"):
            raise ConfigError("mode 'validate' needs --case a|bi|bii|biii")
        if self.n not in (1, 2):
            raise ConfigError(f"n must be 1 or 2, got {self.n}")
        try:
            self.flow_params()
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    def flow_params(self) -> FlowParams:
        return FlowParams(
            epsilon=self.epsilon,
            mu=self.mu,
            density_mode=self.density,
            cfl=self.cfl,
            max_dt=self.max_dt,
            max_time=self.max_time,
            max_steps=self.max_steps,
            resample_every=self.resample_every,
            shrink_diameter_tol=self.shrink_diameter_tol,
            roundness_tol=self.roundness_tol,
            guard=self.guard,
            fixed_point_tol=self.fixed_point_tol,
            max_inradius=self.max_inradius,
        )

    def checkpoint_list(self):
        try:
            values = [float(v) for v in self.checkpoints.split(",") if v.strip()]
        except ValueError:
            raise ConfigError(f"checkpoints must be comma-separated numbers, "
                              f"got '{self.checkpoints}'")
        if not values:
            raise ConfigError("need at least one checkpoint time")
        return values


_FIELD_TYPES = {f.name: f.type for f in dataclasses.fields(RunConfig)}


def parse_config_file(path) -> dict:
    """Read a flat ``key = value`` file with ``#`` comments."""
    values = {}
    with open(path, "r", encoding="utf-8") as fh:
        for no, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{no}: expected 'key = value', got {raw.strip()!r}")
            key, _, value = line.partition("=")
            key = key.strip()
            if key not in _FIELD_TYPES:
                raise ConfigError(f"{path}:{no}: unknown key '{key}'")
            values[key] = value.strip()
    return values


def _coerce(key: str, value):
    if value is None:
        return None
    kind = _FIELD_TYPES[key]
    text = str(value).strip()
    try:
        if kind == "int":
            return int(text)
        if kind == "float":
            return float(text)
        if kind == "Optional[float]":
            return None if text.lower() in ("", "none", "auto") else float(text)
        if kind == "bool":
            if text.lower() in ("1", "true", "yes", "on"):
                return True
            if text.lower() in ("0", "false", "no", "off"):
                return False
            raise ValueError(text)
        return text
    except ValueError:
        raise ConfigError(f"bad value for '{key}': {value!r}")


def build_config(file_values: Optional[dict] = None,
                 overrides: Optional[dict] = None) -> RunConfig:
    """Assemble a RunConfig from a config file dict and CLI overrides."""
    merged = {}
    for source in (file_values or {}), (overrides or {}):
        for key, value in source.items():
            if value is None:
                continue
            if key not in _FIELD_TYPES:
                raise ConfigError(f"unknown configuration key '{key}'")
            merged[key] = _coerce(key, value)
    return RunConfig(**merged)
