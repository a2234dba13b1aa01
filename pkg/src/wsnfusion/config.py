"""Simulation configuration: defaults, JSON loading, dotted overrides."""
from __future__ import annotations

import dataclasses
import hashlib
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from .clustering import DEFAULT_FUZZY_SETS, TrapezoidParams
from .energy import FORMS, RadioParams
from .errors import ConfigError


@dataclass(frozen=True)
class BpnnConfig:
    input_width: int = 16
    hidden: tuple[int, ...] = (8,)
    eta: float = 0.01
    epochs: int = 3000
    train_samples: int = 512


@dataclass(frozen=True)
class SensingConfig:
    """Synthetic field ``base + amplitude*sin(2*pi*round/period) + gx*x + gy*y``."""

    base: float = 25.0
    amplitude: float = 5.0
    period: float = 50.0
    gradient: tuple[float, float] = (0.01, 0.01)
    noise_sigma: float = 0.5

    def truth(self, position, round_index) -> float:
        x, y = position
        return (
            self.base
            + self.amplitude * math.sin(2 * math.pi * round_index / self.period)
            + self.gradient[0] * x
            + self.gradient[1] * y
        )


@dataclass(frozen=True)
class LatencyConfig:
    per_hop_ms: float = 2.0
    per_meter_ms: float = 0.02


@dataclass(frozen=True)
class LossConfig:
    base: float = 0.0003
    coeff: float = 1e-6  # per metre

    def probability(self, distance: float) -> float:
        return min(1.0, self.base + self.coeff * distance)


@dataclass(frozen=True)
class SimConfig:
    n_sensors: int = 90
    n_relays: int = 10
    sensor_energy_j: float = 1.0
    relay_energy_j: float = 2.0
    bs_position: tuple[float, float] = (250.0, 500.0)
    field_size: tuple[float, float] = (500.0, 500.0)
    rounds: int = 100
    r_cluster: float = 75.0
    ch_percentile: float = 0.95
    r_replenish: int | None = None
    strict_radius: bool = False
    energy_form: str = "eq1"
    control_bits: int = 0
    # trapezoid breakpoints (a, b, c, d) for the diagnostic low/medium/high labels
    fuzzy_sets: dict[str, tuple[float, float, float, float]] = field(
        default_factory=lambda: {k: dataclasses.astuple(v) for k, v in DEFAULT_FUZZY_SETS.items()}
    )
    radio: RadioParams = field(default_factory=RadioParams)
    bpnn: BpnnConfig = field(default_factory=BpnnConfig)
    sensing: SensingConfig = field(default_factory=SensingConfig)
    latency: LatencyConfig = field(default_factory=LatencyConfig)
    loss_model: LossConfig = field(default_factory=LossConfig)
    seed: int = 0

    def __post_init__(self):
        if self.n_sensors < 0 or self.n_relays < 0 or self.n_sensors + self.n_relays < 1:
            raise ConfigError("need at least one node")
        if self.rounds < 0:
            raise ConfigError(f"rounds must be >= 0, got {self.rounds}")
        if self.sensor_energy_j <= 0 or self.relay_energy_j <= 0:
            raise ConfigError("initial energies must be > 0")
        if not (self.field_size[0] > 0 and self.field_size[1] > 0):
            raise ConfigError(f"field must have positive area, got {self.field_size}")
        if not 0 < self.ch_percentile < 1:
            raise ConfigError(f"ch_percentile must lie in (0, 1), got {self.ch_percentile}")
        if not self.r_cluster > 0:
            raise ConfigError(f"r_cluster must be > 0, got {self.r_cluster}")
        if self.r_replenish is not None and self.r_replenish < 1:
            raise ConfigError("r_replenish must be a positive round count or null")
        if self.energy_form not in FORMS:
            raise ConfigError(f"energy_form must be one of {FORMS}, got {self.energy_form!r}")
        if self.control_bits < 0:
            raise ConfigError("control_bits must be >= 0")
        if self.bpnn.input_width < 1 or self.bpnn.epochs < 1 or self.bpnn.train_samples < 1:
            raise ConfigError("bpnn sizes must be positive")
        if self.sensing.noise_sigma < 0 or self.sensing.period <= 0:
            raise ConfigError("sensing.noise_sigma must be >= 0 and sensing.period > 0")
        if self.loss_model.base < 0 or self.loss_model.coeff < 0:
            raise ConfigError("loss_model parameters must be >= 0")
        self.trapezoids  # validates the breakpoints

    @property
    def trapezoids(self) -> dict[str, TrapezoidParams]:
        if not self.fuzzy_sets:
            raise ConfigError("fuzzy_sets needs at least one label")
        out = {}
        for name, pts in self.fuzzy_sets.items():
            if len(pts) != 4:
                raise ConfigError(f"fuzzy_sets.{name} needs 4 breakpoints, got {len(pts)}")
            out[name] = TrapezoidParams(*map(float, pts))
        return out

    @property
    def n_nodes(self) -> int:
        return self.n_sensors + self.n_relays

    def to_dict(self) -> dict[str, Any]:
        data = dataclasses.asdict(self)
        # a derived crossover distance is written as null so it tracks e_fs/e_mp
        if self.radio.crossover_consistent:
            data["radio"]["d0"] = None
        return _listify(data)

    def digest(self) -> str:
        canonical = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode()).hexdigest()[:16]

    def replace(self, **changes) -> "SimConfig":
        return dataclasses.replace(self, **changes)


_NESTED = {
    "radio": RadioParams,
    "bpnn": BpnnConfig,
    "sensing": SensingConfig,
    "latency": LatencyConfig,
    "loss_model": LossConfig,
}
_TUPLES = {"bs_position", "field_size", "hidden", "gradient"}


def _listify(obj):
    if isinstance(obj, dict):
        return {k: _listify(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_listify(v) for v in obj]
    return obj


def _build(cls, data: dict, where: str):
    if not isinstance(data, dict):
        raise ConfigError(f"{where or 'config'} must be a JSON object")
    known = {f.name for f in dataclasses.fields(cls)}
    unknown = set(data) - known
    if unknown:
        raise ConfigError(f"unknown config keys {sorted(where + k for k in unknown)}")
    kwargs = {}
    for key, value in data.items():
        if key in _NESTED and cls is SimConfig:
            value = _build(_NESTED[key], value, f"{key}.")
        elif key in _TUPLES and value is not None:
            value = tuple(value)
        elif key == "fuzzy_sets" and cls is SimConfig:
            if not isinstance(value, dict) or not all(isinstance(v, list | tuple) for v in value.values()):
                raise ConfigError("fuzzy_sets must map label names to [a, b, c, d] lists")
            value = {k: tuple(v) for k, v in value.items()}
        kwargs[key] = value
    try:
        return cls(**kwargs)
    except TypeError as exc:
        raise ConfigError(f"bad value in {where or 'config'}: {exc}") from None


def config_from_dict(data: dict) -> SimConfig:
    return _build(SimConfig, data, "")


def _parse_value(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def apply_overrides(data: dict, overrides) -> dict:
    """Apply ``key.sub=value`` strings to a config dict (values parsed as JSON)."""
    data = json.loads(json.dumps(data))
    for item in overrides or ():
        key, sep, raw = item.partition("=")
        if not sep or not key:
            raise ConfigError(f"override {item!r} is not of the form key=value")
        parts = key.split(".")
        node = data
        for part in parts[:-1]:
            if not isinstance(node.get(part), dict):
                raise ConfigError(f"override {key!r}: {part!r} is not a config section")
            node = node[part]
        node[parts[-1]] = _parse_value(raw)
    return data


def load_config(path=None, overrides=(), seed=None) -> SimConfig:
    """Defaults, then the JSON file at ``path``, then overrides, then ``seed``."""
    data = SimConfig().to_dict()
    if path is not None:
        try:
            loaded = json.loads(Path(path).read_text())
        except FileNotFoundError:
            raise ConfigError(f"config file not found: {path}") from None
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config file {path} is not valid JSON: {exc}") from None
        data = _merge(data, loaded)
    data = apply_overrides(data, overrides)
    if seed is not None:
        data["seed"] = int(seed)
    return config_from_dict(data)


def _merge(base: dict, top: dict) -> dict:
    if not isinstance(top, dict):
        raise ConfigError("config file must contain a JSON object")
    out = dict(base)
    for key, value in top.items():
        if isinstance(value, dict) and isinstance(out.get(key), dict):
            out[key] = _merge(out[key], value)
        else:
            out[key] = value
    return out
