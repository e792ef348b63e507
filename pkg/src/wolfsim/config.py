"""JSON configuration files and the named reference scenarios.

A config file is merged key by key onto the shipped defaults, so a file only
needs the values it changes. Unknown keys are rejected, and every validation
error names the dotted path of the offending field.
"""

from __future__ import annotations

import copy
import json
import math
from dataclasses import dataclass, fields
from importlib import resources
from pathlib import Path
from typing import Any

from .analysis import IndicatorParams
from .errors import ConfigError
from .excitation import BowParams, PluckParams
from .params import BridgeParams, PlateParams, SimGridConfig, StringParams, SuppressorParams
from .simulator import PhysicalConfig, ScenarioConfig

SCENARIOS = ("PLUCK-0S", "PLUCK-1S", "EXTRA-492", "BOW-0S", "BOW-1S", "BOW-2S")

# Suppressor placements of the reference scenarios (fractions of the side).
PLUCK_OPTIMUM = (0.70, 0.49)
BOW_OPTIMUM = (0.19, 0.49)
BOW_PAIR = ((0.42, 0.49), (0.19, 0.50))
EXTRA_LENGTH = 0.104
EXTRA_FREQUENCY = 492.0

_INDICATOR_KEYS = ("theta", "f_minus", "f_plus", "f_max", "t_star", "log_floor")
_GRID_KEYS = ("dt", "total_time")


def default_config_dict() -> dict:
    text = resources.files("wolfsim").joinpath("data/default_config.json").read_text("utf-8")
    return json.loads(text)


def _merge(base: dict, override: dict, path: str = "") -> dict:
    out = copy.deepcopy(base)
    for key, value in override.items():
        where = f"{path}.{key}" if path else key
        if key not in base:
            raise ConfigError("unknown key", where)
        if isinstance(base[key], dict):
            if not isinstance(value, dict):
                raise ConfigError("expected an object", where)
            out[key] = _merge(base[key], value, where)
        else:
            out[key] = copy.deepcopy(value)
    return out


def _number(value: Any, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"expected a number, got {value!r}", where)
    if not math.isfinite(value):
        raise ConfigError(f"must be finite, got {value!r}", where)
    return float(value)


def _point(value: Any, where: str) -> tuple[float, float]:
    if not isinstance(value, (list, tuple)) or len(value) != 2:
        raise ConfigError(f"expected [x, y], got {value!r}", where)
    return (_number(value[0], f"{where}[0]"), _number(value[1], f"{where}[1]"))


def _build(cls, data: dict, where: str):
    """Construct ``cls`` from ``data``, prefixing errors with ``where``."""
    if not isinstance(data, dict):
        raise ConfigError("expected an object", where)
    names = {f.name for f in fields(cls)}
    kwargs = {}
    for key, value in data.items():
        if key not in names:
            raise ConfigError("unknown key", f"{where}.{key}")
        if isinstance(value, (list, tuple)):
            kwargs[key] = _point(value, f"{where}.{key}")
        else:
            kwargs[key] = _number(value, f"{where}.{key}")
    try:
        return cls(**kwargs)
    except ConfigError as exc:
        raise ConfigError(_strip(exc), f"{where}.{exc.field}" if exc.field else where) from None


def _strip(exc: ConfigError) -> str:
    text = str(exc)
    if exc.field and text.startswith(f"{exc.field}: "):
        return text[len(exc.field) + 2 :]
    return text


def _lengths(value: Any, where: str) -> tuple[float, ...]:
    if not isinstance(value, list) or not value:
        raise ConfigError("expected a non-empty list", where)
    return tuple(_number(v, f"{where}[{k}]") for k, v in enumerate(value))


def config_from_dict(data: dict) -> ScenarioConfig:
    """Validate a full (already merged) config dictionary."""
    d = data
    string = _build(StringParams, d["string"], "string")
    plate = _build(PlateParams, d["body"], "body")
    bridge = _build(BridgeParams, d["bridge"], "bridge")

    exc = d["excitation"]
    kind = exc["kind"]
    if kind not in ("pluck", "bow"):
        raise ConfigError(f"must be 'pluck' or 'bow', got {kind!r}", "excitation.kind")
    pluck = _build(PluckParams, exc["pluck"], "excitation.pluck")
    bow = _build(BowParams, exc["bow"], "excitation.bow")

    num = d["numerics"]
    grid_data = {k: num[k] for k in _GRID_KEYS}
    grid_data.update(d["contact_points"])
    try:
        grid = _build(SimGridConfig, grid_data, "numerics")
    except ConfigError as exc_:
        field = exc_.field or ""
        if field.startswith(("numerics.exc_point", "numerics.rec_point")):
            field = "contact_points" + field[len("numerics"):]
        raise ConfigError(_strip(exc_), field) from None

    notes = d["notes"]
    if not isinstance(d["suppressors"], list):
        raise ConfigError("expected a list", "suppressors")
    suppressors = tuple(
        _build(SuppressorParams, s, f"suppressors[{k}]") for k, s in enumerate(d["suppressors"])
    )
    wolf = notes["wolf_note"]
    if isinstance(wolf, bool) or not isinstance(wolf, int):
        raise ConfigError(f"expected an integer, got {wolf!r}", "notes.wolf_note")
    indicators = _build(IndicatorParams, {k: num[k] for k in _INDICATOR_KEYS}, "numerics")
    try:
        indicators = IndicatorParams(**{**_asdict(indicators), "wolf_note": wolf})
    except ConfigError as exc_:
        raise ConfigError(_strip(exc_), "notes.wolf_note") from None

    lengths = _lengths(notes[f"{kind}_lengths"], f"notes.{kind}_lengths")
    freqs = notes["frequencies"]
    freqs = None if freqs is None else _lengths(freqs, "notes.frequencies")
    name = d.get("name", "")
    if not isinstance(name, str):
        raise ConfigError("expected a string", "name")
    try:
        return ScenarioConfig(
            physical=PhysicalConfig(string, plate, bridge, pluck, bow, grid),
            note_lengths=lengths,
            excitation=kind,
            suppressors=suppressors,
            indicators=indicators,
            note_frequencies=freqs,
            name=name,
        )
    except ConfigError as exc_:
        field = (exc_.field or "").replace("notes.lengths", f"notes.{kind}_lengths")
        raise ConfigError(_strip(exc_), field or None) from None


def _asdict(obj) -> dict:
    return {f.name: getattr(obj, f.name) for f in fields(obj)}


def read_config_dict(path: str | Path | None) -> dict:
    """Defaults merged with the JSON file at ``path`` (defaults alone if None)."""
    base = default_config_dict()
    if path is None:
        return base
    text = Path(path).read_text("utf-8")
    try:
        override = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON at line {exc.lineno}: {exc.msg}", str(path)) from None
    if not isinstance(override, dict):
        raise ConfigError("top level must be an object", str(path))
    return _merge(base, override)


def load_config(path: str | Path | None = None) -> ScenarioConfig:
    """Fully validated scenario from a JSON file merged onto the defaults."""
    return config_from_dict(read_config_dict(path))


def scenario_dict(name: str, base: dict | None = None) -> dict:
    """Config dictionary of a named reference scenario on top of ``base``."""
    if name not in SCENARIOS:
        raise ConfigError(f"unknown scenario {name!r}; choose from {SCENARIOS}", "scenario")
    d = copy.deepcopy(base if base is not None else default_config_dict())
    d["name"] = name
    su_template = d["suppressors"][0] if d["suppressors"] else {}
    default_su = {"mass": 8.5e-3, "frequency": 246.9, "damping": 2.1, **su_template}

    def suppressor(pos, mass_scale=1.0):
        s = dict(default_su)
        s["position"] = list(pos)
        s["mass"] = default_su["mass"] * mass_scale
        return s

    if name.startswith("PLUCK") or name == "EXTRA-492":
        d["excitation"]["kind"] = "pluck"
    else:
        d["excitation"]["kind"] = "bow"

    if name in ("PLUCK-0S", "BOW-0S", "EXTRA-492"):
        d["suppressors"] = []
    elif name == "PLUCK-1S":
        d["suppressors"] = [suppressor(PLUCK_OPTIMUM)]
    elif name == "BOW-1S":
        d["suppressors"] = [suppressor(BOW_OPTIMUM)]
    elif name == "BOW-2S":
        pair = [suppressor(p, 0.5) for p in BOW_PAIR]
        for s in pair:
            s["damping"] = default_su["damping"] * 0.5
        d["suppressors"] = pair

    if name == "EXTRA-492":
        d["notes"]["pluck_lengths"] = [EXTRA_LENGTH]
        d["notes"]["frequencies"] = [EXTRA_FREQUENCY]
        d["notes"]["wolf_note"] = 1
    return d


def build_scenario(name: str, config_path: str | Path | None = None) -> ScenarioConfig:
    return config_from_dict(scenario_dict(name, read_config_dict(config_path)))


@dataclass(frozen=True)
class RunManifest:
    """What one CLI invocation ran, written next to its outputs."""

    scenario: str
    config_path: str | None
    out_dir: str
    resolution: int | None = None
    flags: tuple[str, ...] = ()

    def __post_init__(self):
        if self.scenario not in SCENARIOS:
            raise ConfigError(f"unknown scenario {self.scenario!r}", "scenario")

    def as_dict(self) -> dict:
        return {
            "scenario": self.scenario,
            "config_path": self.config_path,
            "out_dir": self.out_dir,
            "resolution": self.resolution,
            "flags": list(self.flags),
        }
