"""Scenario configuration: YAML in, validated dataclasses out.

All quantities use c = 1 and hbar = 1.  Validation collects every violated
guard before reporting, so a broken file is fixed in one pass.
"""
from __future__ import annotations

import dataclasses
import math
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import yaml

from .errors import ConfigError

DEFAULT_SEED = 20011016
SCENARIOS = ("twin", "gravity_lift", "gw_disk", "custom_worldlines")
SWEEP_AXES = ("pulse_halfwidth_periods", "n_samples", "velocity")
SEGMENT_KINDS = ("inertial", "proper_acceleration", "static_potential", "prescribed_rate")
FORMATS = ("csv", "json")


@dataclass
class TwinParams:
    velocity: float = 0.6
    leg_duration: float = 5.0
    acceleration: float | None = None   # None: instantaneous turnaround
    matched: bool = True


@dataclass
class GravityLiftParams:
    g: float = 1e-6
    height: float = 1.0
    wait: float = 1e6
    transport_duration: float = 10.0
    transport_deviation: float = 0.0   # peak fractional dilation of the sin^2 transport bump


@dataclass
class GwDiskParams:
    amplitude: float = 1e-6
    omega: float = 2 * math.pi
    duration: float = 0.5
    phase_offset: float = 0.0


@dataclass
class SegmentSpec:
    """``value`` is the velocity, acceleration, potential, or rate amplitude, by kind."""

    kind: str
    duration: float
    value: float = 0.0
    omega: float = 0.0
    phase: float = 0.0


@dataclass
class CustomParams:
    A: list[SegmentSpec] = field(default_factory=list)
    B: list[SegmentSpec] = field(default_factory=list)


PARAM_TYPES = {
    "twin": TwinParams,
    "gravity_lift": GravityLiftParams,
    "gw_disk": GwDiskParams,
    "custom_worldlines": CustomParams,
}


@dataclass
class ClockConfig:
    gap: float = 0.35
    epsilon: float = 0.0                 # gap shift inside acceleration/transport segments
    perturb: list[str] = field(default_factory=lambda: ["A", "B"])


@dataclass
class MeasurementSection:
    pulse_halfwidth_periods: float = 0.01
    pulse_area: float | None = None
    truncation: float = 5.0
    tol: float = 1e-9


@dataclass
class TrialsConfig:
    n_samples: int = 10000
    seed: int | None = None
    repetitions: int = 200


@dataclass
class SweepConfig:
    axis: str | None = None
    values: list[float] = field(default_factory=list)


@dataclass
class OutputConfig:
    path: str = "results.csv"
    format: str = "csv"


@dataclass
class ScenarioConfig:
    scenario: str = "twin"
    params: Any = field(default_factory=TwinParams)
    clock: ClockConfig = field(default_factory=ClockConfig)
    measurement: MeasurementSection = field(default_factory=MeasurementSection)
    trials: TrialsConfig = field(default_factory=TrialsConfig)
    sweep: SweepConfig = field(default_factory=SweepConfig)
    output: OutputConfig = field(default_factory=OutputConfig)

    @property
    def seed(self) -> int:
        return DEFAULT_SEED if self.trials.seed is None else int(self.trials.seed)

    @property
    def seed_defaulted(self) -> bool:
        return self.trials.seed is None


# -- (de)serialization ------------------------------------------------------

def to_dict(cfg: ScenarioConfig) -> dict:
    d = {
        "scenario": {"kind": cfg.scenario, cfg.scenario: dataclasses.asdict(cfg.params)},
    }
    for name in ("clock", "measurement", "trials", "sweep", "output"):
        d[name] = dataclasses.asdict(getattr(cfg, name))
    return d


def serialize(cfg: ScenarioConfig) -> str:
    return yaml.safe_dump(to_dict(cfg), sort_keys=False)


def _build(cls, data, where: str, errors: list[str]):
    if data is None:
        return cls()
    if not isinstance(data, dict):
        errors.append(f"{where}: expected a mapping, got {type(data).__name__}")
        return cls()
    names = {f.name for f in dataclasses.fields(cls)}
    for key in data:
        if key not in names:
            errors.append(f"{where}.{key}: unknown key")
    kwargs = {k: v for k, v in data.items() if k in names}
    try:
        return cls(**kwargs)
    except TypeError as exc:
        errors.append(f"{where}: {exc}")
        return cls()


def from_dict(data: dict) -> ScenarioConfig:
    errors: list[str] = []
    if not isinstance(data, dict):
        raise ConfigError("config root must be a mapping")
    for key in data:
        if key not in ("scenario", "clock", "measurement", "trials", "sweep", "output"):
            errors.append(f"{key}: unknown section")

    sc = data.get("scenario") or {}
    kind = sc.get("kind", "twin") if isinstance(sc, dict) else None
    if kind not in SCENARIOS:
        errors.append(f"scenario.kind: must be one of {SCENARIOS}, got {kind!r}")
        kind = "twin"
    if isinstance(sc, dict):
        for key in sc:
            if key != "kind" and key not in SCENARIOS:
                errors.append(f"scenario.{key}: unknown key")
    raw = sc.get(kind) if isinstance(sc, dict) else None
    if kind == "custom_worldlines":
        params = CustomParams()
        raw = raw or {}
        for label in ("A", "B"):
            segs = raw.get(label) or []
            if not isinstance(segs, list):
                errors.append(f"scenario.custom_worldlines.{label}: expected a list")
                continue
            getattr(params, label).extend(
                _build(SegmentSpec, s, f"scenario.custom_worldlines.{label}[{i}]", errors)
                if isinstance(s, dict) and "kind" in s and "duration" in s
                else _missing_segment(f"scenario.custom_worldlines.{label}[{i}]", errors)
                for i, s in enumerate(segs)
            )
    else:
        params = _build(PARAM_TYPES[kind], raw, f"scenario.{kind}", errors)

    cfg = ScenarioConfig(
        scenario=kind,
        params=params,
        clock=_build(ClockConfig, data.get("clock"), "clock", errors),
        measurement=_build(MeasurementSection, data.get("measurement"), "measurement", errors),
        trials=_build(TrialsConfig, data.get("trials"), "trials", errors),
        sweep=_build(SweepConfig, data.get("sweep"), "sweep", errors),
        output=_build(OutputConfig, data.get("output"), "output", errors),
    )
    errors += validate(cfg)
    if errors:
        raise ConfigError("invalid config", errors)
    return cfg


def _missing_segment(where, errors):
    errors.append(f"{where}: segment needs 'kind' and 'duration'")
    return SegmentSpec("inertial", 1.0)


class _Loader(yaml.SafeLoader):
    """Safe loader that also reads ``1e6`` / ``1.0e6`` (no exponent sign) as floats."""


_Loader.add_implicit_resolver(
    "tag:yaml.org,2002:float",
    re.compile(r"""^(?:[-+]?(?:[0-9][0-9_]*)\.[0-9_]*(?:[eE][-+]?[0-9]+)?
                  |[-+]?(?:[0-9][0-9_]*)(?:[eE][-+]?[0-9]+)
                  |[-+]?\.[0-9_]+(?:[eE][-+]?[0-9]+)?
                  |[-+]?\.(?:inf|Inf|INF)
                  |\.(?:nan|NaN|NAN))$""", re.X),
    list("-+0123456789."),
)


def parse(text: str) -> ScenarioConfig:
    try:
        data = yaml.load(text, Loader=_Loader)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        where = f" at line {mark.line + 1}, column {mark.column + 1}" if mark else ""
        raise ConfigError(f"parse error{where}: {getattr(exc, 'problem', exc)}") from exc
    return from_dict(data or {})


def load_config(path: str | Path) -> ScenarioConfig:
    p = Path(path)
    if not p.is_file():
        raise ConfigError(f"config file not found: {p}")
    return parse(p.read_text())


# -- validation -------------------------------------------------------------

def _num(errors, where, value, *, positive=False, nonneg=False, below=None, integer=False):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        errors.append(f"{where}: expected a number, got {value!r}")
        return False
    if integer and not float(value).is_integer():
        errors.append(f"{where}: expected an integer, got {value!r}")
        return False
    if not math.isfinite(value):
        errors.append(f"{where}: must be finite")
        return False
    if positive and not value > 0:
        errors.append(f"{where}: must be > 0, got {value}")
        return False
    if nonneg and value < 0:
        errors.append(f"{where}: must be >= 0, got {value}")
        return False
    if below is not None and not abs(value) < below:
        errors.append(f"{where}: guard |value| < {below} violated, got {value}")
        return False
    return True


def _validate_segment(errors, where, seg: SegmentSpec):
    if seg.kind not in SEGMENT_KINDS:
        errors.append(f"{where}.kind: must be one of {SEGMENT_KINDS}, got {seg.kind!r}")
        return
    _num(errors, f"{where}.duration", seg.duration, positive=True)
    if seg.kind == "inertial":
        _num(errors, f"{where}.value", seg.value, below=1.0)
    elif seg.kind == "proper_acceleration":
        _num(errors, f"{where}.value", seg.value)
    elif seg.kind == "static_potential":
        _num(errors, f"{where}.value", seg.value, below=1e-2)
    else:
        # rate 1 + value*sin(omega t + phase) must stay in (0, 1.01]
        _num(errors, f"{where}.value", seg.value, below=1e-2)
        _num(errors, f"{where}.omega", seg.omega)
        _num(errors, f"{where}.phase", seg.phase)


def validate(cfg: ScenarioConfig) -> list[str]:
    """Every guard that can be checked without running a simulation."""
    e: list[str] = []
    p = cfg.params
    if cfg.scenario == "twin":
        _num(e, "scenario.twin.velocity", p.velocity, below=1.0)
        _num(e, "scenario.twin.leg_duration", p.leg_duration, positive=True)
        if p.acceleration is not None:
            _num(e, "scenario.twin.acceleration", p.acceleration, positive=True)
        if not isinstance(p.matched, bool):
            e.append("scenario.twin.matched: expected true/false")
    elif cfg.scenario == "gravity_lift":
        ok = _num(e, "scenario.gravity_lift.g", p.g) & _num(e, "scenario.gravity_lift.height", p.height)
        if ok and not abs(p.g * p.height) < 1e-2:
            e.append(f"scenario.gravity_lift: weak-field guard |g*h| < 1e-2 violated, g*h = {p.g * p.height}")
        _num(e, "scenario.gravity_lift.wait", p.wait, nonneg=True)
        _num(e, "scenario.gravity_lift.transport_duration", p.transport_duration, positive=True)
        _num(e, "scenario.gravity_lift.transport_deviation", p.transport_deviation, below=1e-2)
    elif cfg.scenario == "gw_disk":
        _num(e, "scenario.gw_disk.amplitude", p.amplitude, below=1e-2)
        _num(e, "scenario.gw_disk.omega", p.omega)
        _num(e, "scenario.gw_disk.duration", p.duration, positive=True)
        _num(e, "scenario.gw_disk.phase_offset", p.phase_offset)
    else:
        for label in ("A", "B"):
            segs = getattr(p, label)
            if not segs:
                e.append(f"scenario.custom_worldlines.{label}: needs at least one segment")
            for i, seg in enumerate(segs):
                _validate_segment(e, f"scenario.custom_worldlines.{label}[{i}]", seg)

    _num(e, "clock.gap", cfg.clock.gap, positive=True)
    _num(e, "clock.epsilon", cfg.clock.epsilon)
    if not isinstance(cfg.clock.perturb, list) or any(t not in ("A", "B") for t in cfg.clock.perturb):
        e.append(f"clock.perturb: must be a list drawn from ['A', 'B'], got {cfg.clock.perturb!r}")

    m = cfg.measurement
    _num(e, "measurement.pulse_halfwidth_periods", m.pulse_halfwidth_periods, positive=True)
    if m.pulse_area is not None and _num(e, "measurement.pulse_area", m.pulse_area, positive=True):
        if m.pulse_area > math.pi:
            e.append(f"measurement.pulse_area: must lie in (0, pi], got {m.pulse_area}")
    _num(e, "measurement.truncation", m.truncation, positive=True)
    _num(e, "measurement.tol", m.tol, positive=True)

    t = cfg.trials
    _num(e, "trials.n_samples", t.n_samples, positive=True, integer=True)
    _num(e, "trials.repetitions", t.repetitions, positive=True, integer=True)
    if t.seed is not None and _num(e, "trials.seed", t.seed, nonneg=True, integer=True):
        if t.seed >= 2 ** 64:
            e.append("trials.seed: must fit in 64 bits")

    s = cfg.sweep
    if s.axis is not None:
        if s.axis not in SWEEP_AXES:
            e.append(f"sweep.axis: must be one of {SWEEP_AXES}, got {s.axis!r}")
        elif s.axis == "velocity" and cfg.scenario != "twin":
            e.append("sweep.axis: velocity sweeps need the twin scenario")
        if not isinstance(s.values, list) or not s.values:
            e.append("sweep.values: needs a non-empty list")
        else:
            for i, v in enumerate(s.values):
                where = f"sweep.values[{i}]"
                if s.axis == "velocity":
                    _num(e, where, v, below=1.0)
                elif s.axis == "n_samples":
                    _num(e, where, v, positive=True, integer=True)
                else:
                    _num(e, where, v, positive=True)
    if cfg.output.format not in FORMATS:
        e.append(f"output.format: must be one of {FORMATS}, got {cfg.output.format!r}")
    return e
