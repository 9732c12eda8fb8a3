"""Scenario configuration and its flat text format.

Grammar (one entry per line)::

    # comment
    section.key = value          # trailing comments allowed
    setpoint.0.r_d = 0, 0, 0.3   # vectors are comma-separated

Values are floats, ints, ``true``/``false`` or bare strings depending on the
field. A file is applied on top of the built-in defaults of the scenario
named by ``sim.scenario`` (and ``sim.robot`` for ``custom``). If a file
defines any ``setpoint.N.*`` keys, those entries replace the default
schedule; indices must be contiguous from 0.
"""
from __future__ import annotations

import dataclasses
import re
import typing
from dataclasses import dataclass, field

SCENARIOS = ("robobee_hover", "beeplus_altitude_attitude", "beeplus_position", "custom")
ROBOTS = ("robobee", "beeplus")

Vec3 = tuple[float, float, float]
Vec4 = tuple[float, float, float, float]

_ZERO3: Vec3 = (0.0, 0.0, 0.0)


class ConfigError(ValueError):
    """Malformed configuration; message names the line and key when known."""

    def __init__(self, message: str, line: int | None = None, key: str | None = None):
        where = []
        if line is not None:
            where.append(f"line {line}")
        if key is not None:
            where.append(key)
        super().__init__(f"{': '.join(where)}: {message}" if where else message)
        self.line = line
        self.key = key


@dataclass(frozen=True)
class SimSection:
    scenario: str = "custom"
    robot: str = "robobee"
    duration: float = 5.0
    seed: int = 0
    physics_hz: int = 10000
    control_hz: int = 2000
    mocap_hz: int = 500
    # Start of the metrics window, s.
    settle_time: float = 1.0
    ripple: bool = True
    safety_min: Vec3 = (-0.5, -0.5, -0.2)
    safety_max: Vec3 = (0.5, 0.5, 1.0)


@dataclass(frozen=True)
class RobotSection:
    mass: float = 75e-6
    inertia: Vec3 = (1.42e-9, 1.34e-9, 0.45e-9)
    gravity: float = 9.81
    flap_freq: float = 100.0
    ripple_torque_amp: Vec3 = _ZERO3
    ripple_force_amp: float = 0.0


@dataclass(frozen=True)
class RoboBeeMixSection:
    k_amp: float = 1.4715e-3
    k_roll: float = 2.0e-6
    k_pitch: float = 2.0e-6
    k_yaw: float = 2.0e-7
    limits: Vec4 = (1.0, 1.0, 1.0, 1.0)


@dataclass(frozen=True)
class BeePlusMixSection:
    k_f: float = 4.65975e-4
    k_s: float = 9.3195e-5
    d1: float = 4.0e-3
    d2: float = 4.0e-3
    d3: float = 4.0e-3
    v_max: float = 1.0


@dataclass(frozen=True)
class GainsSection:
    K1: Vec3 = (1.0e-6, 1.0e-6, 1.0e-6)
    K2: Vec3 = (1.0e-8, 1.0e-8, 1.0e-8)
    Kp: Vec3 = (1.0e-3, 1.0e-3, 1.0e-3)
    Kd: Vec3 = (1.0e-3, 1.0e-3, 1.0e-3)
    Ki: Vec3 = _ZERO3
    integral_limit: Vec3 = (2.2e-4, 2.2e-4, 2.2e-4)


@dataclass(frozen=True)
class ControlSection:
    yaw_mode: str = "open_loop"
    omega_d_mode: str = "literal"
    altitude_only: bool = False
    f_min_frac: float = 0.05


@dataclass(frozen=True)
class EstimationSection:
    lam: float = 50.0
    pos_sigma: float = 0.0
    angle_sigma: float = 0.0


@dataclass(frozen=True)
class InitialSection:
    r: Vec3 = _ZERO3
    v: Vec3 = _ZERO3
    q: Vec4 = (1.0, 0.0, 0.0, 0.0)
    omega: Vec3 = _ZERO3


@dataclass(frozen=True)
class SetpointEntry:
    # Entry becomes active at time t and holds until the next one.
    t: float = 0.0
    r_d: Vec3 = _ZERO3
    rdot_d: Vec3 = _ZERO3
    rddot_d: Vec3 = _ZERO3
    psi_d: float = 0.0
    omega_hat_d: Vec3 = _ZERO3
    tau_d: Vec3 = _ZERO3


@dataclass(frozen=True)
class ScenarioConfig:
    sim: SimSection = field(default_factory=SimSection)
    robot: RobotSection = field(default_factory=RobotSection)
    robobee_mix: RoboBeeMixSection = field(default_factory=RoboBeeMixSection)
    beeplus_mix: BeePlusMixSection = field(default_factory=BeePlusMixSection)
    gains: GainsSection = field(default_factory=GainsSection)
    control: ControlSection = field(default_factory=ControlSection)
    estimation: EstimationSection = field(default_factory=EstimationSection)
    initial: InitialSection = field(default_factory=InitialSection)
    setpoints: tuple[SetpointEntry, ...] = (SetpointEntry(),)

    def replace(self, section: str, **changes) -> "ScenarioConfig":
        return dataclasses.replace(self, **{section: dataclasses.replace(getattr(self, section), **changes)})


_SECTIONS = ("sim", "robot", "robobee_mix", "beeplus_mix", "gains", "control", "estimation", "initial")
_CHOICES = {
    ("sim", "scenario"): SCENARIOS,
    ("sim", "robot"): ROBOTS,
    ("control", "yaw_mode"): ("open_loop", "regulated"),
    ("control", "omega_d_mode"): ("literal", "rotated"),
}

def _all(pred):
    return lambda v: all(pred(x) for x in (v if isinstance(v, tuple) else (v,)))


_POS = (_all(lambda x: x > 0), "must be > 0")
_NONNEG = (_all(lambda x: x >= 0), "must be >= 0")
# Range rules per key; checked when a value is parsed and again in validate().
_RULES = {
    ("robot", "mass"): _POS, ("robot", "inertia"): _POS, ("robot", "gravity"): _POS,
    ("robot", "flap_freq"): _POS, ("robot", "ripple_force_amp"): _NONNEG,
    **{("robobee_mix", k): _POS for k in ("k_amp", "k_roll", "k_pitch", "k_yaw", "limits")},
    **{("beeplus_mix", k): _POS for k in ("k_f", "k_s", "d1", "d2", "d3", "v_max")},
    **{("gains", k): _POS for k in ("K1", "K2", "Kp", "Kd")},
    ("gains", "Ki"): _NONNEG, ("gains", "integral_limit"): _NONNEG,
    ("control", "f_min_frac"): _NONNEG,
    ("estimation", "lam"): _POS, ("estimation", "pos_sigma"): _NONNEG,
    ("estimation", "angle_sigma"): _NONNEG,
    ("initial", "q"): (lambda q: sum(x * x for x in q) > 1e-12, "must have nonzero norm"),
}


def _check_rule(section, key, value, line=None):
    rule = _RULES.get((section, key))
    if rule and not rule[0](value):
        raise ConfigError(rule[1], line, f"{section}.{key}")


_KEY_RE = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*(\.[A-Za-z0-9_]+)+$")


def validate(cfg: ScenarioConfig) -> ScenarioConfig:
    s = cfg.sim
    if not s.duration > 0:
        raise ConfigError("must be > 0", key="sim.duration")
    if not s.physics_hz >= s.control_hz >= s.mocap_hz > 0:
        raise ConfigError("rates must satisfy physics_hz >= control_hz >= mocap_hz > 0", key="sim")
    if s.physics_hz % s.control_hz or s.physics_hz % s.mocap_hz:
        raise ConfigError("control_hz and mocap_hz must divide physics_hz", key="sim")
    steps = s.duration * s.physics_hz
    if abs(steps - round(steps)) > 1e-6 * max(1.0, steps) or round(steps) % (s.physics_hz // s.mocap_hz):
        raise ConfigError("duration must be a whole number of sensor periods", key="sim.duration")
    if any(lo >= hi for lo, hi in zip(s.safety_min, s.safety_max)):
        raise ConfigError("safety_min must be below safety_max", key="sim.safety_min")
    if not cfg.setpoints:
        raise ConfigError("at least one setpoint is required", key="setpoint")
    times = [sp.t for sp in cfg.setpoints]
    if times[0] != 0.0 or any(b <= a for a, b in zip(times, times[1:])):
        raise ConfigError("setpoint times must start at 0 and increase", key="setpoint")
    for section, key in _RULES:
        _check_rule(section, key, getattr(getattr(cfg, section), key))
    if cfg.estimation.lam / s.mocap_hz >= 2.0:
        raise ConfigError("lam / mocap_hz must be < 2 for a stable filter", key="estimation.lam")
    return cfg


# ---- (de)serialization --------------------------------------------------

def _hints(cls):
    return typing.get_type_hints(cls)


def _format_value(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, tuple):
        return ", ".join(_format_value(float(v)) for v in value)
    return str(value)


def _parse_value(text: str, typ, line, key):
    text = text.strip()
    try:
        if typ is bool:
            low = text.lower()
            if low not in ("true", "false"):
                raise ValueError("expected true or false")
            return low == "true"
        if typ is int:
            return int(text)
        if typ is float:
            return float(text)
        if typ is str:
            if not text:
                raise ValueError("empty value")
            return text
        if typing.get_origin(typ) is tuple:
            n = len(typing.get_args(typ))
            parts = [p.strip() for p in text.split(",")]
            if len(parts) != n:
                raise ValueError(f"expected {n} comma-separated numbers, got {len(parts)}")
            return tuple(float(p) for p in parts)
    except ValueError as exc:
        raise ConfigError(f"bad value {text!r}: {exc}", line, key) from None
    raise ConfigError(f"unsupported field type {typ}", line, key)


def dumps(cfg: ScenarioConfig) -> str:
    lines = ["# fwmav scenario config v1"]
    for name in _SECTIONS:
        section = getattr(cfg, name)
        lines.append("")
        for f in dataclasses.fields(section):
            lines.append(f"{name}.{f.name} = {_format_value(getattr(section, f.name))}")
    for i, sp in enumerate(cfg.setpoints):
        lines.append("")
        for f in dataclasses.fields(sp):
            lines.append(f"setpoint.{i}.{f.name} = {_format_value(getattr(sp, f.name))}")
    return "\n".join(lines) + "\n"


def write_config(cfg: ScenarioConfig, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(cfg))


def _tokenize(text: str):
    """Yield (line_number, key, value_text)."""
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError("expected 'section.key = value'", lineno)
        key, value = (part.strip() for part in line.split("=", 1))
        if not _KEY_RE.match(key):
            raise ConfigError("malformed key", lineno, key or None)
        yield lineno, key, value


def apply_entries(cfg: ScenarioConfig, entries, replace_setpoints: bool) -> ScenarioConfig:
    """Apply parsed ``(line, key, value)`` entries to ``cfg``."""
    sections = {name: {} for name in _SECTIONS}
    setpoints: dict[int, dict] = {}
    for lineno, key, value in entries:
        parts = key.split(".")
        if parts[0] == "setpoint":
            if len(parts) != 3 or not parts[1].isdigit():
                raise ConfigError("setpoint keys look like setpoint.<index>.<field>", lineno, key)
            hints = _hints(SetpointEntry)
            if parts[2] not in hints:
                raise ConfigError("unknown setpoint field", lineno, key)
            setpoints.setdefault(int(parts[1]), {})[parts[2]] = _parse_value(
                value, hints[parts[2]], lineno, key)
            continue
        if len(parts) != 2 or parts[0] not in sections:
            raise ConfigError("unknown section", lineno, key)
        cls = type(getattr(cfg, parts[0]))
        hints = _hints(cls)
        if parts[1] not in hints:
            raise ConfigError("unknown key", lineno, key)
        parsed = _parse_value(value, hints[parts[1]], lineno, key)
        choices = _CHOICES.get((parts[0], parts[1]))
        if choices and parsed not in choices:
            raise ConfigError(f"must be one of {', '.join(choices)}", lineno, key)
        _check_rule(parts[0], parts[1], parsed, lineno)
        sections[parts[0]][parts[1]] = parsed

    changes = {name: dataclasses.replace(getattr(cfg, name), **vals)
               for name, vals in sections.items() if vals}
    if setpoints:
        idx = sorted(setpoints)
        base = [] if replace_setpoints else list(cfg.setpoints)
        if idx != list(range(idx[-1] + 1)) and replace_setpoints:
            raise ConfigError("setpoint indices must be contiguous from 0", key="setpoint")
        for i in idx:
            if i < len(base):
                base[i] = dataclasses.replace(base[i], **setpoints[i])
            elif i == len(base):
                base.append(SetpointEntry(**setpoints[i]))
            else:
                raise ConfigError("setpoint index skips entries", key=f"setpoint.{i}")
        changes["setpoints"] = tuple(base)
    return dataclasses.replace(cfg, **changes)


def loads(text: str, overrides=()) -> ScenarioConfig:
    """Parse config text on top of the defaults of the scenario it names."""
    from fwmav.harness.scenarios import default_config

    entries = list(_tokenize(text))
    over = [(None, *_split_override(o)) for o in overrides]
    lookup = {k: (ln, v) for ln, k, v in entries + over}
    scenario = "custom"
    robot = None
    if "sim.scenario" in lookup:
        ln, v = lookup["sim.scenario"]
        scenario = _parse_value(v, str, ln, "sim.scenario")
        if scenario not in SCENARIOS:
            raise ConfigError(f"must be one of {', '.join(SCENARIOS)}", ln, "sim.scenario")
    if "sim.robot" in lookup:
        ln, v = lookup["sim.robot"]
        robot = _parse_value(v, str, ln, "sim.robot")
        if robot not in ROBOTS:
            raise ConfigError(f"must be one of {', '.join(ROBOTS)}", ln, "sim.robot")
    cfg = default_config(scenario, robot)
    cfg = apply_entries(cfg, entries, replace_setpoints=True)
    cfg = apply_entries(cfg, over, replace_setpoints=False)
    return validate(cfg)


def _split_override(text: str) -> tuple[str, str]:
    if "=" not in text:
        raise ConfigError(f"override {text!r} must look like key=value")
    key, value = (p.strip() for p in text.split("=", 1))
    if not _KEY_RE.match(key):
        raise ConfigError("malformed key", key=key or None)
    return key, value


def read_config(path, overrides=()) -> ScenarioConfig:
    with open(path, encoding="utf-8") as fh:
        return loads(fh.read(), overrides)


def with_overrides(cfg: ScenarioConfig, overrides) -> ScenarioConfig:
    entries = [(None, *_split_override(o)) for o in overrides]
    return validate(apply_entries(cfg, entries, replace_setpoints=False))
