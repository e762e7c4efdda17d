"""Scenario parameters shared by every computation.

A scenario file is UTF-8 text made of ``section.key = value`` lines with
``#`` comments, for example::

    area.radius = 50
    radio.f_c_ghz = 28
    radio.n0_dbm = auto   # -174 dBm/Hz + 10 log10(B)

Values are stored in the units documented on each field and converted to SI
once, inside the module that consumes them. Unspecified keys keep the
defaults below; the body, density, height, battery, distance and fleet size
defaults are working assumptions, not values taken from published tables.
"""

import logging
import math
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Any, Dict, Iterable, List, Mapping, Optional, Union

from .exceptions import ConfigParseError, ConfigValidationError

logger = logging.getLogger("app_capacity")

Overrides = Optional[Union[Mapping[str, Any], Iterable[str]]]


@dataclass(frozen=True)
class AreaModel:
    radius: float = 50.0  # R, m
    density: float = 0.1  # lambda, users/m²
    ell: float = 1000.0  # distance to the charging station, m


@dataclass(frozen=True)
class BodyModel:
    h_b: float = 1.7  # blocker height, m
    h_u: float = 1.3  # UE height, m
    r_b: float = 0.22  # body cylinder radius, m
    r_u: float = 0.3  # UE-to-body distance, m


@dataclass(frozen=True)
class RadioModel:
    f_c_ghz: float = 28.0
    bandwidth_hz: float = 1e9
    p_a_dbm: float = 23.0
    g_a_db: float = 15.0
    g_u_db: float = 5.0
    blockage_loss_db: float = 20.0
    gamma: float = 2.1
    n0_dbm: float = -84.0  # thermal noise over the whole band
    nf_db: float = 5.0


@dataclass(frozen=True)
class FleetModel:
    n: int = 4
    h_a: float = 12.0  # airborne service height above ground, m
    h_l: float = 20.0  # landed service height above ground, m
    t_h: float = 1.0  # flight time on batteries, h
    t_c_h: float = 1.0  # full charge time, h
    nu_kmh: float = 40.0  # cruise speed, km/h
    p_e: float = 871.0  # en-route engine power, W
    p_h: float = 1024.0  # hovering engine power, W
    p_t: float = 47.0  # AP payload power, W
    n_max: int = 12  # fleet-size cap for target searches

    @property
    def reach_m(self):
        """Largest charging-station distance that still leaves time to serve: Tν/2."""
        return self.t_h * self.nu_kmh * 1000.0 / 2.0


@dataclass(frozen=True)
class ScenarioConfig:
    area: AreaModel = field(default_factory=AreaModel)
    body: BodyModel = field(default_factory=BodyModel)
    radio: RadioModel = field(default_factory=RadioModel)
    fleet: FleetModel = field(default_factory=FleetModel)


SECTIONS = ("area", "body", "radio", "fleet")


@dataclass(frozen=True)
class Violation:
    field: str
    rule: str

    def __str__(self):
        return f"{self.field}: {self.rule}"


def _positive(value):
    return math.isfinite(value) and value > 0


def _non_negative(value):
    return math.isfinite(value) and value >= 0


def validate(config: ScenarioConfig) -> List[Violation]:
    """Return the list of violated invariants; empty means the scenario is usable."""
    area, body, radio, fleet = config.area, config.body, config.radio, config.fleet
    checks = [
        ("area.radius", _positive(area.radius), "R > 0"),
        ("area.density", _non_negative(area.density), "lambda ≥ 0"),
        ("area.ell", _non_negative(area.ell), "ell ≥ 0"),
        ("body.h_u", _positive(body.h_u), "h_U > 0"),
        ("body.h_b", math.isfinite(body.h_b) and body.h_b > body.h_u, "h_B > h_U violated"),
        ("body.r_b", _positive(body.r_b), "r_B > 0"),
        ("body.r_u", _positive(body.r_u), "r_U > 0"),
        ("radio.f_c_ghz", _positive(radio.f_c_ghz), "f_C > 0"),
        ("radio.bandwidth_hz", _positive(radio.bandwidth_hz), "B > 0"),
        ("radio.blockage_loss_db", _non_negative(radio.blockage_loss_db), "blockage_loss_db ≥ 0"),
        ("radio.gamma", _positive(radio.gamma), "gamma > 0"),
        ("radio.p_a_dbm", math.isfinite(radio.p_a_dbm), "P_A must be finite"),
        ("radio.n0_dbm", math.isfinite(radio.n0_dbm), "N0 must be finite"),
        ("fleet.n", fleet.n >= 1, "N ≥ 1"),
        ("fleet.n_max", fleet.n_max >= 1, "n_max ≥ 1"),
        ("fleet.h_a", math.isfinite(fleet.h_a) and fleet.h_a > body.h_u, "h_A > h_U"),
        ("fleet.h_l", math.isfinite(fleet.h_l) and fleet.h_l > body.h_u, "h_L > h_U"),
        ("fleet.t_h", _positive(fleet.t_h), "T > 0"),
        ("fleet.t_c_h", _non_negative(fleet.t_c_h), "T_C ≥ 0"),
        ("fleet.nu_kmh", _positive(fleet.nu_kmh), "nu > 0"),
        ("fleet.p_e", _positive(fleet.p_e), "P_E > 0"),
        ("fleet.p_h", _positive(fleet.p_h), "P_H > 0"),
        ("fleet.p_t", _positive(fleet.p_t), "P_T > 0"),
    ]
    violations = [Violation(name, rule) for name, ok, rule in checks if not ok]

    # Only meaningful when the cycle inputs themselves are sane.
    if _positive(fleet.t_h) and _positive(fleet.nu_kmh) and _non_negative(area.ell):
        if area.ell >= fleet.reach_m:
            violations.append(Violation("area.ell", f"infeasible cycle: ℓ ≥ Tν/2 = {fleet.reach_m:.1f} m"))
    return violations


def split_lines(text: str) -> Dict[str, Dict[str, str]]:
    """Parse ``section.key = value`` lines into {section: {key: raw string}}."""
    sections = {name: {} for name in SECTIONS}
    for lineno, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigParseError(f"line {lineno}: expected 'section.key = value', got {raw_line.strip()!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        _store(sections, key, value, f"line {lineno}")
    return sections


def _store(sections, dotted_key, value, where):
    section, _, key = dotted_key.partition(".")
    if not key or "." in key:
        raise ConfigParseError(f"{where}: key {dotted_key!r} is not of the form section.key")
    if section not in sections:
        raise ConfigParseError(f"{where}: unknown section {section!r} (expected one of {', '.join(SECTIONS)})")
    if not value:
        raise ConfigParseError(f"{where}: empty value for {dotted_key!r}")
    if key in sections[section]:
        raise ConfigParseError(f"{where}: duplicate key {dotted_key!r}")
    sections[section][key] = value


def apply_overrides(
    sections: Dict[str, Dict[str, str]],
    overrides: Overrides,
) -> Dict[str, Dict[str, str]]:
    """Layer ``section.key=value`` overrides (strings or a mapping) over parsed sections."""
    if not overrides:
        return sections
    items = overrides.items() if isinstance(overrides, dict) else (_split_override(o) for o in overrides)
    for dotted_key, value in items:
        section, _, key = str(dotted_key).partition(".")
        if section in sections:
            sections[section].pop(key, None)
        _store(sections, str(dotted_key).strip(), str(value).strip(), "override")
    return sections


def _split_override(text):
    if "=" not in text:
        raise ConfigParseError(f"override {text!r} is not of the form section.key=value")
    key, value = text.split("=", 1)
    return key.strip(), value.strip()


def build_config(sections: Dict[str, Dict[str, str]]) -> ScenarioConfig:
    """Coerce raw section dicts into a ScenarioConfig and check its invariants."""
    from .serializers import SECTION_SERIALIZERS

    models = {}
    for name in SECTIONS:
        serializer_class = SECTION_SERIALIZERS[name]
        raw = sections.get(name, {})
        unknown = sorted(set(raw) - set(serializer_class().fields))
        if unknown:
            raise ConfigParseError(f"unknown key(s): {', '.join(f'{name}.{key}' for key in unknown)}")
        serializer = serializer_class(data=raw)
        if not serializer.is_valid():
            details = "; ".join(f"{name}.{key}: {' '.join(str(e) for e in errs)}" for key, errs in serializer.errors.items())
            raise ConfigParseError(details)
        models[name] = serializer.save()

    config = ScenarioConfig(**models)
    violations = validate(config)
    if violations:
        raise ConfigValidationError(violations)
    return config


def parse_config_text(text: str, overrides: Overrides = None) -> ScenarioConfig:
    return build_config(apply_overrides(split_lines(text), overrides))


def load_config(path: Optional[str] = None, overrides: Overrides = None) -> ScenarioConfig:
    """Load and validate a scenario file; ``path=None`` starts from the defaults."""
    if path:
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as e:
            raise ConfigParseError(f"cannot read scenario file {path}: {e}") from e
    else:
        text = ""
    config = parse_config_text(text, overrides)
    logger.info(f"Scenario loaded from {path or 'built-in defaults'}")
    return config


def _format_value(value):
    return str(value) if isinstance(value, int) else repr(float(value))


def serialize(config: ScenarioConfig) -> str:
    """Render a config in the scenario file format; parsing it back gives an equal config."""
    lines = []
    for name in SECTIONS:
        model = getattr(config, name)
        for model_field in fields(model):
            lines.append(f"{name}.{model_field.name} = {_format_value(getattr(model, model_field.name))}")
        lines.append("")
    return "\n".join(lines)


def with_values(config: ScenarioConfig, values: Mapping[str, Any]) -> ScenarioConfig:
    """Copy of ``config`` with dotted keys replaced, e.g. ``{"fleet.t_h": 2.0}``."""
    updates = {}
    for dotted_key, value in values.items():
        section, _, key = dotted_key.partition(".")
        updates.setdefault(section, {})[key] = value
    return replace(config, **{section: replace(getattr(config, section), **kv) for section, kv in updates.items()})
