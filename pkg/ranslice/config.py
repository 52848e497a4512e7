"""Run configuration loader.

A configuration document mirrors :class:`~ranslice.engine.SimConfig`. It is
parsed with PyYAML, so plain JSON files load unchanged. Missing keys keep
their defaults and unknown keys are rejected.
"""

from __future__ import annotations

import logging
from dataclasses import fields
from pathlib import Path
from typing import Any, Mapping

import yaml

from .attacker import (
    AttackConfig,
    AttackerRewardMode,
    AttackStrategy,
    SensingErrors,
    WeightPolicy,
    WeightTableError,
    resolve_weight_tables,
)
from .attacker.agent import check_table_coverage
from .engine import SimConfig
from .model import LinkParams
from .rl import QHyperparams, RLError
from .schemes import Scheme
from .traffic import SNR_BANDS, TrafficConfig

logger = logging.getLogger(__name__)


class ConfigurationError(RuntimeError):
    """Raised when configuration is invalid."""


_SECTIONS = {"traffic", "attack", "link", "gnb_hp", "attacker_hp"}
_SCALARS = {
    "scheme",
    "total_slots",
    "measure_window",
    "seed",
    "check_invariants",
}
_TOP_LEVEL = _SECTIONS | _SCALARS
_RANGE_FIELDS = {
    "weight_range",
    "lifetime_range",
    "deadline_offset_range",
    "snr_range",
    "rate_demand_range",
    "processing_range",
    "comm_power_range",
}
_INT_RANGES = {"weight_range", "lifetime_range", "deadline_offset_range"}


def _load_config_file(path: Path) -> dict[str, Any]:
    if not path.exists():
        raise ConfigurationError(f"Config file not found: {path}")
    try:
        loaded = yaml.safe_load(path.read_text()) or {}
    except yaml.YAMLError as exc:  # pragma: no cover - delegated to PyYAML
        raise ConfigurationError(f"Invalid config file {path}: {exc}") from exc
    if not isinstance(loaded, dict):
        raise ConfigurationError(f"Expected {path} to contain a mapping at the top level")
    return loaded


def _first_value(*values: Any, default: Any = None) -> Any:
    for value in values:
        if value is not None:
            return value
    return default


def _coerce_bool(value: Any, *, name: str) -> bool:
    if isinstance(value, bool):
        return value
    if isinstance(value, str):
        normalized = value.strip().lower()
        if normalized in {"1", "true", "yes", "y", "on"}:
            return True
        if normalized in {"0", "false", "no", "n", "off"}:
            return False
    raise ConfigurationError(f"{name} must be a boolean, got {value!r}")


def _require_int(value: Any, *, name: str) -> int:
    if isinstance(value, bool) or not isinstance(value, (int, float)) or int(value) != value:
        raise ConfigurationError(f"{name} must be an integer, got {value!r}")
    return int(value)


def _require_float(value: Any, *, name: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigurationError(f"{name} must be a number, got {value!r}")
    return float(value)


def _require_range(value: Any, *, name: str, integer: bool) -> tuple[Any, Any]:
    if not isinstance(value, (list, tuple)) or len(value) != 2:
        raise ConfigurationError(f"{name} must be a [low, high] pair, got {value!r}")
    coerce = _require_int if integer else _require_float
    return coerce(value[0], name=name), coerce(value[1], name=name)


def _section(data: Mapping[str, Any], key: str) -> dict[str, Any]:
    section = data.get(key)
    if section is None:
        return {}
    if not isinstance(section, dict):
        raise ConfigurationError(f"Expected '{key}' to be a mapping")
    return section


def _reject_unknown(section: Mapping[str, Any], allowed: set[str], prefix: str) -> None:
    unknown = sorted(set(section) - allowed)
    if unknown:
        names = ", ".join(f"{prefix}{key}" for key in unknown)
        raise ConfigurationError(f"Unknown configuration field(s): {names}")


def _field_names(cls: type) -> set[str]:
    return {item.name for item in fields(cls)}


def _build(cls: type, kwargs: dict[str, Any], section: str) -> Any:
    try:
        return cls(**kwargs)
    except (ValueError, RLError) as exc:
        raise ConfigurationError(f"Invalid {section} configuration: {exc}") from exc


def _parse_traffic(section: Mapping[str, Any]) -> TrafficConfig:
    _reject_unknown(section, _field_names(TrafficConfig) | {"snr_band"}, "traffic.")
    kwargs: dict[str, Any] = {}
    for key, value in section.items():
        name = f"traffic.{key}"
        if key == "snr_band":
            if value not in SNR_BANDS:
                raise ConfigurationError(
                    f"{name} must be one of {sorted(SNR_BANDS)}, got {value!r}"
                )
            kwargs["snr_range"] = SNR_BANDS[value]
        elif key in _RANGE_FIELDS:
            if key == "snr_range" and "snr_band" in section:
                raise ConfigurationError("traffic.snr_band and traffic.snr_range are exclusive")
            kwargs[key] = _require_range(value, name=name, integer=key in _INT_RANGES)
        elif key == "ue_count":
            kwargs[key] = _require_int(value, name=name)
        else:
            kwargs[key] = _require_float(value, name=name)
    return _build(TrafficConfig, kwargs, "traffic")


def _parse_sensing(value: Any) -> SensingErrors:
    name = "attack.sensing"
    if isinstance(value, dict):
        _reject_unknown(value, {"p_false_alarm", "p_misdetect"}, f"{name}.")
        p_fa = _require_float(value.get("p_false_alarm", 0.0), name=f"{name}.p_false_alarm")
        p_md = _require_float(value.get("p_misdetect", 0.0), name=f"{name}.p_misdetect")
    elif isinstance(value, (list, tuple)):
        p_fa, p_md = _require_range(value, name=name, integer=False)
    else:
        p_fa = p_md = _require_float(value, name=name)
    return _build(SensingErrors, {"p_false_alarm": p_fa, "p_misdetect": p_md}, "attack.sensing")


def _parse_enum(parser: Any, value: Any, *, name: str) -> Any:
    try:
        return parser(value)
    except ValueError as exc:
        raise ConfigurationError(f"{name}: {exc}") from exc


def _resolve_path(value: Any, *, name: str, base_dir: Path | None) -> str:
    if not isinstance(value, str) or not value:
        raise ConfigurationError(f"{name} must be a file path")
    path = Path(value).expanduser()
    if not path.is_absolute() and base_dir is not None:
        path = base_dir / path
    return str(path)


def _parse_attack(section: Mapping[str, Any], base_dir: Path | None) -> AttackConfig:
    allowed = _field_names(AttackConfig) | {"attacker_reward_mode"}
    _reject_unknown(section, allowed, "attack.")
    kwargs: dict[str, Any] = {}
    for key, value in section.items():
        name = f"attack.{key}"
        if key == "strategy":
            kwargs[key] = _parse_enum(AttackStrategy.parse, value, name=name)
        elif key == "weight_policy":
            kwargs[key] = _parse_enum(WeightPolicy.parse, value, name=name)
        elif key in ("reward_mode", "attacker_reward_mode"):
            kwargs["reward_mode"] = _parse_enum(AttackerRewardMode, value, name=name)
        elif key == "sensing":
            kwargs[key] = _parse_sensing(value)
        elif key in ("weight_table", "high_weight_table"):
            kwargs[key] = _resolve_path(value, name=name, base_dir=base_dir)
        else:
            kwargs[key] = _require_float(value, name=name)
    return _build(AttackConfig, kwargs, "attack")


def _parse_link(section: Mapping[str, Any]) -> dict[str, Any]:
    _reject_unknown(section, _field_names(LinkParams), "link.")
    kwargs: dict[str, Any] = {}
    for key, value in section.items():
        name = f"link.{key}"
        if key == "rb_count":
            kwargs[key] = _require_int(value, name=name)
        elif key == "snr_range":
            kwargs[key] = _require_range(value, name=name, integer=False)
        else:
            kwargs[key] = _require_float(value, name=name)
    return kwargs


def _parse_hp(section: Mapping[str, Any], key: str) -> QHyperparams:
    _reject_unknown(section, _field_names(QHyperparams), f"{key}.")
    kwargs: dict[str, Any] = {}
    for field_name, value in section.items():
        name = f"{key}.{field_name}"
        if field_name == "epsilon_decay_slots":
            kwargs[field_name] = _require_int(value, name=name)
        else:
            kwargs[field_name] = _require_float(value, name=name)
    return _build(QHyperparams, kwargs, key)


def sim_config_from_dict(
    data: Mapping[str, Any],
    *,
    overrides: Mapping[str, Any] | None = None,
    base_dir: Path | None = None,
) -> SimConfig:
    """Validate ``data`` and build a :class:`SimConfig`.

    ``overrides`` holds top-level scalars (``seed``, ``total_slots``, ...)
    that win over the document.
    """

    if not isinstance(data, Mapping):
        raise ConfigurationError("Configuration must be a mapping")
    _reject_unknown(data, _TOP_LEVEL, "")
    override_map = dict(overrides or {})
    _reject_unknown(override_map, _SCALARS, "")

    traffic_section = _section(data, "traffic")
    traffic = _parse_traffic(traffic_section)
    link_kwargs = _parse_link(_section(data, "link"))
    if "snr_range" in link_kwargs and not (
        "snr_range" in traffic_section or "snr_band" in traffic_section
    ):
        traffic = _build(
            TrafficConfig,
            {**_traffic_kwargs(traffic), "snr_range": link_kwargs["snr_range"]},
            "traffic",
        )
    link_kwargs["snr_range"] = traffic.snr_range
    link = _build(LinkParams, link_kwargs, "link")
    attack = _parse_attack(_section(data, "attack"), base_dir)

    scheme = _parse_enum(
        Scheme.parse,
        _first_value(override_map.get("scheme"), data.get("scheme"), default=Scheme.QLEARNING),
        name="scheme",
    )
    total_slots = _require_int(
        _first_value(override_map.get("total_slots"), data.get("total_slots"), default=10_000),
        name="total_slots",
    )
    measure_window = _require_int(
        _first_value(
            override_map.get("measure_window"), data.get("measure_window"), default=1_000
        ),
        name="measure_window",
    )
    seed = _require_int(
        _first_value(override_map.get("seed"), data.get("seed"), default=0), name="seed"
    )
    check_invariants = _coerce_bool(
        _first_value(
            override_map.get("check_invariants"), data.get("check_invariants"), default=False
        ),
        name="check_invariants",
    )

    config = _build(
        SimConfig,
        {
            "traffic": traffic,
            "attack": attack,
            "scheme": scheme,
            "gnb_hp": _parse_hp(_section(data, "gnb_hp"), "gnb_hp"),
            "attacker_hp": _parse_hp(_section(data, "attacker_hp"), "attacker_hp"),
            "total_slots": total_slots,
            "measure_window": measure_window,
            "link": link,
            "seed": seed,
            "check_invariants": check_invariants,
        },
        "run",
    )
    try:
        check_table_coverage(attack, resolve_weight_tables(attack), link.rb_count)
    except WeightTableError as exc:
        raise ConfigurationError(f"attack.weight_table: {exc}") from exc
    return config


def _traffic_kwargs(traffic: TrafficConfig) -> dict[str, Any]:
    return {item.name: getattr(traffic, item.name) for item in fields(TrafficConfig)}


def load_sim_config(
    path: str | Path,
    overrides: Mapping[str, Any] | None = None,
) -> SimConfig:
    """Load and validate a run configuration file."""

    path = Path(path).expanduser()
    data = _load_config_file(path)
    config = sim_config_from_dict(data, overrides=overrides, base_dir=path.parent)
    logger.debug("Loaded run configuration from %s (seed=%d)", path, config.seed)
    return config
