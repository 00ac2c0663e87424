from __future__ import annotations

import json
import logging
import os
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Any, Mapping

logger = logging.getLogger(__name__)

MAX_ELEMENTS_ENV_VAR = "LATRES_MAX_ELEMENTS"
CONFIG_FILE_NAME = "latres.json"
SEED_METHODS = ("regions", "removal")

_DEFAULT_CONFIG: dict[str, Any] = {
    "limits": {
        "oracle_max_elements": 10,
        "census_max_elements": 14,
        "search_max_elements": 20,
    },
    "normalize": {
        "circuit_breaker_factor": 10,
    },
    "census": {
        "seed_method": "regions",
    },
    "render": {
        "node_radius": 6,
        "layer_gap": 48,
        "column_gap": 36,
    },
}


# ── Data ────────────────────────────────────────────────────────────────


@dataclass(frozen=True)
class LimitsConfig:
    oracle_max_elements: int = 10
    census_max_elements: int = 14
    search_max_elements: int = 20


@dataclass(frozen=True)
class NormalizeConfig:
    circuit_breaker_factor: int = 10


@dataclass(frozen=True)
class CensusConfig:
    seed_method: str = "regions"


@dataclass(frozen=True)
class RenderConfig:
    node_radius: int = 6
    layer_gap: int = 48
    column_gap: int = 36


@dataclass(frozen=True)
class LatresConfig:
    limits: LimitsConfig
    normalize: NormalizeConfig
    census: CensusConfig
    render: RenderConfig


# ── Loader ──────────────────────────────────────────────────────────────


def default_base_dir() -> Path:
    return Path(__file__).resolve().parent.parent


def default_latres_config() -> LatresConfig:
    return _build_latres_config(_DEFAULT_CONFIG)


def load_latres_config(base_dir: Path) -> LatresConfig:
    config_path = base_dir / "config" / CONFIG_FILE_NAME
    raw_config: Mapping[str, Any] = _DEFAULT_CONFIG
    if config_path.exists():
        try:
            loaded = json.loads(config_path.read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            logger.warning("settings: cannot read %s, using defaults: %s", config_path, exc)
            loaded = None
        if isinstance(loaded, dict):
            raw_config = loaded
    return _build_latres_config(raw_config)


def apply_environment(config: LatresConfig) -> LatresConfig:
    raw_value = os.getenv(MAX_ELEMENTS_ENV_VAR)
    if raw_value is None:
        return config
    try:
        override = int(raw_value.strip())
    except ValueError:
        logger.warning("settings: ignoring %s=%r (not an integer)", MAX_ELEMENTS_ENV_VAR, raw_value)
        return config
    if override <= 0:
        logger.warning("settings: ignoring %s=%r (must be positive)", MAX_ELEMENTS_ENV_VAR, raw_value)
        return config
    limits = LimitsConfig(
        oracle_max_elements=override,
        census_max_elements=override,
        search_max_elements=override,
    )
    return replace(config, limits=limits)


def active_config(base_dir: Path | None = None) -> LatresConfig:
    return apply_environment(load_latres_config(base_dir or default_base_dir()))


def _build_latres_config(raw_config: Mapping[str, Any]) -> LatresConfig:
    limits = _section(raw_config, "limits")
    normalize = _section(raw_config, "normalize")
    census = _section(raw_config, "census")
    render = _section(raw_config, "render")

    seed_method = _safe_str(
        census.get("seed_method"),
        fallback=str(_DEFAULT_CONFIG["census"]["seed_method"]),
    )
    if seed_method not in SEED_METHODS:
        logger.warning("settings: unknown census seed_method %r, using regions", seed_method)
        seed_method = "regions"

    return LatresConfig(
        limits=LimitsConfig(
            oracle_max_elements=_limit(limits, "oracle_max_elements"),
            census_max_elements=_limit(limits, "census_max_elements"),
            search_max_elements=_limit(limits, "search_max_elements"),
        ),
        normalize=NormalizeConfig(
            circuit_breaker_factor=_safe_int(
                normalize.get("circuit_breaker_factor"),
                fallback=int(_DEFAULT_CONFIG["normalize"]["circuit_breaker_factor"]),
            ),
        ),
        census=CensusConfig(seed_method=seed_method),
        render=RenderConfig(
            node_radius=_safe_int(
                render.get("node_radius"), fallback=int(_DEFAULT_CONFIG["render"]["node_radius"])
            ),
            layer_gap=_safe_int(
                render.get("layer_gap"), fallback=int(_DEFAULT_CONFIG["render"]["layer_gap"])
            ),
            column_gap=_safe_int(
                render.get("column_gap"), fallback=int(_DEFAULT_CONFIG["render"]["column_gap"])
            ),
        ),
    )


def _section(raw_config: Mapping[str, Any], name: str) -> Mapping[str, Any]:
    section = raw_config.get(name)
    if isinstance(section, dict):
        return section
    return _DEFAULT_CONFIG[name]


def _limit(section: Mapping[str, Any], key: str) -> int:
    value = _safe_int(section.get(key), fallback=int(_DEFAULT_CONFIG["limits"][key]))
    return value if value > 0 else int(_DEFAULT_CONFIG["limits"][key])


def _safe_int(value: object, *, fallback: int) -> int:
    if isinstance(value, bool):
        return fallback
    try:
        return int(value)
    except (TypeError, ValueError):
        return fallback


def _safe_str(value: object, *, fallback: str) -> str:
    if isinstance(value, str) and value:
        return value
    return fallback
