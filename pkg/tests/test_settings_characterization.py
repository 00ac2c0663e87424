from __future__ import annotations

import json
from pathlib import Path

import pytest

from latres.settings import (
    MAX_ELEMENTS_ENV_VAR,
    LatresConfig,
    LimitsConfig,
    active_config,
    apply_environment,
    default_latres_config,
    load_latres_config,
)


def _write_config(base_dir: Path, payload: object) -> None:
    config_dir = base_dir / "config"
    config_dir.mkdir()
    text = payload if isinstance(payload, str) else json.dumps(payload)
    (config_dir / "latres.json").write_text(text, encoding="utf-8")


# ── Loader tests ────────────────────────────────────────────────────────


def test_defaults_match_documented_limits_characterization() -> None:
    config = default_latres_config()
    assert config.limits == LimitsConfig(10, 14, 20)
    assert config.normalize.circuit_breaker_factor == 10
    assert config.census.seed_method == "regions"
    assert (config.render.node_radius, config.render.layer_gap, config.render.column_gap) == (6, 48, 36)


def test_missing_file_falls_back_to_defaults_characterization(tmp_path: Path) -> None:
    assert load_latres_config(tmp_path) == default_latres_config()


def test_malformed_json_falls_back_to_defaults_characterization(tmp_path: Path) -> None:
    _write_config(tmp_path, "{not json")
    assert load_latres_config(tmp_path) == default_latres_config()


def test_wrong_types_fall_back_per_key_characterization(tmp_path: Path) -> None:
    _write_config(
        tmp_path,
        {
            "limits": {"oracle_max_elements": 7, "census_max_elements": "many", "search_max_elements": -1},
            "normalize": {"circuit_breaker_factor": True},
            "census": {"seed_method": "guesswork"},
            "render": "wide",
        },
    )
    config = load_latres_config(tmp_path)
    assert config.limits == LimitsConfig(7, 14, 20)
    assert config.normalize.circuit_breaker_factor == 10
    assert config.census.seed_method == "regions"
    assert config.render == default_latres_config().render


def test_removal_seed_method_is_accepted_characterization(tmp_path: Path) -> None:
    _write_config(tmp_path, {"census": {"seed_method": "removal"}})
    assert load_latres_config(tmp_path).census.seed_method == "removal"


def test_project_config_mirrors_defaults_characterization() -> None:
    assert active_config() == default_latres_config()


# ── Environment tests ───────────────────────────────────────────────────


def test_environment_replaces_every_guard_characterization(monkeypatch: pytest.MonkeyPatch) -> None:
    monkeypatch.setenv(MAX_ELEMENTS_ENV_VAR, "5")
    config = apply_environment(default_latres_config())
    assert config.limits == LimitsConfig(5, 5, 5)
    assert isinstance(config, LatresConfig)


@pytest.mark.parametrize("raw", ["lots", "0", "-4", ""])
def test_bad_environment_values_are_ignored_characterization(monkeypatch: pytest.MonkeyPatch, raw: str) -> None:
    monkeypatch.setenv(MAX_ELEMENTS_ENV_VAR, raw)
    assert apply_environment(default_latres_config()) == default_latres_config()
