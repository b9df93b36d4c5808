"""
Application configuration.

`Settings` carries process-level knobs from the environment; `RunConfig` is
the experiment configuration read from a `key = value` file with `[sections]`.
"""

import json

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from functools import lru_cache
from pathlib import Path
from typing import Any

from pydantic import Field, ValidationError
from pydantic_settings import BaseSettings, SettingsConfigDict, TomlConfigSettingsSource

from errors import ConfigError
from schemas.models import (
    AnchorSettings,
    Camera,
    FitConfig,
    LossWeights,
    MetricSettings,
    PreprocessSettings,
    ProjectionSettings,
    ScenarioSettings,
    SoftSilhouetteConfig,
)


class Settings(BaseSettings):
    """Application settings loaded from environment."""

    model_config = SettingsConfigDict(
        env_prefix="PRDL_",
        env_file=".env",
        env_file_encoding="utf-8",
        extra="ignore",  # Ignore extra env vars
    )

    log_level: str = "INFO"
    jobs: int = Field(default=1, ge=1)
    seed: int = 0
    output_dir: Path = Path("runs")


@lru_cache
def get_settings() -> Settings:
    """Get cached settings instance."""
    return Settings()


settings = get_settings()


class RunConfig(BaseSettings):
    """Experiment configuration; every key is validated and unknown keys are rejected."""

    model_config = SettingsConfigDict(
        env_prefix="PRDL_RUN_",
        env_nested_delimiter="__",
        extra="forbid",
    )

    seed: int = 0
    camera: Camera = Field(default_factory=Camera)
    weights: LossWeights = Field(default_factory=LossWeights)
    fit: FitConfig = Field(default_factory=FitConfig)
    anchors: AnchorSettings = Field(default_factory=AnchorSettings)
    preprocess: PreprocessSettings = Field(default_factory=PreprocessSettings)
    projection: ProjectionSettings = Field(default_factory=ProjectionSettings)
    silhouette: SoftSilhouetteConfig = Field(default_factory=SoftSilhouetteConfig)
    metrics: MetricSettings = Field(default_factory=MetricSettings)
    scenario: ScenarioSettings = Field(default_factory=ScenarioSettings)


def load_run_config(path: Path | str | None = None, **overrides: Any) -> RunConfig:
    """
    Load a run configuration.

    Args:
        path: Optional config file; missing keys keep their defaults
        overrides: Top-level sections or keys that win over the file

    Returns:
        Validated RunConfig
    """
    data: dict[str, Any] = {}
    if path is not None:
        path = Path(path)
        if not path.is_file():
            raise FileNotFoundError(f"config file not found: {path}")
        try:
            data = dict(TomlConfigSettingsSource(RunConfig, toml_file=path)())
        except tomllib.TOMLDecodeError as e:
            raise ConfigError(f"{path}: {e}") from e
    data.update(overrides)
    try:
        return RunConfig(**data)
    except ValidationError as e:
        raise ConfigError(str(e)) from e


def _format_value(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, float)):
        return repr(value)
    if isinstance(value, str):
        return json.dumps(value)
    if isinstance(value, list):
        return "[" + ", ".join(_format_value(v) for v in value) + "]"
    if isinstance(value, dict):
        return "{ " + ", ".join(f"{k} = {_format_value(v)}" for k, v in value.items()) + " }"
    raise TypeError(f"cannot format {type(value).__name__}")


def dump_run_config(config: RunConfig) -> str:
    """Render a config in the same `key = value` / `[section]` syntax it is read from."""
    data = config.model_dump(mode="json")
    lines: list[str] = []
    sections: list[tuple[str, dict]] = []
    for key, value in data.items():
        if isinstance(value, dict) and key != "part_weights":
            sections.append((key, value))
        elif value is not None:
            lines.append(f"{key} = {_format_value(value)}")
    for name, section in sections:
        lines.append("")
        lines.append(f"[{name}]")
        for key, value in section.items():
            if value is not None:
                lines.append(f"{key} = {_format_value(value)}")
    return "\n".join(lines) + "\n"
