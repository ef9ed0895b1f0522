from __future__ import annotations

import os
from pathlib import Path
from typing import Any, Dict, Mapping, Optional

import yaml
from pydantic import BaseModel, Field, ValidationError, field_validator, model_validator

ENV_CACHE_DIR = "PALPERM_CACHE_DIR"
ENV_WORKERS = "PALPERM_WORKERS"


class CensusConfig(BaseModel):
    workers: Optional[int] = Field(default=None, ge=1, le=512)
    windows_per_worker: int = Field(default=4, ge=1, le=256)
    chunk_size: int = Field(default=32768, ge=64, le=4_194_304)
    witness_cap: int = Field(default=16, ge=0, le=10_000)
    cache_enabled: bool = True
    cache_dir: str = "./cache"

    @field_validator("cache_dir")
    @classmethod
    def validate_cache_dir(cls, value: str) -> str:
        text = str(value or "").strip()
        if not text:
            raise ValueError("cache_dir cannot be empty")
        return text

    def resolved_workers(self) -> int:
        if self.workers is not None:
            return self.workers
        return max(1, os.cpu_count() or 1)


class GuardsConfig(BaseModel):
    max_degree: int = Field(default=20, ge=1, le=20)
    census_max_degree: int = Field(default=12, ge=1, le=20)
    inverse_max_degree: int = Field(default=9, ge=1, le=12)
    oracle_max_length: int = Field(default=32, ge=2, le=64)
    closure_max_elements: int = Field(default=10_000_000, ge=1)
    generator_search_max_degree: int = Field(default=6, ge=3, le=9)

    @model_validator(mode="after")
    def clamp_to_max_degree(self) -> "GuardsConfig":
        if self.census_max_degree > self.max_degree:
            self.census_max_degree = self.max_degree
        if self.inverse_max_degree > self.max_degree:
            self.inverse_max_degree = self.max_degree
        return self


class OutputConfig(BaseModel):
    format: str = "text"
    include_timings: bool = False

    @field_validator("format")
    @classmethod
    def validate_format(cls, value: str) -> str:
        normalized = str(value or "").strip().lower()
        allowed = {"text", "json", "csv"}
        if normalized not in allowed:
            raise ValueError(f"format must be one of {sorted(allowed)}")
        return normalized


class LoggingConfig(BaseModel):
    level: str = "INFO"
    console_level: str = "WARNING"
    file_path: str = "./logs/palperm.log"
    max_bytes: int = Field(default=5 * 1024 * 1024, ge=1024)
    backup_count: int = Field(default=5, ge=1, le=20)
    console_enabled: bool = True

    @field_validator("level", "console_level")
    @classmethod
    def validate_level(cls, value: str) -> str:
        allowed = {"DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"}
        level = value.strip().upper()
        if level not in allowed:
            raise ValueError(f"level must be one of {sorted(allowed)}")
        return level


class SystemConfig(BaseModel):
    census: CensusConfig = Field(default_factory=CensusConfig)
    guards: GuardsConfig = Field(default_factory=GuardsConfig)
    output: OutputConfig = Field(default_factory=OutputConfig)
    logging: LoggingConfig = Field(default_factory=LoggingConfig)


class ConfigError(RuntimeError):
    """Configuration cannot be loaded or validated."""


def project_root() -> Path:
    return Path(__file__).resolve().parent.parent


def default_config_path() -> Path:
    return project_root() / "config" / "config.yaml"


def resolve_path(path: str | Path) -> Path:
    candidate = Path(path)
    if candidate.is_absolute():
        return candidate
    return project_root() / candidate


def load_raw_config(path: str | Path | None = None) -> Dict[str, Any]:
    config_path = Path(path) if path else default_config_path()
    if not config_path.exists():
        raise ConfigError(f"Config file not found: {config_path}")

    with config_path.open("r", encoding="utf-8") as f:
        raw = yaml.safe_load(f) or {}
    if not isinstance(raw, dict):
        raise ConfigError(f"Config root must be a mapping: {config_path}")
    return raw


def load_config(path: str | Path | None = None) -> SystemConfig:
    config_path = Path(path) if path else default_config_path()
    raw = load_raw_config(config_path)

    try:
        return SystemConfig.model_validate(raw)
    except ValidationError as exc:
        raise ConfigError(f"Invalid config at {config_path}: {exc}") from exc


def apply_env_overrides(cfg: SystemConfig, environ: Optional[Mapping[str, str]] = None) -> SystemConfig:
    env = os.environ if environ is None else environ
    update: Dict[str, Any] = {}

    cache_dir = str(env.get(ENV_CACHE_DIR, "") or "").strip()
    if cache_dir:
        update["cache_dir"] = cache_dir

    workers = str(env.get(ENV_WORKERS, "") or "").strip()
    if workers:
        try:
            update["workers"] = int(workers)
        except ValueError as exc:
            raise ConfigError(f"{ENV_WORKERS} must be an integer, got {workers!r}") from exc

    if not update:
        return cfg
    try:
        census = CensusConfig.model_validate({**cfg.census.model_dump(), **update})
    except ValidationError as exc:
        raise ConfigError(f"Invalid environment override: {exc}") from exc
    return cfg.model_copy(update={"census": census})
