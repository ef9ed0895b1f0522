from __future__ import annotations

import json
import logging
import sys

import pytest
import yaml

from palperm.config import (
    ConfigError,
    GuardsConfig,
    SystemConfig,
    apply_env_overrides,
    default_config_path,
    load_config,
    load_raw_config,
)
from palperm.logging_system import ConsoleFormatter, JsonLineFormatter, configure_logging, get_logger, run_context


def test_shipped_config_is_valid():
    cfg = load_config(default_config_path())
    assert cfg.census.witness_cap == 16
    assert cfg.guards.census_max_degree == 12
    assert cfg.output.format == "text"


def test_load_config_from_file(config_file):
    cfg = load_config(config_file)
    assert cfg.census.workers == 1
    assert cfg.census.chunk_size == 512
    assert cfg.logging.console_enabled is False
    assert load_raw_config(config_file)["census"]["witness_cap"] == 16


def test_missing_config(tmp_path):
    with pytest.raises(ConfigError):
        load_config(tmp_path / "absent.yaml")


def test_config_root_must_be_mapping(tmp_path):
    path = tmp_path / "list.yaml"
    path.write_text("- 1\n- 2\n", encoding="utf-8")
    with pytest.raises(ConfigError):
        load_raw_config(path)


@pytest.mark.parametrize(
    "raw",
    [
        {"output": {"format": "xml"}},
        {"census": {"chunk_size": 3}},
        {"census": {"cache_dir": "  "}},
        {"logging": {"level": "chatty"}},
    ],
)
def test_invalid_values_raise_config_error(tmp_path, raw):
    path = tmp_path / "bad.yaml"
    path.write_text(yaml.safe_dump(raw), encoding="utf-8")
    with pytest.raises(ConfigError):
        load_config(path)


def test_guards_are_clamped_to_max_degree():
    guards = GuardsConfig(max_degree=8)
    assert guards.census_max_degree == 8
    assert guards.inverse_max_degree == 8


def test_env_overrides():
    cfg = apply_env_overrides(SystemConfig(), {"PALPERM_CACHE_DIR": "/tmp/pp", "PALPERM_WORKERS": "3"})
    assert cfg.census.cache_dir == "/tmp/pp"
    assert cfg.census.resolved_workers() == 3
    untouched = SystemConfig()
    assert apply_env_overrides(untouched, {}) is untouched


@pytest.mark.parametrize("workers", ["many", "0"])
def test_bad_env_workers(workers):
    with pytest.raises(ConfigError):
        apply_env_overrides(SystemConfig(), {"PALPERM_WORKERS": workers})


def test_resolved_workers_defaults_to_machine():
    assert SystemConfig().census.resolved_workers() >= 1


def test_configure_logging_writes_json_lines(config_file):
    cfg = load_config(config_file)
    log_file = configure_logging(cfg.logging)
    get_logger("palperm.test").info("Census finished", extra={"context": {"n": 3, "elapsed_ms": 0.5}})
    for handler in logging.getLogger().handlers:
        handler.flush()
    lines = log_file.read_text(encoding="utf-8").strip().splitlines()
    payload = json.loads(lines[-1])
    assert payload["message"] == "Census finished"
    assert payload["context"] == {"n": 3, "elapsed_ms": 0.5}
    assert payload["level"] == "INFO"


def test_reconfiguring_replaces_managed_handlers(config_file):
    cfg = load_config(config_file)
    configure_logging(cfg.logging)
    configure_logging(cfg.logging)
    managed = [h for h in logging.getLogger().handlers if getattr(h, "_palperm_handler", False)]
    assert len(managed) == 1


def test_formatter_includes_exception():
    try:
        raise ValueError("boom")
    except ValueError:
        record = logging.getLogger("x").makeRecord("x", logging.ERROR, __file__, 1, "failed", None, None)
        record.exc_info = sys.exc_info()
    payload = json.loads(JsonLineFormatter().format(record))
    assert "ValueError: boom" in payload["exception"]


def test_run_context_leads_with_degree_and_mode():
    context = run_context(7, "digit", elapsed=0.01234, workers=3)
    assert list(context) == ["n", "mode", "elapsed_ms", "workers"]
    assert context["elapsed_ms"] == 12.34
    assert "elapsed_ms" not in run_context(3, "token")


def test_console_formatter_appends_context():
    record = logging.getLogger("palperm.census").makeRecord(
        "palperm.census", logging.WARNING, __file__, 1, "Census finished", None, None
    )
    record.context = run_context(4, "token", residual=6)
    line = ConsoleFormatter().format(record)
    assert line.endswith("Census finished [n=4 mode=token residual=6]")


def test_json_formatter_tags_worker_processes():
    record = logging.getLogger("x").makeRecord("x", logging.INFO, __file__, 1, "window done", None, None)
    assert "process" not in json.loads(JsonLineFormatter().format(record))
    record.processName = "ForkProcess-2"
    assert json.loads(JsonLineFormatter().format(record))["process"] == "ForkProcess-2"
