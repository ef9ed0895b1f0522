from __future__ import annotations

import json
import logging
from datetime import datetime, timezone
from logging.handlers import RotatingFileHandler
from pathlib import Path
from threading import Lock
from typing import Any, Dict, Optional

from palperm.config import LoggingConfig, resolve_path

_HANDLER_FLAG = "_palperm_handler"
_LOCK = Lock()
_MAIN_PROCESS = "MainProcess"


def run_context(n: int, mode: str, elapsed: Optional[float] = None, **fields: Any) -> Dict[str, Any]:
    """Context payload for a census-related event, keyed by degree and mode first."""
    context: Dict[str, Any] = {"n": n, "mode": mode}
    if elapsed is not None:
        context["elapsed_ms"] = round(elapsed * 1000, 2)
    context.update(fields)
    return context


class JsonLineFormatter(logging.Formatter):
    """One JSON object per line; pool workers are tagged with their process name."""

    def format(self, record: logging.LogRecord) -> str:
        ts = datetime.fromtimestamp(record.created, tz=timezone.utc)
        payload: Dict[str, Any] = {
            "timestamp": ts.isoformat(timespec="milliseconds"),
            "level": record.levelname,
            "logger": record.name,
            "message": record.getMessage(),
        }
        if record.processName and record.processName != _MAIN_PROCESS:
            payload["process"] = record.processName

        context = getattr(record, "context", None)
        if context is not None:
            payload["context"] = context
        if record.exc_info:
            payload["exception"] = self.formatException(record.exc_info)
        return json.dumps(payload, ensure_ascii=False, default=str)


class ConsoleFormatter(logging.Formatter):
    """Plain console line with the context appended as key=value pairs."""

    def __init__(self) -> None:
        super().__init__("%(asctime)s %(levelname)s %(name)s: %(message)s", datefmt="%H:%M:%S")

    def format(self, record: logging.LogRecord) -> str:
        line = super().format(record)
        context = getattr(record, "context", None)
        if isinstance(context, dict) and context:
            line += " [" + " ".join(f"{key}={value}" for key, value in context.items()) + "]"
        return line


def _remove_managed_handlers(logger: logging.Logger) -> None:
    for handler in list(logger.handlers):
        if getattr(handler, _HANDLER_FLAG, False):
            logger.removeHandler(handler)
            try:
                handler.close()
            except OSError:
                pass


def configure_logging(logging_cfg: Optional[LoggingConfig] = None) -> Path:
    cfg = logging_cfg or LoggingConfig()
    log_file = resolve_path(cfg.file_path)
    log_file.parent.mkdir(parents=True, exist_ok=True)

    with _LOCK:
        root = logging.getLogger()
        root.setLevel(logging.DEBUG)
        _remove_managed_handlers(root)

        file_handler = RotatingFileHandler(
            log_file,
            maxBytes=cfg.max_bytes,
            backupCount=cfg.backup_count,
            encoding="utf-8",
        )
        file_handler.setLevel(cfg.level)
        file_handler.setFormatter(JsonLineFormatter())
        setattr(file_handler, _HANDLER_FLAG, True)
        root.addHandler(file_handler)

        if cfg.console_enabled:
            # stderr; stdout carries the emitted reports
            console_handler = logging.StreamHandler()
            console_handler.setLevel(cfg.console_level)
            console_handler.setFormatter(ConsoleFormatter())
            setattr(console_handler, _HANDLER_FLAG, True)
            root.addHandler(console_handler)

    return log_file


def reset_logging() -> None:
    with _LOCK:
        _remove_managed_handlers(logging.getLogger())


def get_logger(name: str) -> logging.Logger:
    return logging.getLogger(name)
