from __future__ import annotations

import hashlib
import json
import os
from pathlib import Path
from typing import Optional

from palperm.algorithms.census import CensusRecord
from palperm.errors import PalpermError
from palperm.logging_system import get_logger, run_context
from palperm.reporting import ALGORITHM_VERSION, emit_json, parse_record

LOGGER = get_logger(__name__)

CACHE_SUFFIX = ".json"


def cache_key(n: int, mode: str, witness_cap: int) -> str:
    payload = json.dumps(
        {"n": n, "mode": mode, "witness_cap": witness_cap, "version": ALGORITHM_VERSION},
        sort_keys=True,
    )
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


class ResultCache:
    """Census records on disk, one JSON file per (n, mode, witness_cap)."""

    def __init__(self, directory: str | Path, enabled: bool = True) -> None:
        self.directory = Path(directory)
        self.enabled = enabled

    def path_for(self, n: int, mode: str, witness_cap: int) -> Path:
        return self.directory / f"{cache_key(n, mode, witness_cap)}{CACHE_SUFFIX}"

    def load(self, n: int, mode: str, witness_cap: int) -> Optional[CensusRecord]:
        if not self.enabled:
            return None
        path = self.path_for(n, mode, witness_cap)
        if not path.exists():
            return None
        try:
            record = parse_record(path.read_text(encoding="utf-8"))
        except (OSError, PalpermError) as exc:
            LOGGER.warning(
                "Ignoring unreadable cache entry",
                extra={"context": {"path": str(path), "error": str(exc)}},
            )
            return None
        if record.n != n or record.mode != mode:
            LOGGER.warning("Cache entry does not match its key", extra={"context": {"path": str(path)}})
            return None
        LOGGER.debug("Cache hit", extra={"context": run_context(n, mode, path=str(path))})
        return record

    def store(self, record: CensusRecord, witness_cap: int) -> Optional[Path]:
        if not self.enabled:
            return None
        final_path = self.path_for(record.n, record.mode, witness_cap)
        temp_path = final_path.with_name(f".tmp_{final_path.stem}_{os.getpid()}{CACHE_SUFFIX}")
        try:
            self.directory.mkdir(parents=True, exist_ok=True)
            temp_path.write_text(emit_json(record, include_timings=True), encoding="utf-8")
            temp_path.replace(final_path)
        except OSError as exc:
            LOGGER.warning(
                "Failed to write cache entry",
                extra={"context": {"path": str(final_path), "error": str(exc)}},
            )
            try:
                temp_path.unlink()
            except OSError:
                pass
            return None
        return final_path

    def clear(self) -> int:
        if not self.directory.exists():
            return 0
        removed = 0
        for path in self.directory.glob(f"*{CACHE_SUFFIX}"):
            try:
                path.unlink()
                removed += 1
            except OSError:
                continue
        return removed
