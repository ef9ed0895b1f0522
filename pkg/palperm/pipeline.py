from __future__ import annotations

import time
from dataclasses import dataclass
from typing import List

from palperm.algorithms.census import CensusRecord, census, check_inclusion_exclusion
from palperm.cache import ResultCache
from palperm.config import SystemConfig, resolve_path
from palperm.logging_system import get_logger, run_context

LOGGER = get_logger(__name__)


@dataclass
class CensusRun:
    record: CensusRecord
    cached: bool


class CensusPipeline:
    """Census runs bound to one configuration, served from the result cache when possible."""

    def __init__(self, config: SystemConfig) -> None:
        self.config = config
        cfg = config.census
        self.cache = ResultCache(resolve_path(cfg.cache_dir), enabled=cfg.cache_enabled)
        self.workers = cfg.resolved_workers()

    def run(self, n: int, mode: str = "token") -> CensusRun:
        cfg = self.config.census
        started = time.perf_counter()
        cached = self.cache.load(n, mode, cfg.witness_cap)
        if cached is not None:
            LOGGER.info(
                "Census served from cache",
                extra={"context": run_context(n, mode, elapsed=time.perf_counter() - started)},
            )
            return CensusRun(record=cached, cached=True)

        record = census(
            n,
            mode=mode,
            workers=self.workers,
            witness_cap=cfg.witness_cap,
            chunk_size=cfg.chunk_size,
            windows_per_worker=cfg.windows_per_worker,
            max_degree=self.config.guards.census_max_degree,
        )
        check = check_inclusion_exclusion(record)
        if not check.holds:
            LOGGER.info(
                "Union of GSPP classes misses part of S_n",
                extra={"context": run_context(n, mode, residual=check.residual)},
            )
        self.cache.store(record, cfg.witness_cap)
        return CensusRun(record=record, cached=False)

    def sequences(self, lo: int, hi: int, mode: str = "token") -> List[CensusRecord]:
        return [self.run(n, mode).record for n in range(lo, hi + 1)]
