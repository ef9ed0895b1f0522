from __future__ import annotations

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Callable, Dict, List, Sequence, Tuple

import numpy as np

from palperm.algorithms.palindromics import (
    check_mode,
    is_gsp,
    is_gsp_oracle,
    is_palindrome,
    palindromic_values,
)
from palperm.algorithms.permutation import enumerate_range, factorial_table, from_one_line
from palperm.errors import GuardError, InvalidDegreeError, RankOutOfRangeError, TilingError
from palperm.logging_system import get_logger, run_context

LOGGER = get_logger(__name__)

CENSUS_MAX_DEGREE = 12
WITNESS_CAP = 16
DEFAULT_CHUNK = 32768
# digit-mode values of S_12 are 30 symbols long
WITNESS_ORACLE_MAX_LENGTH = 32
COUNT_FIELDS: Tuple[str, ...] = ("pp_l", "pp_r", "pp", "gspp_l", "gspp_r", "gspp")


@dataclass
class PartialCount:
    n: int
    mode: str
    lo: int
    hi: int
    counts: Dict[str, int]
    union_size: int
    neither_witnesses: List[str]
    checksum: int

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class CensusRecord:
    n: int
    mode: str
    counts: Dict[str, int]
    union_size: int
    neither_witnesses: List[str]
    checksum: int
    elapsed: float = field(default=0.0, compare=False)
    windows: int = field(default=1, compare=False)
    workers: int = field(default=1, compare=False)

    @property
    def residual(self) -> int:
        return math.factorial(self.n) - self.union_size

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class InclusionExclusion:
    holds: bool
    residual: int

    def to_dict(self) -> dict:
        return asdict(self)


def _empty_counts() -> Dict[str, int]:
    return {name: 0 for name in COUNT_FIELDS}


def _check_census_degree(n: int, max_degree: int) -> None:
    if not isinstance(n, int) or n < 1:
        raise InvalidDegreeError(f"census degree must be a positive integer, got {n!r}")
    if n > max_degree:
        raise GuardError(f"census limited to n <= {max_degree}, got {n}")


def _check_window(n: int, lo: int, hi: int) -> None:
    total = math.factorial(n)
    if not (0 <= lo <= hi <= total):
        raise RankOutOfRangeError(f"window [{lo}, {hi}) is not inside [0, {total}] for degree {n}")


class BlockClassifier:
    """Classify consecutive rank blocks of S_n with fixed numpy buffers."""

    def __init__(self, n: int, mode: str, chunk_size: int = DEFAULT_CHUNK) -> None:
        self.n = n
        self.mode = check_mode(mode)
        self.chunk_size = max(1, int(chunk_size))
        facts = factorial_table(n)
        self._place_values = np.array([facts[n - 1 - i] for i in range(n)], dtype=np.int64)
        self._offsets = np.arange(self.chunk_size, dtype=np.int64)
        self._ranks = np.empty(self.chunk_size, dtype=np.int64)
        self._digits = np.empty(self.chunk_size, dtype=np.int64)
        self._available = np.empty((self.chunk_size, n), dtype=np.bool_)
        self._images = np.empty((self.chunk_size, n), dtype=np.int8)

        # digit and token layouts coincide while every image is a single digit
        self._digit_layout = self.mode == "digit" and n >= 10
        if self._digit_layout:
            head = [int(ch) for ch in "".join(str(i) for i in range(1, n + 1))]
        else:
            head = list(range(1, n + 1))
        self._head_width = len(head)
        width = 2 * self._head_width
        self._left = np.empty((self.chunk_size, width), dtype=np.int8)
        self._right = np.empty((self.chunk_size, width), dtype=np.int8)
        self._left[:, : self._head_width] = head
        self._right[:, : self._head_width] = head

    def _unrank_block(self, lo: int, count: int) -> np.ndarray:
        ranks = self._ranks[:count]
        np.add(self._offsets[:count], lo, out=ranks)
        digits = self._digits[:count]
        available = self._available[:count]
        available.fill(True)
        images = self._images[:count]
        rows = self._offsets[:count]
        for i in range(self.n):
            np.floor_divide(ranks, self._place_values[i], out=digits)
            np.remainder(ranks, self._place_values[i], out=ranks)
            # index of the (digit+1)-th still-available value
            chosen = np.argmax(np.cumsum(available, axis=1) > digits[:, None], axis=1)
            images[:, i] = chosen + 1
            available[rows, chosen] = False
        return images

    def _fill_tails(self, images: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        count = images.shape[0]
        left = self._left[:count]
        right = self._right[:count]
        hw = self._head_width
        if not self._digit_layout:
            right[:, hw:] = images
            left[:, hw:] = images[:, ::-1]
            return left, right
        self._layout_digits(images, right[:, hw:])
        self._layout_digits(images[:, ::-1], left[:, hw:])
        return left, right

    @staticmethod
    def _layout_digits(images: np.ndarray, out: np.ndarray) -> None:
        count = images.shape[0]
        rows = np.arange(count)
        values = images.astype(np.int64)
        lengths = np.where(values >= 10, 2, 1)
        starts = np.cumsum(lengths, axis=1) - lengths
        for j in range(values.shape[1]):
            v = values[:, j]
            pos = starts[:, j]
            two = v >= 10
            out[rows, pos] = np.where(two, v // 10, v)
            out[rows[two], pos[two] + 1] = v[two] % 10

    @staticmethod
    def _masks(matrix: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        m = matrix.shape[1]
        palindrome = np.all(matrix == matrix[:, ::-1], axis=1)
        bordered = np.zeros(matrix.shape[0], dtype=np.bool_)
        for width in range(1, m // 2 + 1):
            bordered |= np.all(matrix[:, :width] == matrix[:, m - width :], axis=1)
        return palindrome, palindrome | bordered

    def classify_window(self, lo: int, hi: int, witness_cap: int = WITNESS_CAP) -> PartialCount:
        counts = _empty_counts()
        union = 0
        witnesses: List[str] = []
        start = lo
        while start < hi:
            count = min(self.chunk_size, hi - start)
            images = self._unrank_block(start, count)
            left, right = self._fill_tails(images)
            pal_l, gsp_l = self._masks(left)
            pal_r, gsp_r = self._masks(right)

            counts["pp_l"] += int(np.count_nonzero(pal_l))
            counts["pp_r"] += int(np.count_nonzero(pal_r))
            counts["pp"] += int(np.count_nonzero(pal_l & pal_r))
            counts["gspp_l"] += int(np.count_nonzero(gsp_l))
            counts["gspp_r"] += int(np.count_nonzero(gsp_r))
            counts["gspp"] += int(np.count_nonzero(gsp_l & gsp_r))
            either = gsp_l | gsp_r
            union += int(np.count_nonzero(either))

            if len(witnesses) < witness_cap:
                missing = np.flatnonzero(~either)[: witness_cap - len(witnesses)]
                for row in missing:
                    witnesses.append(",".join(str(int(v)) for v in images[row]))
            start += count

        return PartialCount(
            n=self.n,
            mode=self.mode,
            lo=lo,
            hi=hi,
            counts=counts,
            union_size=union,
            neither_witnesses=witnesses,
            checksum=hi - lo,
        )


def census_range(
    n: int,
    mode: str,
    lo: int,
    hi: int,
    witness_cap: int = WITNESS_CAP,
    chunk_size: int = DEFAULT_CHUNK,
) -> PartialCount:
    check_mode(mode)
    _check_census_degree(n, CENSUS_MAX_DEGREE)
    _check_window(n, lo, hi)
    if lo == hi:
        return PartialCount(n, mode, lo, hi, _empty_counts(), 0, [], 0)
    classifier = BlockClassifier(n, mode, chunk_size=min(chunk_size, hi - lo))
    return classifier.classify_window(lo, hi, witness_cap=witness_cap)


def _census_window(args: Tuple[int, str, int, int, int, int]) -> PartialCount:
    n, mode, lo, hi, witness_cap, chunk_size = args
    return census_range(n, mode, lo, hi, witness_cap=witness_cap, chunk_size=chunk_size)


def partition_windows(total: int, parts: int) -> List[Tuple[int, int]]:
    """Split [0, total) into at most `parts` contiguous windows of near-equal size."""
    parts = max(1, min(parts, total)) if total > 0 else 1
    base, extra = divmod(total, parts)
    windows = []
    lo = 0
    for i in range(parts):
        hi = lo + base + (1 if i < extra else 0)
        windows.append((lo, hi))
        lo = hi
    return windows


def merge(parts: Sequence[PartialCount], witness_cap: int = WITNESS_CAP) -> CensusRecord:
    if not parts:
        raise TilingError("nothing to merge")
    n, mode = parts[0].n, parts[0].mode
    for part in parts:
        if part.n != n or part.mode != mode:
            raise TilingError(
                f"cannot merge ({part.n}, {part.mode}) with ({n}, {mode})"
            )

    ordered = sorted(parts, key=lambda part: (part.lo, part.hi))
    expected = 0
    for part in ordered:
        if part.lo != expected:
            kind = "overlap" if part.lo < expected else "gap"
            raise TilingError(f"windows do not tile [0, {n}!): {kind} at rank {min(part.lo, expected)}")
        expected = part.hi
    if expected != math.factorial(n):
        raise TilingError(f"windows stop at rank {expected}, expected {math.factorial(n)}")

    counts = _empty_counts()
    witnesses: List[str] = []
    union = 0
    checksum = 0
    for part in ordered:
        for name in COUNT_FIELDS:
            counts[name] += part.counts[name]
        union += part.union_size
        checksum += part.checksum
        room = witness_cap - len(witnesses)
        if room > 0:
            witnesses.extend(part.neither_witnesses[:room])

    return CensusRecord(
        n=n,
        mode=mode,
        counts=counts,
        union_size=union,
        neither_witnesses=witnesses,
        checksum=checksum,
        windows=len(ordered),
    )


def census(
    n: int,
    mode: str = "token",
    workers: int = 1,
    witness_cap: int = WITNESS_CAP,
    chunk_size: int = DEFAULT_CHUNK,
    windows_per_worker: int = 4,
    max_degree: int = CENSUS_MAX_DEGREE,
) -> CensusRecord:
    """Classify every element of S_n and merge the per-window counts."""
    check_mode(mode)
    _check_census_degree(n, min(max_degree, CENSUS_MAX_DEGREE))
    total = math.factorial(n)
    # a single block is cheaper than starting a pool
    workers = max(1, int(workers)) if total > chunk_size else 1
    windows = partition_windows(total, workers * windows_per_worker if workers > 1 else 1)
    tasks = [(n, mode, lo, hi, witness_cap, chunk_size) for lo, hi in windows]

    started = time.perf_counter()
    if workers == 1 or len(tasks) == 1:
        parts = [_census_window(task) for task in tasks]
    else:
        with ProcessPoolExecutor(max_workers=workers) as executor:
            parts = list(executor.map(_census_window, tasks))
    record = merge(parts, witness_cap=witness_cap)
    record.elapsed = round(time.perf_counter() - started, 6)
    record.workers = workers

    LOGGER.info(
        "Census finished",
        extra={
            "context": run_context(
                n,
                mode,
                elapsed=record.elapsed,
                workers=workers,
                windows=len(tasks),
                union_size=record.union_size,
            )
        },
    )
    return record


def check_inclusion_exclusion(record: CensusRecord) -> InclusionExclusion:
    residual = math.factorial(record.n) - record.union_size
    return InclusionExclusion(holds=residual == 0, residual=residual)


def naive_census(
    n: int,
    mode: str = "token",
    recognizer: Callable[[Sequence], bool] = is_gsp,
    witness_cap: int = WITNESS_CAP,
) -> CensusRecord:
    """Single-loop census over enumerate_range with a pluggable GSP recognizer."""
    check_mode(mode)
    _check_census_degree(n, CENSUS_MAX_DEGREE)
    total = math.factorial(n)
    counts = _empty_counts()
    union = 0
    witnesses: List[str] = []
    for p in enumerate_range(n, 0, total):
        left, right = palindromic_values(p, mode)
        pal_l, pal_r = is_palindrome(left), is_palindrome(right)
        gsp_l, gsp_r = recognizer(left), recognizer(right)
        counts["pp_l"] += pal_l
        counts["pp_r"] += pal_r
        counts["pp"] += pal_l and pal_r
        counts["gspp_l"] += gsp_l
        counts["gspp_r"] += gsp_r
        counts["gspp"] += gsp_l and gsp_r
        if gsp_l or gsp_r:
            union += 1
        elif len(witnesses) < witness_cap:
            witnesses.append(p.one_line())
    return CensusRecord(
        n=n,
        mode=mode,
        counts={name: int(value) for name, value in counts.items()},
        union_size=union,
        neither_witnesses=witnesses,
        checksum=total,
    )


def verify_witnesses(record: CensusRecord, max_length: int = WITNESS_ORACLE_MAX_LENGTH) -> List[str]:
    """Witnesses that the oracle finds to be in a GSP class after all (expected empty)."""
    bad: List[str] = []
    for text in record.neither_witnesses:
        p = from_one_line([int(v) for v in text.split(",")])
        left, right = palindromic_values(p, record.mode)
        if is_gsp_oracle(left, max_length=max_length) or is_gsp_oracle(right, max_length=max_length):
            bad.append(text)
    if bad:
        LOGGER.error(
            "Census witness rejected by oracle",
            extra={"context": run_context(record.n, record.mode, witnesses=bad)},
        )
    return bad


def left_factorial(n: int) -> int:
    """sum of k! for k < n."""
    return sum(math.factorial(k) for k in range(n))
