from __future__ import annotations

import math
import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, List, Optional, Sequence, Tuple

from palperm.errors import (
    DegreeMismatchError,
    InvalidCycleError,
    InvalidDegreeError,
    NotABijectionError,
    ParseError,
    RankOutOfRangeError,
)

MAX_DEGREE = 20

Cycle = Tuple[int, ...]
CycleList = List[Cycle]


def _check_degree(n: int) -> int:
    if not isinstance(n, int) or isinstance(n, bool):
        raise InvalidDegreeError(f"degree must be an integer, got {n!r}")
    if n < 1:
        raise InvalidDegreeError(f"degree must be >= 1, got {n}")
    if n > MAX_DEGREE:
        raise InvalidDegreeError(f"degree {n} exceeds the supported maximum {MAX_DEGREE}")
    return n


@lru_cache(maxsize=None)
def factorial_table(n: int) -> Tuple[int, ...]:
    """Factorials 0!..n! inclusive."""
    return tuple(math.factorial(k) for k in range(n + 1))


@dataclass(frozen=True)
class Permutation:
    """A bijection of {1..n} in one-line form: images[i] = sigma(i + 1)."""

    images: Tuple[int, ...]

    def __post_init__(self) -> None:
        images = tuple(int(v) for v in self.images)
        object.__setattr__(self, "images", images)
        if not images:
            raise InvalidDegreeError("a permutation needs at least one image")
        n = _check_degree(len(images))
        seen = [False] * (n + 1)
        for pos, value in enumerate(images, start=1):
            if value < 1 or value > n:
                raise NotABijectionError(
                    f"image {value} at position {pos} is outside 1..{n}",
                    position=pos,
                )
            if seen[value]:
                raise NotABijectionError(
                    f"image {value} at position {pos} is repeated",
                    position=pos,
                )
            seen[value] = True

    @property
    def n(self) -> int:
        return len(self.images)

    def __call__(self, x: int) -> int:
        return self.images[x - 1]

    def __str__(self) -> str:
        return self.one_line()

    def one_line(self) -> str:
        return ",".join(str(v) for v in self.images)

    def to_dict(self) -> dict:
        return {"n": self.n, "images": list(self.images)}


def identity(n: int) -> Permutation:
    _check_degree(n)
    return Permutation(tuple(range(1, n + 1)))


def from_one_line(images: Sequence[int]) -> Permutation:
    if len(images) == 0:
        raise InvalidDegreeError("one-line form must be nonempty")
    return Permutation(tuple(images))


def from_cycles(n: int, cycles: Sequence[Sequence[int]]) -> Permutation:
    _check_degree(n)
    images = list(range(1, n + 1))
    used = set()
    for cycle in cycles:
        if len(cycle) == 0:
            raise InvalidCycleError("cycles must have length >= 1")
        for x in cycle:
            if x < 1 or x > n:
                raise InvalidCycleError(f"cycle entry {x} is outside 1..{n}")
            if x in used:
                raise InvalidCycleError(f"cycle entry {x} is repeated")
            used.add(x)
        r = len(cycle)
        for i, x in enumerate(cycle):
            images[x - 1] = cycle[(i + 1) % r]
    return Permutation(tuple(images))


def compose(a: Permutation, b: Permutation) -> Permutation:
    """Return a∘b, applying b first: (a∘b)(x) = a(b(x))."""
    if a.n != b.n:
        raise DegreeMismatchError(f"cannot compose degree {a.n} with degree {b.n}")
    left = a.images
    return Permutation(tuple(left[v - 1] for v in b.images))


def inverse(p: Permutation) -> Permutation:
    out = [0] * p.n
    for i, v in enumerate(p.images, start=1):
        out[v - 1] = i
    return Permutation(tuple(out))


def power(p: Permutation, k: int) -> Permutation:
    """k-th power under compose; negative k uses the inverse."""
    base = p if k >= 0 else inverse(p)
    result = identity(p.n)
    for _ in range(abs(k)):
        result = compose(base, result)
    return result


def reversal(n: int) -> Permutation:
    _check_degree(n)
    return Permutation(tuple(range(n, 0, -1)))


def rank(p: Permutation) -> int:
    """Lexicographic rank of the one-line form via its Lehmer code."""
    n = p.n
    facts = factorial_table(n)
    images = p.images
    total = 0
    for i in range(n):
        smaller = 0
        vi = images[i]
        for j in range(i + 1, n):
            if images[j] < vi:
                smaller += 1
        total += smaller * facts[n - 1 - i]
    return total


def unrank(n: int, k: int) -> Permutation:
    _check_degree(n)
    facts = factorial_table(n)
    if k < 0 or k >= facts[n]:
        raise RankOutOfRangeError(f"rank {k} is outside [0, {facts[n]}) for degree {n}")
    available = list(range(1, n + 1))
    images: List[int] = []
    for i in range(n):
        digit, k = divmod(k, facts[n - 1 - i])
        images.append(available.pop(digit))
    return Permutation(tuple(images))


def _next_in_place(buf: List[int]) -> bool:
    i = len(buf) - 2
    while i >= 0 and buf[i] >= buf[i + 1]:
        i -= 1
    if i < 0:
        return False
    j = len(buf) - 1
    while buf[j] <= buf[i]:
        j -= 1
    buf[i], buf[j] = buf[j], buf[i]
    buf[i + 1 :] = reversed(buf[i + 1 :])
    return True


def enumerate_range(n: int, lo: int, hi: int) -> Iterator[Permutation]:
    """Yield permutations with ranks in [lo, hi) in lexicographic order."""
    _check_degree(n)
    total = factorial_table(n)[n]
    if not (0 <= lo <= hi <= total):
        raise RankOutOfRangeError(f"window [{lo}, {hi}) is not inside [0, {total}] for degree {n}")
    return _walk(n, lo, hi)


def _walk(n: int, lo: int, hi: int) -> Iterator[Permutation]:
    if lo == hi:
        return
    buf = list(unrank(n, lo).images)
    for _ in range(hi - lo):
        yield Permutation(tuple(buf))
        _next_in_place(buf)


def to_cycles(p: Permutation) -> CycleList:
    """Canonical cycles: each starts at its minimum, sorted, fixed points dropped."""
    seen = [False] * (p.n + 1)
    cycles: CycleList = []
    for start in range(1, p.n + 1):
        if seen[start]:
            continue
        cycle = [start]
        seen[start] = True
        x = p(start)
        while x != start:
            cycle.append(x)
            seen[x] = True
            x = p(x)
        if len(cycle) > 1:
            cycles.append(tuple(cycle))
    return cycles


def format_cycles(p: Permutation) -> str:
    cycles = to_cycles(p)
    if not cycles:
        return "()"
    return "".join("(" + " ".join(str(x) for x in c) + ")" for c in cycles)


def format_two_row(p: Permutation) -> str:
    width = len(str(p.n))
    top = " ".join(str(i).rjust(width) for i in range(1, p.n + 1))
    bottom = " ".join(str(v).rjust(width) for v in p.images)
    return f"{top}\n{bottom}"


_CYCLE_RE = re.compile(r"\(([^()]*)\)")


def parse_permutation(text: str, degree: Optional[int] = None) -> Permutation:
    """Parse one-line ("2,3,1" / "2 3 1") or cycle ("(1 2 3)(4 5)") syntax."""
    raw = str(text)
    stripped = raw.strip()
    if not stripped:
        raise ParseError("empty permutation text", position=1)
    offset = raw.index(stripped[0])

    if stripped.startswith("("):
        return _parse_cycles(stripped, offset, degree)

    values: List[int] = []
    starts: List[int] = []
    for token, start in _one_line_fields(stripped):
        if not token:
            raise ParseError("empty entry", position=offset + start + 1)
        if not _is_decimal(token):
            raise ParseError(f"invalid entry {token!r}", position=offset + start + 1)
        values.append(int(token))
        starts.append(offset + start + 1)
    if degree is not None and degree != len(values):
        raise ParseError(f"expected {degree} entries, got {len(values)}", position=offset + 1)
    try:
        return from_one_line(values)
    except NotABijectionError as exc:
        position = starts[exc.position - 1] if exc.position else offset + 1
        raise ParseError(str(exc), position=position) from exc


def _is_decimal(token: str) -> bool:
    return token.isascii() and token.isdigit()


def _one_line_fields(text: str) -> List[Tuple[str, int]]:
    """Entries with their offsets; comma-separated text keeps empty fields."""
    if "," not in text:
        return [(m.group(0), m.start()) for m in re.finditer(r"\S+", text)]
    fields = []
    start = 0
    for piece in text.split(","):
        token = piece.strip()
        lead = len(piece) - len(piece.lstrip())
        fields.append((token, start + (lead if token else 0)))
        start += len(piece) + 1
    return fields


def _parse_cycles(text: str, offset: int, degree: Optional[int]) -> Permutation:
    cycles: List[Cycle] = []
    cursor = 0
    for match in _CYCLE_RE.finditer(text):
        gap = text[cursor : match.start()]
        if gap.strip():
            raise ParseError("unexpected text between cycles", position=offset + cursor + 1)
        body = match.group(1)
        entries: List[int] = []
        for item in re.finditer(r"[^,\s]+", body):
            token = item.group(0)
            if not _is_decimal(token):
                raise ParseError(
                    f"invalid cycle entry {token!r}",
                    position=offset + match.start(1) + item.start() + 1,
                )
            entries.append(int(token))
        if entries:
            cycles.append(tuple(entries))
        cursor = match.end()
    if text[cursor:].strip():
        raise ParseError("unterminated or malformed cycle", position=offset + cursor + 1)

    largest = max((x for c in cycles for x in c), default=1)
    n = degree if degree is not None else largest
    try:
        return from_cycles(n, cycles)
    except InvalidCycleError as exc:
        raise ParseError(str(exc), position=offset + 1) from exc
