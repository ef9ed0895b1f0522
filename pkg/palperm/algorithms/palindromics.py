from __future__ import annotations

from dataclasses import asdict, dataclass
from functools import lru_cache
from typing import Hashable, List, Literal, Optional, Sequence, Tuple

from palperm.algorithms.permutation import Permutation
from palperm.errors import GuardError, PalpermError

Mode = Literal["token", "digit"]
MODES: Tuple[str, ...] = ("token", "digit")
ORACLE_MAX_LENGTH = 24

Symbols = Sequence[Hashable]


def check_mode(mode: str) -> str:
    if mode not in MODES:
        raise PalpermError(f"mode must be one of {list(MODES)}, got {mode!r}")
    return mode


@dataclass(frozen=True)
class TokenSeq:
    """Sequence of positive integer symbols, e.g. a palindromic value N(sigma)."""

    tokens: Tuple[int, ...]

    def __post_init__(self) -> None:
        tokens = tuple(int(t) for t in self.tokens)
        object.__setattr__(self, "tokens", tokens)
        if not tokens:
            raise PalpermError("a token sequence needs at least one token")
        if min(tokens) < 1:
            raise PalpermError("tokens must be positive integers")

    def __len__(self) -> int:
        return len(self.tokens)

    def __getitem__(self, index):
        return self.tokens[index]

    def __iter__(self):
        return iter(self.tokens)

    def __str__(self) -> str:
        return to_digit_string(self)


@dataclass(frozen=True)
class BlockPartition:
    blocks: Tuple[Tuple[Hashable, ...], ...]

    @property
    def k(self) -> int:
        return len(self.blocks)

    def concatenation(self) -> Tuple[Hashable, ...]:
        return tuple(symbol for block in self.blocks for symbol in block)

    def is_mirrored(self) -> bool:
        k = len(self.blocks)
        return all(self.blocks[i] == self.blocks[k - 1 - i] for i in range(k // 2))


@dataclass
class ClassFlags:
    lpp: bool
    rpp: bool
    pp: bool
    lgspp: bool
    rgspp: bool
    gspp: bool

    def to_dict(self) -> dict:
        return asdict(self)


def lpv(p: Permutation) -> TokenSeq:
    """Left palindromic value: 1..n followed by sigma(n)..sigma(1)."""
    return TokenSeq(tuple(range(1, p.n + 1)) + tuple(reversed(p.images)))


def rpv(p: Permutation) -> TokenSeq:
    """Right palindromic value: 1..n followed by sigma(1)..sigma(n)."""
    return TokenSeq(tuple(range(1, p.n + 1)) + p.images)


def to_digit_string(t: Sequence[int]) -> str:
    return "".join(str(int(token)) for token in t)


def palindromic_values(p: Permutation, mode: str = "token") -> Tuple[Symbols, Symbols]:
    """(N_lambda, N_rho) as token tuples, or as digit strings in digit mode."""
    left, right = lpv(p), rpv(p)
    if check_mode(mode) == "digit":
        return to_digit_string(left), to_digit_string(right)
    return left.tokens, right.tokens


def is_palindrome(t: Symbols) -> bool:
    m = len(t)
    return all(t[i] == t[m - 1 - i] for i in range(m // 2))


def _shortest_border(t: Symbols, lo: int, hi: int) -> int:
    """Smallest l with t[lo:lo+l] == t[hi-l:hi] and 2l <= hi-lo, else 0."""
    for width in range(1, (hi - lo) // 2 + 1):
        if all(t[lo + j] == t[hi - width + j] for j in range(width)):
            return width
    return 0


def is_gsp(t: Symbols) -> bool:
    if len(t) <= 1:
        return True
    return _shortest_border(t, 0, len(t)) > 0


def is_gsp_oracle(t: Symbols, max_length: int = ORACLE_MAX_LENGTH) -> bool:
    """Exhaustive check over every block-palindrome partition of t."""
    m = len(t)
    if m > max_length:
        raise GuardError(f"oracle input length {m} exceeds guard {max_length}")
    if is_palindrome(t):
        return True
    symbols = tuple(t)

    @lru_cache(maxsize=None)
    def max_blocks(lo: int, hi: int) -> int:
        if lo == hi:
            return 0
        best = 1
        for width in range(1, (hi - lo) // 2 + 1):
            if symbols[lo : lo + width] == symbols[hi - width : hi]:
                best = max(best, 2 + max_blocks(lo + width, hi - width))
        return best

    return max_blocks(0, m) >= 2


def gsp_witness(t: Symbols) -> Optional[BlockPartition]:
    """Canonical partition by peeling the shortest equal prefix/suffix, outside in."""
    m = len(t)
    if m == 0:
        return None
    if m == 1:
        return BlockPartition(blocks=(tuple(t),))
    if not is_gsp(t):
        return None

    head: List[Tuple[Hashable, ...]] = []
    lo, hi = 0, m
    while hi - lo > 0:
        width = _shortest_border(t, lo, hi)
        if width == 0:
            break
        head.append(tuple(t[lo : lo + width]))
        lo += width
        hi -= width
    middle = [tuple(t[lo:hi])] if hi > lo else []
    return BlockPartition(blocks=tuple(head + middle + list(reversed(head))))


def _render_block(block: Sequence[Hashable], sep: str) -> str:
    return sep.join(str(s) for s in block)


def format_witness(t: Symbols) -> str:
    """Render t with its witness grouping in the style "1(23)(23)1".

    Palindromes and non-GSP sequences are rendered bare. A central pair of
    equal single-symbol blocks is shown as one group, e.g. "(12)(33)(12)".
    """
    sep = "" if all(len(str(s)) == 1 for s in t) else " "
    bare = _render_block(t, sep)
    if is_palindrome(t):
        return bare
    witness = gsp_witness(t)
    if witness is None:
        return bare

    blocks = list(witness.blocks)
    k = len(blocks)
    if k >= 2 and k % 2 == 0:
        mid = k // 2
        left, right = blocks[mid - 1], blocks[mid]
        if len(left) == 1 and len(right) == 1 and left == right:
            blocks[mid - 1 : mid + 1] = [left + right]

    parts = []
    for block in blocks:
        text = _render_block(block, sep)
        parts.append(text if len(block) == 1 else f"({text})")
    return sep.join(parts)


def classify(p: Permutation, mode: str = "token") -> ClassFlags:
    left, right = palindromic_values(p, mode)
    lpp = is_palindrome(left)
    rpp = is_palindrome(right)
    lgspp = is_gsp(left)
    rgspp = is_gsp(right)
    return ClassFlags(
        lpp=lpp,
        rpp=rpp,
        pp=lpp and rpp,
        lgspp=lgspp,
        rgspp=rgspp,
        gspp=lgspp and rgspp,
    )
