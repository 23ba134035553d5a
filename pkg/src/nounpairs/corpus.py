"""Text corpus normalization, token counting, and Zipf frequencies.

Tokenization is a fixed Unicode rule: tokens are maximal runs of letters and
digits (underscore excluded), so punctuation always splits. Zipf frequency is
log10 of occurrences per billion tokens, clamped to [0, 8]; a word absent
from the corpus clamps to 0 rather than receiving a pseudo-count.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Iterator

from .errors import DataError, ValidationError

# \w minus underscore: Unicode letters, digits, and combining marks.
_TOKEN_RE = re.compile(r"[^\W_]+", re.UNICODE)

ZIPF_MIN = 0.0
ZIPF_MAX = 8.0
PER_BILLION = 1e9


class InvalidEncoding(DataError):
    """Input bytes are not valid UTF-8."""


class EmptyCorpus(ValidationError):
    """An operation that needs tokens was given a corpus with none."""


@dataclass
class TokenCounts:
    counts: dict[str, int] = field(default_factory=dict)
    total_tokens: int = 0

    def merge(self, other: "TokenCounts") -> "TokenCounts":
        """Fold ``other`` into self. Associative and commutative, so any
        sharding of the input stream yields identical totals."""
        for token, n in other.counts.items():
            self.counts[token] = self.counts.get(token, 0) + n
        self.total_tokens += other.total_tokens
        return self


def tokenize(text: str) -> list[str]:
    return _TOKEN_RE.findall(text)


def preprocess(
    lines: Iterable[str],
    lowercase: bool = True,
    stemmer_hook: Callable[[str], str] | None = None,
) -> Iterator[list[str]]:
    """Normalize a raw text stream into per-line token lists.

    ``stemmer_hook`` is the pluggable slot for language-specific reduction
    (e.g. an agglutination stemmer); it receives and returns a single token.
    """
    for line in lines:
        tokens = tokenize(line)
        if lowercase:
            tokens = [t.lower() for t in tokens]
        if stemmer_hook is not None:
            tokens = [stemmer_hook(t) for t in tokens]
        yield tokens


def read_lines(path) -> Iterator[str]:
    """Stream UTF-8 lines from a file, raising InvalidEncoding on bad bytes."""
    try:
        with open(path, encoding="utf-8") as fh:
            yield from fh
    except UnicodeDecodeError as exc:
        raise InvalidEncoding(f"{path}: {exc}") from exc


def count_tokens(token_stream: Iterable[list[str] | str]) -> TokenCounts:
    """Exact multiset counts over a stream of tokens or token lists.

    Memory is bounded by vocabulary size only.
    """
    counts: dict[str, int] = {}
    total = 0
    for item in token_stream:
        tokens = [item] if isinstance(item, str) else item
        for token in tokens:
            counts[token] = counts.get(token, 0) + 1
            total += 1
    return TokenCounts(counts=counts, total_tokens=total)


def zipf_frequency(counts: TokenCounts, word: str) -> float:
    """Base-10 log of occurrences per billion tokens, clamped to [0, 8]."""
    if counts.total_tokens <= 0:
        raise EmptyCorpus("cannot compute Zipf frequency over an empty corpus")
    n = counts.counts.get(word, 0)
    if n <= 0:
        return ZIPF_MIN
    value = math.log10(n / counts.total_tokens * PER_BILLION)
    return min(ZIPF_MAX, max(ZIPF_MIN, value))


def save_counts(counts: TokenCounts, path) -> None:
    """Write ``<token>\\t<count>`` TSV with a ``# total=<N>`` header comment."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"# total={counts.total_tokens}\n")
        for token in sorted(counts.counts):
            fh.write(f"{token}\t{counts.counts[token]}\n")


def load_counts(path) -> TokenCounts:
    path = Path(path)
    counts: dict[str, int] = {}
    total = None
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            if line.startswith("#"):
                m = re.match(r"#\s*total=(\d+)\s*$", line)
                if m:
                    total = int(m.group(1))
                continue
            fields = line.split("\t")
            if len(fields) != 2:
                raise DataError(f"{path}:{lineno}: expected '<token>\\t<count>'")
            counts[fields[0]] = int(fields[1])
    if total is None:
        total = sum(counts.values())
    return TokenCounts(counts=counts, total_tokens=total)
