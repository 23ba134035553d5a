"""Embedding spaces: storage, the text vector format, and cosine similarity.

A space maps words to dense vectors of one fixed dimension. When trained
with subwords it also carries a character n-gram table, which lets
out-of-vocabulary words be composed as the mean of their known n-gram
vectors (in-vocabulary words already store their composed vector).
"""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np

from .errors import DataError, ValidationError

DEFAULT_NGRAM_RANGE = (3, 6)
# Word boundaries participate in n-grams, fastText-style.
BOUNDARY_START = "<"
BOUNDARY_END = ">"


class MalformedHeader(DataError):
    pass


class DimensionMismatch(DataError):
    pass


class DuplicateWord(DataError):
    pass


class OutOfVocabulary(ValidationError):
    """A word is neither in the vocabulary nor composable from subwords."""


def char_ngrams(word: str, min_n: int, max_n: int) -> list[str]:
    """Character n-grams of '<word>' with lengths in [min_n, max_n].

    The bracketed full word itself is excluded (it is represented by the
    word vector proper).
    """
    marked = BOUNDARY_START + word + BOUNDARY_END
    out = []
    for n in range(min_n, max_n + 1):
        if n >= len(marked):
            break
        for i in range(len(marked) - n + 1):
            out.append(marked[i : i + n])
    return out


class EmbeddingSpace:
    """Vocabulary plus a dense [vocab, dim] matrix, optionally with subwords."""

    def __init__(self, words, matrix, subword_table=None,
                 ngram_range=DEFAULT_NGRAM_RANGE):
        self.words = list(words)
        self.matrix = np.asarray(matrix)
        if self.matrix.ndim != 2 or self.matrix.shape[0] != len(self.words):
            raise ValidationError(
                f"matrix shape {self.matrix.shape} does not match {len(self.words)} words"
            )
        if not self.words:
            raise ValidationError("embedding space has an empty vocabulary")
        if not np.isfinite(self.matrix).all():
            raise ValidationError("embedding matrix contains non-finite components")
        self.index = {w: i for i, w in enumerate(self.words)}
        if len(self.index) != len(self.words):
            raise ValidationError("duplicate words in vocabulary")
        self.subword_table = subword_table
        self.ngram_range = tuple(ngram_range)

    @property
    def dim(self) -> int:
        return self.matrix.shape[1]

    def __contains__(self, word: str) -> bool:
        return word in self.index

    def __len__(self) -> int:
        return len(self.words)

    def __getitem__(self, word: str) -> np.ndarray:
        try:
            return self.matrix[self.index[word]]
        except KeyError:
            raise OutOfVocabulary(word) from None

    def resolve(self, word: str) -> np.ndarray | None:
        """Vector for ``word``: stored if in vocabulary, else the mean of its
        known n-gram vectors, else None."""
        i = self.index.get(word)
        if i is not None:
            return self.matrix[i]
        if self.subword_table:
            grams = [
                self.subword_table[g]
                for g in char_ngrams(word, *self.ngram_range)
                if g in self.subword_table
            ]
            if grams:
                return np.mean(grams, axis=0)
        return None


def cosine(space: EmbeddingSpace, w1: str, w2: str) -> float:
    """Standard cosine similarity; raises OutOfVocabulary for unresolvable words."""
    v1 = space.resolve(w1)
    if v1 is None:
        raise OutOfVocabulary(w1)
    v2 = space.resolve(w2)
    if v2 is None:
        raise OutOfVocabulary(w2)
    n1 = math.sqrt(float(np.dot(v1, v1)))
    n2 = math.sqrt(float(np.dot(v2, v2)))
    if n1 == 0.0:
        raise OutOfVocabulary(f"{w1} resolves to a zero vector")
    if n2 == 0.0:
        raise OutOfVocabulary(f"{w2} resolves to a zero vector")
    return float(np.dot(v1, v2)) / (n1 * n2)


def save_text_format(space: EmbeddingSpace, path) -> None:
    """Write the standard text vector format.

    First line ``<vocab_size> <dim>``; then one ``<word> <c1> ... <cdim>``
    row per word, single-space separated, floats at 6 significant decimals.
    The subword table, if any, is not serialized.
    """
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{len(space.words)} {space.dim}\n")
        for word, row in zip(space.words, space.matrix):
            if any(ch.isspace() for ch in word):
                raise ValidationError(f"word {word!r} contains whitespace")
            fh.write(word + " " + " ".join("%.6g" % c for c in row) + "\n")


def load_text_format(path) -> EmbeddingSpace:
    """Load the text vector format written by :func:`save_text_format`."""
    path = Path(path)
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().rstrip("\n")
        parts = header.split()
        if len(parts) != 2:
            raise MalformedHeader(f"{path}:1: expected '<vocab_size> <dim>', got {header!r}")
        try:
            vocab_size, dim = int(parts[0]), int(parts[1])
        except ValueError:
            raise MalformedHeader(f"{path}:1: non-integer header {header!r}") from None
        if vocab_size <= 0 or dim <= 0:
            raise MalformedHeader(f"{path}:1: non-positive sizes in header {header!r}")

        words: list[str] = []
        seen: set[str] = set()
        matrix = np.empty((vocab_size, dim), dtype=np.float64)
        lineno = 1
        for line in fh:
            lineno += 1
            line = line.rstrip("\n")
            if not line:
                continue
            fields = line.split(" ")
            if len(fields) != dim + 1:
                raise DimensionMismatch(
                    f"{path}:{lineno}: expected {dim} components, got {len(fields) - 1}"
                )
            word = fields[0]
            if word in seen:
                raise DuplicateWord(f"{path}:{lineno}: duplicate word {word!r}")
            if len(words) >= vocab_size:
                raise MalformedHeader(
                    f"{path}:{lineno}: more rows than the declared vocab size {vocab_size}"
                )
            seen.add(word)
            try:
                matrix[len(words)] = [float(c) for c in fields[1:]]
            except ValueError as exc:
                raise DimensionMismatch(f"{path}:{lineno}: {exc}") from None
            words.append(word)
    if len(words) != vocab_size:
        raise MalformedHeader(
            f"{path}: declared {vocab_size} rows but found {len(words)}"
        )
    return EmbeddingSpace(words, matrix)
