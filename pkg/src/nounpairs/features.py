"""The four per-noun psycholinguistic features.

CNC (concreteness) and SND (semantic neighborhood density) come from the KB
taxonomy, PND (phonological, here orthographic, neighborhood density) from a
Levenshtein distance-1 count over the lexicon, FRQ from corpus Zipf
frequencies. All functions are pure over immutable inputs; the PND index is
built once and queried read-only.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

from .corpus import TokenCounts, zipf_frequency
from .errors import DataError, ValidationError
from .kb import NOUN_POS, KBGraph


class UnknownNoun(ValidationError):
    pass


class FeatureKind(Enum):
    CNC = "CNC"
    FRQ = "FRQ"
    SND = "SND"
    PND = "PND"


@dataclass
class FeatureDictionary:
    """Per-noun raw value plus, once clustered, normalized value and label.

    Cluster labels: 0 = low, 1 = high, -1 = the zero-PND subgroup.
    """

    kind: FeatureKind
    raw: dict[str, float] = field(default_factory=dict)
    normalized: dict[str, float] | None = None
    cluster: dict[str, int] | None = None

    def __len__(self) -> int:
        return len(self.raw)


def concreteness(kb: KBGraph, noun: str) -> float:
    """Mean longest-hypernym-path depth over the noun's noun-POS synsets."""
    synsets = [s for s in kb.synsets_of(noun) if kb.pos[s] == NOUN_POS]
    if not synsets:
        raise UnknownNoun(f"{noun!r} has no noun synset")
    return sum(kb.hypernym_depth(s) for s in synsets) / len(synsets)


def snd(kb: KBGraph, noun: str) -> float:
    """Mean first-degree semantic neighbor count over the noun's noun synsets."""
    synsets = [s for s in kb.synsets_of(noun) if kb.pos[s] == NOUN_POS]
    if not synsets:
        raise UnknownNoun(f"{noun!r} has no noun synset")
    return sum(len(kb.semantic_neighbors(s)) for s in synsets) / len(synsets)


# ---------------------------------------------------------------------------
# PND: Levenshtein distance <= 1 neighborhood counts.
# ---------------------------------------------------------------------------

def within_distance_one(a: str, b: str) -> bool:
    """Levenshtein(a, b) <= 1, by linear scan instead of the full DP table.

    Equal lengths allow at most one substitution; a length difference of one
    allows a single gap; anything else is distance >= 2.
    """
    la, lb = len(a), len(b)
    if la == lb:
        mism = 0
        for ca, cb in zip(a, b):
            if ca != cb:
                mism += 1
                if mism > 1:
                    return False
        return True
    if la > lb:
        a, b = b, a
        la, lb = lb, la
    if lb - la != 1:
        return False
    # a is the shorter; skip exactly one char of b.
    i = 0
    while i < la and a[i] == b[i]:
        i += 1
    return a[i:] == b[i + 1 :]


def levenshtein(a: str, b: str) -> int:
    """Full Levenshtein distance (used by tests as the slow reference)."""
    if len(a) < len(b):
        a, b = b, a
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, start=1):
        cur = [i]
        for j, cb in enumerate(b, start=1):
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (ca != cb)))
        prev = cur
    return prev[-1]


class PndIndex:
    """Deletion-variant index answering distance-<=1 neighbor counts.

    Each word is keyed under itself and each of its single-character-deletion
    variants; any two words at distance <= 1 necessarily share a key, so
    candidate retrieval is complete and a cheap verification pass makes the
    counts exactly equal to the brute-force pairwise answer.
    """

    def __init__(self, lexicon: list[str]):
        if len(set(lexicon)) != len(lexicon):
            raise ValidationError("PND lexicon must be deduplicated")
        self.words = list(lexicon)
        self._word_set = set(self.words)
        self._buckets: dict[str, list[str]] = {}
        for w in self.words:
            for key in self._keys(w):
                self._buckets.setdefault(key, []).append(w)

    @staticmethod
    def _keys(word: str):
        yield word
        for i in range(len(word)):
            yield word[:i] + word[i + 1 :]

    def neighbors(self, word: str) -> set[str]:
        if word not in self._word_set:
            raise UnknownNoun(f"{word!r} is not in the PND lexicon")
        cands: set[str] = set()
        for key in self._keys(word):
            cands.update(self._buckets.get(key, ()))
        cands.discard(word)
        return {c for c in cands if within_distance_one(word, c)}

    def count(self, word: str) -> int:
        return len(self.neighbors(word))


def build_pnd_index(lexicon: list[str]) -> PndIndex:
    return PndIndex(lexicon)


def pnd(lexicon, noun: str) -> int:
    """Distance-<=1 neighbor count of ``noun`` within ``lexicon``.

    Accepts a word list (index built on the fly) or a prebuilt PndIndex.
    """
    index = lexicon if isinstance(lexicon, PndIndex) else PndIndex(list(lexicon))
    return index.count(noun)


def frequency(counts: TokenCounts, noun: str) -> float:
    """Zipf frequency of ``noun``; delegates to the corpus pipeline."""
    return zipf_frequency(counts, noun)


# ---------------------------------------------------------------------------
# Feature dictionary file format.
# ---------------------------------------------------------------------------

_NA = "NA"


def save_feature_dictionary(fd: FeatureDictionary, path) -> None:
    """``<noun>\\t<raw>\\t<normalized|NA>\\t<cluster|NA>`` with a kind header."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"# kind={fd.kind.value}\n")
        for noun in sorted(fd.raw):
            norm = (
                "%.9g" % fd.normalized[noun]
                if fd.normalized is not None and noun in fd.normalized
                else _NA
            )
            clus = (
                str(fd.cluster[noun])
                if fd.cluster is not None and noun in fd.cluster
                else _NA
            )
            fh.write(f"{noun}\t{'%.9g' % fd.raw[noun]}\t{norm}\t{clus}\n")


def load_feature_dictionary(path) -> FeatureDictionary:
    path = Path(path)
    kind = None
    raw: dict[str, float] = {}
    normalized: dict[str, float] = {}
    cluster: dict[str, int] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            if line.startswith("#"):
                m = re.match(r"#\s*kind=(\w+)\s*$", line)
                if m:
                    kind = FeatureKind(m.group(1))
                continue
            fields = line.split("\t")
            if len(fields) != 4:
                raise DataError(f"{path}:{lineno}: expected 4 fields")
            noun, raw_s, norm_s, clus_s = fields
            raw[noun] = float(raw_s)
            if norm_s != _NA:
                normalized[noun] = float(norm_s)
            if clus_s != _NA:
                cluster[noun] = int(clus_s)
    if kind is None:
        raise DataError(f"{path}: missing '# kind=' header")
    return FeatureDictionary(
        kind=kind,
        raw=raw,
        normalized=normalized or None,
        cluster=cluster or None,
    )
