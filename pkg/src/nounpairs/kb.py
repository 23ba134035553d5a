"""Wordnet-style knowledge base as a typed graph with a lemma dictionary.

The KB is loaded from three TSV files (synsets, relations, lexicon; see the
``load_kb`` docstring for the exact line formats), validated once, and then
treated as immutable: every query below is read-only and safe to share
across threads or forked workers.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

from .errors import DataError

log = logging.getLogger(__name__)

NOUN_POS = "n"
VALID_POS = {"n", "v", "a", "r"}

# Characters that mark a lemma as a multiword expression.
MULTIWORD_SEPARATORS = ("_", " ")


class RelationKind(Enum):
    """Closed inventory of relation labels.

    All kinds are semantic-class except ``lexical``, the catch-all for
    surface-level links (derivation, pertainymy, ...). Unknown labels in
    input files are folded into ``other_semantic`` with a warning so
    third-party wordnet exports load without data loss.
    """

    HYPERNYM = "hypernym"
    HYPONYM = "hyponym"
    MEMBER_MERONYM = "member_meronym"
    PART_MERONYM = "part_meronym"
    SUBSTANCE_MERONYM = "substance_meronym"
    MEMBER_HOLONYM = "member_holonym"
    PART_HOLONYM = "part_holonym"
    SUBSTANCE_HOLONYM = "substance_holonym"
    ANTONYM = "antonym"
    GLOSS = "gloss"
    OTHER_SEMANTIC = "other_semantic"
    LEXICAL = "lexical"

    @property
    def semantic(self) -> bool:
        return self is not RelationKind.LEXICAL


class KBFormatError(DataError):
    """A KB input file does not conform to the TSV format."""


class DuplicateSynset(KBFormatError):
    pass


class MissingEndpoint(KBFormatError):
    """A relation or lexicon line references a synset that was never declared."""


class CycleInHypernyms(DataError):
    """The hypernym relation must form a DAG."""


class UnknownSynset(KeyError, DataError):
    pass


@dataclass
class KBGraph:
    """Synsets, typed relations, and the lemma dictionary.

    ``relations`` is stored as per-synset outgoing adjacency; ``undirected``
    adjacency over semantic edges is materialized lazily for the walker.
    """

    pos: dict[str, str]                                   # synset id -> pos tag
    out_edges: dict[str, list[tuple[RelationKind, str]]]  # source -> [(kind, target)]
    lemma_index: dict[str, set[str]]                      # lemma -> synset ids
    synset_lemmas: dict[str, list[str]]                   # synset id -> lemmas, file order
    _depth_cache: dict[str, int] = field(default_factory=dict, repr=False)
    _undirected: dict[str, list[str]] | None = field(default=None, repr=False)

    def __contains__(self, synset: str) -> bool:
        return synset in self.pos

    @property
    def n_synsets(self) -> int:
        return len(self.pos)

    @property
    def n_lemmas(self) -> int:
        return len(self.lemma_index)

    def synsets_of(self, lemma: str) -> set[str]:
        """All synsets listing ``lemma``; empty set for unknown lemmas."""
        return set(self.lemma_index.get(lemma, ()))

    def lemmas_of(self, synset: str) -> list[str]:
        if synset not in self.pos:
            raise UnknownSynset(synset)
        return self.synset_lemmas.get(synset, [])

    def semantic_neighbors(self, synset: str) -> list[tuple[RelationKind, str]]:
        """First-degree outgoing (kind, target) pairs over semantic-class kinds.

        Duplicates of the identical (kind, target) pair are removed; the same
        target reached through two different kinds counts once per kind.
        """
        if synset not in self.pos:
            raise UnknownSynset(synset)
        seen: set[tuple[RelationKind, str]] = set()
        out = []
        for kind, target in self.out_edges.get(synset, ()):
            if kind.semantic and (kind, target) not in seen:
                seen.add((kind, target))
                out.append((kind, target))
        return out

    def hypernym_depth(self, synset: str) -> int:
        """Edge count of the longest hypernym path from ``synset`` to any root.

        Roots (synsets with no hypernym) have depth 0. The hypernym edges are
        validated to be acyclic at load time, so the memoized walk terminates.
        """
        if synset not in self.pos:
            raise UnknownSynset(synset)
        cache = self._depth_cache
        if synset in cache:
            return cache[synset]
        # Iterative post-order over hypernym parents; chains can be deep.
        stack = [synset]
        while stack:
            node = stack[-1]
            if node in cache:
                stack.pop()
                continue
            parents = [t for k, t in self.out_edges.get(node, ()) if k is RelationKind.HYPERNYM]
            pending = [p for p in parents if p not in cache]
            if pending:
                stack.extend(pending)
                continue
            stack.pop()
            cache[node] = 1 + max((cache[p] for p in parents), default=-1)
        return cache[synset]

    def undirected_semantic_neighbors(self, synset: str) -> list[str]:
        """Targets adjacent to ``synset`` over semantic edges in either direction."""
        if self._undirected is None:
            adj: dict[str, set[str]] = {s: set() for s in self.pos}
            for src, edges in self.out_edges.items():
                for kind, dst in edges:
                    if kind.semantic:
                        adj[src].add(dst)
                        adj[dst].add(src)
            self._undirected = {s: sorted(nbrs) for s, nbrs in adj.items()}
        if synset not in self.pos:
            raise UnknownSynset(synset)
        return self._undirected[synset]

    def single_word_nouns(self, min_len: int = 3) -> list[str]:
        """Sorted lemmas attached to at least one noun synset, single-word, length >= min_len."""
        out = []
        for lemma, synsets in self.lemma_index.items():
            if len(lemma) < min_len:
                continue
            if any(sep in lemma for sep in MULTIWORD_SEPARATORS):
                continue
            if any(self.pos[s] == NOUN_POS for s in synsets):
                out.append(lemma)
        out.sort()
        return out

    def single_word_lemmas(self, min_len: int = 3, pos: str | None = None) -> list[str]:
        """Like ``single_word_nouns`` but over all parts of speech (or one tag)."""
        out = []
        for lemma, synsets in self.lemma_index.items():
            if len(lemma) < min_len:
                continue
            if any(sep in lemma for sep in MULTIWORD_SEPARATORS):
                continue
            if pos is None or any(self.pos[s] == pos for s in synsets):
                out.append(lemma)
        out.sort()
        return out


def _read_tsv(path: Path, n_fields: int, what: str):
    """Yield (line_number, fields) skipping blanks and '#' comments."""
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line or line.startswith("#"):
                continue
            fields = line.split("\t")
            if len(fields) != n_fields:
                raise KBFormatError(
                    f"{path}:{lineno}: expected {n_fields} tab-separated fields "
                    f"in {what} line, got {len(fields)}"
                )
            yield lineno, fields


def _check_hypernym_dag(out_edges: dict[str, list[tuple[RelationKind, str]]]) -> None:
    # Three-color DFS restricted to hypernym edges.
    WHITE, GRAY, BLACK = 0, 1, 2
    color: dict[str, int] = {}
    parents = {
        s: [t for k, t in edges if k is RelationKind.HYPERNYM]
        for s, edges in out_edges.items()
    }
    for start in parents:
        if color.get(start, WHITE) != WHITE:
            continue
        stack: list[tuple[str, int]] = [(start, 0)]
        color[start] = GRAY
        while stack:
            node, idx = stack[-1]
            succ = parents.get(node, ())
            if idx < len(succ):
                stack[-1] = (node, idx + 1)
                nxt = succ[idx]
                c = color.get(nxt, WHITE)
                if c == GRAY:
                    raise CycleInHypernyms(
                        f"hypernym cycle detected through synset {nxt!r}"
                    )
                if c == WHITE:
                    color[nxt] = GRAY
                    stack.append((nxt, 0))
            else:
                color[node] = BLACK
                stack.pop()


def load_kb(synsets_path, relations_path, lexicon_path) -> KBGraph:
    """Load and validate a KB from the three-file TSV format.

    synsets.tsv:   ``<synset_id>\\t<pos>``        pos in {n,v,a,r}
    relations.tsv: ``<source>\\t<kind>\\t<target>``
    lexicon.tsv:   ``<lemma>\\t<synset_id>``      lemma already lowercased

    Unknown relation labels are ingested as ``other_semantic`` with a warning.
    Raises DuplicateSynset / MissingEndpoint / CycleInHypernyms with the
    offending file and line number.
    """
    synsets_path = Path(synsets_path)
    relations_path = Path(relations_path)
    lexicon_path = Path(lexicon_path)

    pos: dict[str, str] = {}
    for lineno, (sid, tag) in _read_tsv(synsets_path, 2, "synset"):
        if not sid:
            raise KBFormatError(f"{synsets_path}:{lineno}: empty synset id")
        if sid in pos:
            raise DuplicateSynset(f"{synsets_path}:{lineno}: duplicate synset {sid!r}")
        if tag not in VALID_POS:
            raise KBFormatError(
                f"{synsets_path}:{lineno}: pos {tag!r} not in {sorted(VALID_POS)}"
            )
        pos[sid] = tag

    known_kinds = {k.value: k for k in RelationKind}
    out_edges: dict[str, list[tuple[RelationKind, str]]] = {}
    unknown_labels: set[str] = set()
    for lineno, (src, label, dst) in _read_tsv(relations_path, 3, "relation"):
        if src not in pos:
            raise MissingEndpoint(
                f"{relations_path}:{lineno}: relation source {src!r} is not a known synset"
            )
        if dst not in pos:
            raise MissingEndpoint(
                f"{relations_path}:{lineno}: relation target {dst!r} is not a known synset"
            )
        kind = known_kinds.get(label)
        if kind is None:
            unknown_labels.add(label)
            kind = RelationKind.OTHER_SEMANTIC
        out_edges.setdefault(src, []).append((kind, dst))
    if unknown_labels:
        log.warning(
            "unknown relation labels ingested as other_semantic: %s",
            ", ".join(sorted(unknown_labels)),
        )

    lemma_index: dict[str, set[str]] = {}
    synset_lemmas: dict[str, list[str]] = {}
    for lineno, (lemma, sid) in _read_tsv(lexicon_path, 2, "lexicon"):
        if not lemma:
            raise KBFormatError(f"{lexicon_path}:{lineno}: empty lemma")
        if sid not in pos:
            raise MissingEndpoint(
                f"{lexicon_path}:{lineno}: lexicon entry references unknown synset {sid!r}"
            )
        if sid not in lemma_index.setdefault(lemma, set()):
            lemma_index[lemma].add(sid)
            synset_lemmas.setdefault(sid, []).append(lemma)

    _check_hypernym_dag(out_edges)
    return KBGraph(pos=pos, out_edges=out_edges, lemma_index=lemma_index,
                   synset_lemmas=synset_lemmas)


def save_kb(kb: KBGraph, synsets_path, relations_path, lexicon_path) -> None:
    """Write the KB back to the three-file format in canonical sorted order.

    ``save_kb(load_kb(...))`` reproduces byte-identical files once the inputs
    themselves are canonically sorted and deduplicated.
    """
    with open(synsets_path, "w", encoding="utf-8") as fh:
        for sid in sorted(kb.pos):
            fh.write(f"{sid}\t{kb.pos[sid]}\n")
    with open(relations_path, "w", encoding="utf-8") as fh:
        rows = []
        for src, edges in kb.out_edges.items():
            rows.extend((src, kind.value, dst) for kind, dst in edges)
        rows.sort()
        for row in rows:
            fh.write("\t".join(row) + "\n")
    with open(lexicon_path, "w", encoding="utf-8") as fh:
        rows = [
            (lemma, sid) for lemma, synsets in kb.lemma_index.items() for sid in synsets
        ]
        rows.sort()
        for lemma, sid in rows:
            fh.write(f"{lemma}\t{sid}\n")


# Module-level functional aliases mirroring the graph methods; both spellings
# are exercised by the tests.
def synsets_of(kb: KBGraph, lemma: str) -> set[str]:
    return kb.synsets_of(lemma)


def semantic_neighbors(kb: KBGraph, synset: str) -> list[tuple[RelationKind, str]]:
    return kb.semantic_neighbors(synset)


def hypernym_depth(kb: KBGraph, synset: str) -> int:
    return kb.hypernym_depth(synset)


def single_word_nouns(kb: KBGraph, min_len: int = 3) -> list[str]:
    return kb.single_word_nouns(min_len)
