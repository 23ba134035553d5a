"""KB pseudo-corpus generation via Monte-Carlo PageRank random walks.

The KB is traversed as an undirected graph over semantic-class edges. A walk
starts at a uniformly random synset and emits a uniformly random lemma of
every synset it visits (synsets without lemmas are passed through silently);
after each emission it continues to a uniformly random neighbor with
probability alpha and stops otherwise. Every walk draws from its own random
stream derived from (seed, walk_index), so the output file is byte-identical
for any worker count: workers only split the walk-index range.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from multiprocessing import get_context
from pathlib import Path

import numpy as np

from .errors import ValidationError
from .kb import KBGraph

DEFAULT_ALPHA = 0.85
# English reference point: ~200M walks over 147306 lexical forms.
DEFAULT_WALKS_PER_LEXICALIZATION = 1358.0


class EmptyGraph(ValidationError):
    pass


@dataclass
class WalkConfig:
    alpha: float = DEFAULT_ALPHA
    n_walks: int | None = None
    walks_per_lexicalization: float | None = None
    seed: int = 0
    min_tokens_per_walk: int = 2

    def __post_init__(self):
        if not 0.0 <= self.alpha < 1.0:
            raise ValidationError(f"alpha must be in [0, 1), got {self.alpha}")
        if (self.n_walks is None) == (self.walks_per_lexicalization is None):
            raise ValidationError(
                "exactly one of n_walks / walks_per_lexicalization must be set"
            )
        if self.n_walks is not None and self.n_walks <= 0:
            raise ValidationError("n_walks must be positive")
        if (self.walks_per_lexicalization is not None
                and self.walks_per_lexicalization <= 0):
            raise ValidationError("walks_per_lexicalization must be positive")
        if self.min_tokens_per_walk < 1:
            raise ValidationError("min_tokens_per_walk must be >= 1")


@dataclass
class WalkStats:
    walks_emitted: int = 0
    walks_discarded: int = 0
    total_tokens: int = 0

    def merge(self, other: "WalkStats") -> "WalkStats":
        self.walks_emitted += other.walks_emitted
        self.walks_discarded += other.walks_discarded
        self.total_tokens += other.total_tokens
        return self

    def as_json(self) -> str:
        return json.dumps(
            {
                "walks_emitted": self.walks_emitted,
                "walks_discarded": self.walks_discarded,
                "total_tokens": self.total_tokens,
            }
        )


def default_walk_count(kb: KBGraph, walks_per_lexicalization: float) -> int:
    """Walk budget proportional to the number of lexical forms in the KB."""
    if kb.n_lemmas == 0:
        raise EmptyGraph("KB has no lexicalizations")
    n = round(walks_per_lexicalization * kb.n_lemmas)
    return max(1, int(n))


def _walk_tokens(kb: KBGraph, synset_list, alpha: float, rng) -> list[str]:
    """One walk's emitted lemmas; the rng call order is part of the format."""
    tokens: list[str] = []
    s = synset_list[rng.integers(len(synset_list))]
    lemmas = kb.synset_lemmas.get(s)
    if lemmas:
        tokens.append(lemmas[rng.integers(len(lemmas))])
    while rng.random() < alpha:
        nbrs = kb.undirected_semantic_neighbors(s)
        if not nbrs:
            break
        s = nbrs[rng.integers(len(nbrs))]
        lemmas = kb.synset_lemmas.get(s)
        if lemmas:
            tokens.append(lemmas[rng.integers(len(lemmas))])
    return tokens


def _walk_range(kb, synset_list, cfg: WalkConfig, start: int, count: int):
    """Generate walks [start, start+count); returns (text_blob, stats)."""
    out: list[str] = []
    stats = WalkStats()
    for i in range(start, start + count):
        rng = np.random.default_rng(np.random.SeedSequence([cfg.seed, i]))
        tokens = _walk_tokens(kb, synset_list, cfg.alpha, rng)
        if len(tokens) < cfg.min_tokens_per_walk:
            stats.walks_discarded += 1
            continue
        stats.walks_emitted += 1
        stats.total_tokens += len(tokens)
        out.append(" ".join(tokens))
    blob = "\n".join(out)
    if out:
        blob += "\n"
    return blob, stats


_worker_ctx: dict = {}


def _init_worker(kb, synset_list, cfg):
    _worker_ctx["args"] = (kb, synset_list, cfg)


def _run_range(start: int, count: int):
    kb, synset_list, cfg = _worker_ctx["args"]
    return _walk_range(kb, synset_list, cfg, start, count)


def generate_pseudo_corpus(kb: KBGraph, cfg: WalkConfig, sink,
                           workers: int = 1) -> WalkStats:
    """Write the pseudo-corpus to ``sink`` (path or text file object).

    Lines appear in walk-index order; walks shorter than
    ``min_tokens_per_walk`` are dropped but counted in the stats.
    """
    if kb.n_synsets == 0:
        raise EmptyGraph("cannot walk an empty KB")
    if cfg.n_walks is not None:
        n_walks = cfg.n_walks
    else:
        n_walks = default_walk_count(kb, cfg.walks_per_lexicalization)

    synset_list = sorted(kb.pos)
    # Materialize the adjacency before forking so workers share it.
    kb.undirected_semantic_neighbors(synset_list[0])

    own_sink = isinstance(sink, (str, Path))
    fh = open(sink, "w", encoding="utf-8") if own_sink else sink
    stats = WalkStats()
    try:
        if workers <= 1:
            chunk = 20000
            for start in range(0, n_walks, chunk):
                blob, part = _walk_range(
                    kb, synset_list, cfg, start, min(chunk, n_walks - start)
                )
                fh.write(blob)
                stats.merge(part)
        else:
            chunk = max(1000, math.ceil(n_walks / (workers * 8)))
            ranges = [
                (start, min(chunk, n_walks - start))
                for start in range(0, n_walks, chunk)
            ]
            ctx = get_context("fork")
            with ProcessPoolExecutor(
                max_workers=workers, mp_context=ctx,
                initializer=_init_worker, initargs=(kb, synset_list, cfg),
            ) as pool:
                for blob, part in pool.map(
                    _run_range, *zip(*ranges), chunksize=1
                ):
                    fh.write(blob)
                    stats.merge(part)
    finally:
        if own_sink:
            fh.close()
    return stats
