"""Skip-gram negative-sampling trainer with optional character n-gram subwords.

The corpus is consumed in line chunks. For each chunk a self-seeded RNG
(derived from the master seed, epoch, and chunk index) draws subsampling
decisions, dynamic window sizes, and negatives, so the generated training
pairs are independent of worker scheduling. Updates run in a compiled
sequential kernel; with one worker the whole run is bit-reproducible, with
several workers chunks are dispatched to threads that update the shared
parameter matrices lock-free (races on components are tolerated by design).

The input representation of a word is the mean of its word vector and its
n-gram vectors; gradients flow through that mean, so each constituent row
receives 1/count of the hidden-layer gradient.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from collections import deque
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
from numba import njit

from .corpus import EmptyCorpus
from .embeddings import EmbeddingSpace, char_ngrams
from .errors import ValidationError

NEGATIVE_EXPONENT = 0.75
LR_FLOOR_FRACTION = 1e-4
CHUNK_LINES = 2000


class VocabularyEmpty(ValidationError):
    """No token reaches min_count."""


@dataclass
class TrainConfig:
    dim: int = 300
    window: int = 5
    negatives: int = 10
    epochs: int = 5
    min_count: int = 5
    subsample_threshold: float = 1e-4
    subwords: bool = True
    min_ngram: int = 3
    max_ngram: int = 6
    learning_rate: float = 0.05
    seed: int = 0
    workers: int = 1

    def __post_init__(self):
        if self.dim <= 0 or self.epochs <= 0 or self.negatives <= 0:
            raise ValidationError("dim, epochs and negatives must be positive")
        if self.window < 1:
            raise ValidationError("window must be >= 1")
        if self.min_count < 1:
            raise ValidationError("min_count must be >= 1")
        if not 0 < self.learning_rate:
            raise ValidationError("learning rate must be positive")
        if self.min_ngram < 1 or self.max_ngram < self.min_ngram:
            raise ValidationError("bad n-gram length range")
        if self.workers < 1:
            raise ValidationError("workers must be >= 1")


# ---------------------------------------------------------------------------
# Loss and analytic gradients (reference form, float64).
# ---------------------------------------------------------------------------

def _sigmoid(x):
    return 1.0 / (1.0 + np.exp(-x))


def sgns_loss(hidden: np.ndarray, context: np.ndarray, negatives: np.ndarray) -> float:
    """Negative-sampling loss for one (hidden, context, negatives) triple.

    -log sigma(u_o . h) - sum_k log sigma(-u_k . h)
    """
    pos = float(np.dot(context, hidden))
    neg = negatives @ hidden
    return float(-np.log(_sigmoid(pos)) - np.sum(np.log(_sigmoid(-neg))))


def sgns_gradients(hidden, context, negatives):
    """Analytic gradients of :func:`sgns_loss` w.r.t. all three arguments."""
    g_pos = _sigmoid(float(np.dot(context, hidden))) - 1.0
    g_neg = _sigmoid(negatives @ hidden)              # [K]
    d_hidden = g_pos * context + g_neg @ negatives
    d_context = g_pos * hidden
    d_negatives = np.outer(g_neg, hidden)
    return d_hidden, d_context, d_negatives


# ---------------------------------------------------------------------------
# Compiled update kernel.
# ---------------------------------------------------------------------------

@njit(nogil=True, cache=True)
def _sgns_update(w_in, w_out, centers, contexts, negatives, sub_off, sub_ids, lr):
    """Sequential SGD over a batch of (center, context, negatives[]) rows.

    ``w_in`` holds word rows followed by n-gram rows; ``sub_off``/``sub_ids``
    give each word's n-gram rows in CSR form. ``w_out`` has word rows only.
    A negative equal to the true context is skipped.
    """
    n_pairs, n_neg = negatives.shape
    dim = w_in.shape[1]
    hidden = np.empty(dim, dtype=np.float32)
    grad = np.empty(dim, dtype=np.float32)
    for i in range(n_pairs):
        w = centers[i]
        a = sub_off[w]
        b = sub_off[w + 1]
        inv = np.float32(1.0 / (1 + (b - a)))
        for d in range(dim):
            hidden[d] = w_in[w, d]
        for j in range(a, b):
            r = sub_ids[j]
            for d in range(dim):
                hidden[d] += w_in[r, d]
        for d in range(dim):
            hidden[d] *= inv
            grad[d] = 0.0

        o = contexts[i]
        s = np.float32(0.0)
        for d in range(dim):
            s += hidden[d] * w_out[o, d]
        g = (np.float32(1.0) / (np.float32(1.0) + np.exp(-s)) - np.float32(1.0)) * lr
        for d in range(dim):
            grad[d] += g * w_out[o, d]
            w_out[o, d] -= g * hidden[d]

        for k in range(n_neg):
            t = negatives[i, k]
            if t == o:
                continue
            s = np.float32(0.0)
            for d in range(dim):
                s += hidden[d] * w_out[t, d]
            g = (np.float32(1.0) / (np.float32(1.0) + np.exp(-s))) * lr
            for d in range(dim):
                grad[d] += g * w_out[t, d]
                w_out[t, d] -= g * hidden[d]

        for d in range(dim):
            grad[d] *= inv
        for d in range(dim):
            w_in[w, d] -= grad[d]
        for j in range(a, b):
            r = sub_ids[j]
            for d in range(dim):
                w_in[r, d] -= grad[d]


# ---------------------------------------------------------------------------
# Vocabulary and pair generation.
# ---------------------------------------------------------------------------

class _Vocab:
    def __init__(self, counts: dict[str, int], min_count: int):
        kept = [(w, c) for w, c in counts.items() if c >= min_count]
        kept.sort(key=lambda wc: (-wc[1], wc[0]))
        self.words = [w for w, _ in kept]
        self.counts = np.array([c for _, c in kept], dtype=np.float64)
        self.index = {w: i for i, w in enumerate(self.words)}
        self.total = float(self.counts.sum())

    def __len__(self):
        return len(self.words)


def _corpus_reader(corpus):
    """Return a zero-arg callable producing a fresh line iterator per pass."""
    if isinstance(corpus, (str, Path)):
        path = Path(corpus)

        def reader():
            with open(path, encoding="utf-8") as fh:
                for line in fh:
                    yield line
        return reader
    if isinstance(corpus, Sequence):
        return lambda: iter(corpus)
    raise ValidationError(
        "corpus must be a path or a re-iterable sequence of lines"
    )


def _chunked(lines: Iterable[str], size: int):
    chunk: list[str] = []
    for line in lines:
        chunk.append(line)
        if len(chunk) >= size:
            yield chunk
            chunk = []
    if chunk:
        yield chunk


def _build_subword_index(vocab: _Vocab, cfg: TrainConfig):
    """CSR map word id -> rows of its n-grams in the input matrix."""
    n_words = len(vocab)
    sub_off = np.zeros(n_words + 1, dtype=np.int64)
    if not cfg.subwords:
        return [], sub_off, np.zeros(0, dtype=np.int64)
    gram_ids: dict[str, int] = {}
    per_word: list[list[int]] = []
    for w in vocab.words:
        rows = []
        for g in char_ngrams(w, cfg.min_ngram, cfg.max_ngram):
            gid = gram_ids.setdefault(g, len(gram_ids))
            rows.append(gid)
        per_word.append(rows)
    sub_ids = np.empty(sum(len(r) for r in per_word), dtype=np.int64)
    pos = 0
    for i, rows in enumerate(per_word):
        sub_off[i + 1] = sub_off[i] + len(rows)
        for gid in rows:
            sub_ids[pos] = n_words + gid
            pos += 1
    grams = [None] * len(gram_ids)
    for g, gid in gram_ids.items():
        grams[gid] = g
    return grams, sub_off, sub_ids


def _chunk_pairs(chunk, vocab, keep_prob, cum_neg, cfg, rng):
    """Materialize (centers, contexts, negatives) arrays for one line chunk."""
    line_ids = []
    n_tokens = 0
    for line in chunk:
        ids = [vocab.index[t] for t in line.split() if t in vocab.index]
        if ids:
            line_ids.append(ids)
            n_tokens += len(ids)
    if n_tokens == 0:
        return None, 0

    flat = np.fromiter(
        (i for ids in line_ids for i in ids), dtype=np.int64, count=n_tokens
    )
    keep = rng.random(n_tokens) < keep_prob[flat]
    windows = rng.integers(1, cfg.window + 1, size=n_tokens)

    centers: list[int] = []
    contexts: list[int] = []
    pos = 0
    for ids in line_ids:
        kept = [i for i, k in zip(ids, keep[pos : pos + len(ids)]) if k]
        wins = windows[pos : pos + len(ids)][keep[pos : pos + len(ids)]]
        pos += len(ids)
        n = len(kept)
        for i in range(n):
            b = wins[i]
            lo = i - b if i - b > 0 else 0
            hi = i + b + 1 if i + b + 1 < n else n
            for j in range(lo, hi):
                if j != i:
                    centers.append(kept[i])
                    contexts.append(kept[j])
    if not centers:
        return None, n_tokens

    c = np.asarray(centers, dtype=np.int64)
    o = np.asarray(contexts, dtype=np.int64)
    negs = np.searchsorted(cum_neg, rng.random((len(c), cfg.negatives)))
    return (c, o, negs.astype(np.int64)), n_tokens


def train(corpus, cfg: TrainConfig | None = None) -> EmbeddingSpace:
    """Train an embedding space on a whitespace-tokenized line corpus.

    ``corpus`` is a file path or a list of lines; it is read once to build
    the vocabulary and once per epoch for training.
    """
    cfg = cfg or TrainConfig()
    reader = _corpus_reader(corpus)

    counts: dict[str, int] = {}
    raw_total = 0
    for line in reader():
        for tok in line.split():
            counts[tok] = counts.get(tok, 0) + 1
            raw_total += 1
    if raw_total == 0:
        raise EmptyCorpus("training corpus contains no tokens")
    vocab = _Vocab(counts, cfg.min_count)
    if len(vocab) == 0:
        raise VocabularyEmpty(
            f"no token occurs at least min_count={cfg.min_count} times"
        )

    grams, sub_off, sub_ids = _build_subword_index(vocab, cfg)
    n_rows = len(vocab) + len(grams)

    rng0 = np.random.default_rng(np.random.SeedSequence([cfg.seed]))
    w_in = ((rng0.random((n_rows, cfg.dim), dtype=np.float32) * 2 - 1)
            * (0.5 / cfg.dim)).astype(np.float32)
    w_out = np.zeros((len(vocab), cfg.dim), dtype=np.float32)

    probs = vocab.counts ** NEGATIVE_EXPONENT
    cum_neg = np.cumsum(probs / probs.sum())
    cum_neg[-1] = 1.0

    if cfg.subsample_threshold and cfg.subsample_threshold > 0:
        freq = vocab.counts / vocab.total
        keep_prob = np.minimum(1.0, np.sqrt(cfg.subsample_threshold / freq))
    else:
        keep_prob = np.ones(len(vocab))

    total_work = cfg.epochs * vocab.total
    processed = 0.0

    def run_chunk(payload, lr):
        arrays, _ = payload
        if arrays is None:
            return
        c, o, negs = arrays
        _sgns_update(w_in, w_out, c, o, negs, sub_off, sub_ids, np.float32(lr))

    executor = ThreadPoolExecutor(cfg.workers) if cfg.workers > 1 else None
    try:
        for epoch in range(cfg.epochs):
            pending: deque = deque()
            for chunk_idx, chunk in enumerate(_chunked(reader(), CHUNK_LINES)):
                rng = np.random.default_rng(
                    np.random.SeedSequence([cfg.seed, epoch, chunk_idx])
                )
                payload = _chunk_pairs(chunk, vocab, keep_prob, cum_neg, cfg, rng)
                lr = cfg.learning_rate * max(
                    LR_FLOOR_FRACTION, 1.0 - processed / total_work
                )
                processed += payload[1]
                if executor is None:
                    run_chunk(payload, lr)
                else:
                    pending.append(executor.submit(run_chunk, payload, lr))
                    while len(pending) > cfg.workers * 2:
                        pending.popleft().result()
            while pending:
                pending.popleft().result()
    finally:
        if executor is not None:
            executor.shutdown(wait=True)

    # Compose final word vectors: mean of the word row and its n-gram rows.
    composed = np.empty((len(vocab), cfg.dim), dtype=np.float32)
    for i in range(len(vocab)):
        a, b = sub_off[i], sub_off[i + 1]
        v = w_in[i].copy()
        for j in range(a, b):
            v += w_in[sub_ids[j]]
        composed[i] = v / (1 + (b - a))

    subword_table = None
    if cfg.subwords:
        subword_table = {g: w_in[len(vocab) + gid] for gid, g in enumerate(grams)}
    return EmbeddingSpace(
        vocab.words, composed, subword_table=subword_table,
        ngram_range=(cfg.min_ngram, cfg.max_ngram),
    )
