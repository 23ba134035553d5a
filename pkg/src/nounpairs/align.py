"""Map a text embedding space onto a KB space and build hybrid vectors.

The mapping is the orthogonal Procrustes solution fitted on the shared
vocabulary after the standard supervised-mapping preprocessing (unit-
normalize rows, mean-center, unit-normalize again, applied identically to
both spaces). Hybrid vectors are the unit-normalized weighted sum of the
mapped text vector and the KB vector; a word present on one side only
reuses that side's vector directly.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .embeddings import EmbeddingSpace
from .errors import DataError, ValidationError

log = logging.getLogger(__name__)


class DimensionMismatch(ValidationError):
    pass


class EmptyIntersection(DataError):
    """The two vocabularies share no words."""


class DegenerateCovariance(DataError):
    """The seed cross-covariance has no usable signal (rank 0)."""


@dataclass
class AlignmentResult:
    transform: np.ndarray          # [dim, dim], orthogonal
    seed_vocabulary: list[str]
    residual: float                # mean squared mapping error over seeds

    @property
    def dim(self) -> int:
        return self.transform.shape[0]


def seed_dictionary(text_space: EmbeddingSpace, kb_space: EmbeddingSpace) -> list[str]:
    """Sorted vocabulary intersection of the two spaces."""
    if text_space.dim != kb_space.dim:
        raise DimensionMismatch(
            f"text dim {text_space.dim} != kb dim {kb_space.dim}"
        )
    shared = sorted(set(text_space.index) & set(kb_space.index))
    if not shared:
        raise EmptyIntersection("the two spaces share no vocabulary")
    return shared


def _unit_rows(m: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(m, axis=1, keepdims=True)
    norms[norms == 0] = 1.0
    return m / norms


def preprocess_matrix(m: np.ndarray) -> np.ndarray:
    """Unit-normalize rows, mean-center, unit-normalize again (float64)."""
    m = _unit_rows(np.asarray(m, dtype=np.float64))
    m = m - m.mean(axis=0)
    return _unit_rows(m)


def fit_orthogonal_map(
    text_space: EmbeddingSpace,
    kb_space: EmbeddingSpace,
    seeds: list[str] | None = None,
) -> AlignmentResult:
    """Orthogonal transform minimizing sum ||x_w W - y_w||^2 over seed words.

    Solved by SVD of the seed cross-covariance (Procrustes). Both spaces are
    preprocessed over their full vocabulary before the seed rows are taken.
    """
    if seeds is None:
        seeds = seed_dictionary(text_space, kb_space)
    if not seeds:
        raise EmptyIntersection("empty seed list")
    missing = [w for w in seeds if w not in text_space.index or w not in kb_space.index]
    if missing:
        raise ValidationError(f"seeds missing from a space: {missing[:5]}...")
    dim = text_space.dim
    if kb_space.dim != dim:
        raise DimensionMismatch(f"text dim {dim} != kb dim {kb_space.dim}")
    if len(seeds) < dim:
        log.warning(
            "only %d seeds for a %d-dim map; the transform may be unstable",
            len(seeds), dim,
        )

    x_all = preprocess_matrix(text_space.matrix)
    y_all = preprocess_matrix(kb_space.matrix)
    x = x_all[[text_space.index[w] for w in seeds]]
    y = y_all[[kb_space.index[w] for w in seeds]]

    m = x.T @ y
    u, s, vt = np.linalg.svd(m)
    if not np.any(s > 1e-12 * max(1.0, s[0] if s.size else 0.0)):
        raise DegenerateCovariance("seed cross-covariance is rank 0")
    w = u @ vt
    residual = float(np.mean(np.sum((x @ w - y) ** 2, axis=1)))
    return AlignmentResult(transform=w, seed_vocabulary=list(seeds), residual=residual)


def build_hybrid(
    text_space: EmbeddingSpace,
    kb_space: EmbeddingSpace,
    alignment: AlignmentResult,
    text_weight: float = 0.5,
    kb_weight: float = 0.5,
) -> EmbeddingSpace:
    """Combine the aligned spaces into one space over the vocabulary union.

    Each side's contribution is its unit-length (preprocessed, and for the
    text side mapped) vector; a word missing from one side reuses the other
    side's vector as its estimate. All output vectors are unit length.
    """
    if text_weight <= 0 or kb_weight <= 0:
        raise ValidationError("combination weights must be positive")
    x_all = preprocess_matrix(text_space.matrix) @ alignment.transform
    y_all = preprocess_matrix(kb_space.matrix)
    x_all = _unit_rows(x_all)
    y_all = _unit_rows(y_all)

    vocab = sorted(set(text_space.index) | set(kb_space.index))
    out = np.empty((len(vocab), text_space.dim), dtype=np.float64)
    for i, word in enumerate(vocab):
        ti = text_space.index.get(word)
        ki = kb_space.index.get(word)
        if ti is not None and ki is not None:
            v = text_weight * x_all[ti] + kb_weight * y_all[ki]
        elif ti is not None:
            v = x_all[ti].copy()
        else:
            v = y_all[ki].copy()
        n = np.linalg.norm(v)
        out[i] = v / n if n > 0 else v
    return EmbeddingSpace(vocab, out)


def save_alignment(alignment: AlignmentResult, path) -> None:
    """TSV sidecar: dim, row-major transform floats, residual, seed count."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"dim\t{alignment.dim}\n")
        flat = alignment.transform.reshape(-1)
        fh.write("transform\t" + "\t".join("%.17g" % v for v in flat) + "\n")
        fh.write("residual\t%.17g\n" % alignment.residual)
        fh.write(f"seeds\t{len(alignment.seed_vocabulary)}\n")
        fh.write("seed_words\t" + "\t".join(alignment.seed_vocabulary) + "\n")


def load_alignment(path) -> AlignmentResult:
    path = Path(path)
    fields: dict[str, list[str]] = {}
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            parts = line.rstrip("\n").split("\t")
            fields[parts[0]] = parts[1:]
    try:
        dim = int(fields["dim"][0])
        flat = np.array([float(v) for v in fields["transform"]], dtype=np.float64)
        residual = float(fields["residual"][0])
        seeds = fields.get("seed_words", [])
    except (KeyError, ValueError) as exc:
        raise DataError(f"{path}: malformed alignment sidecar ({exc})") from exc
    if flat.size != dim * dim:
        raise DataError(f"{path}: transform has {flat.size} values, expected {dim * dim}")
    return AlignmentResult(
        transform=flat.reshape(dim, dim), seed_vocabulary=list(seeds), residual=residual
    )
