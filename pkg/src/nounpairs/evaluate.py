"""Spearman evaluation of an embedding space against gold similarity sets.

Pairs with a word that neither the vocabulary nor the subword table can
resolve are skipped and reported; rho is computed with average ranks for
ties, so it is invariant under strictly increasing rescaling of either the
gold scores or the cosines.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .embeddings import EmbeddingSpace, cosine
from .errors import DataError, ValidationError


class MalformedLine(DataError):
    pass


class DuplicatePair(DataError):
    pass


class InsufficientCoverage(ValidationError):
    """Fewer than two gold pairs could be evaluated."""


@dataclass
class GoldDataset:
    entries: list[tuple[str, str, float]] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.entries)


def load_gold(path) -> GoldDataset:
    """Parse ``word1\\tword2\\tscore`` TSV; duplicate unordered pairs rejected."""
    path = Path(path)
    entries: list[tuple[str, str, float]] = []
    seen: set[frozenset] = set()
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line or line.startswith("#"):
                continue
            fields = line.split("\t")
            if len(fields) != 3:
                raise MalformedLine(
                    f"{path}:{lineno}: expected 'word1\\tword2\\tscore'"
                )
            w1, w2, score_s = fields
            try:
                score = float(score_s)
            except ValueError:
                raise MalformedLine(f"{path}:{lineno}: bad score {score_s!r}") from None
            if not np.isfinite(score):
                raise MalformedLine(f"{path}:{lineno}: non-finite score")
            key = frozenset((w1, w2))
            if key in seen:
                raise DuplicatePair(f"{path}:{lineno}: duplicate pair {w1!r}/{w2!r}")
            seen.add(key)
            entries.append((w1, w2, score))
    return GoldDataset(entries)


def average_ranks(values: np.ndarray) -> np.ndarray:
    """1-based ranks with ties sharing their average rank."""
    values = np.asarray(values, dtype=np.float64)
    order = np.argsort(values, kind="stable")
    ranks = np.empty(len(values), dtype=np.float64)
    i = 0
    while i < len(values):
        j = i
        while j + 1 < len(values) and values[order[j + 1]] == values[order[i]]:
            j += 1
        avg = (i + j) / 2.0 + 1.0
        ranks[order[i : j + 1]] = avg
        i = j + 1
    return ranks


def spearman_rho(x: np.ndarray, y: np.ndarray) -> float:
    """Spearman correlation: Pearson over average ranks."""
    rx = average_ranks(x)
    ry = average_ranks(y)
    rx -= rx.mean()
    ry -= ry.mean()
    denom = np.sqrt(np.sum(rx * rx) * np.sum(ry * ry))
    if denom == 0.0:
        raise InsufficientCoverage("rank variance is zero; rho undefined")
    return float(np.sum(rx * ry) / denom)


@dataclass
class EvalResult:
    rho: float
    coverage: float
    evaluated: int
    skipped: list[tuple[str, str]]


def spearman_eval(space: EmbeddingSpace, gold: GoldDataset) -> EvalResult:
    """Score ``space`` against ``gold``; skips (and reports) unresolvable pairs."""
    if len(gold) == 0:
        raise ValidationError("gold dataset is empty")
    sims: list[float] = []
    scores: list[float] = []
    skipped: list[tuple[str, str]] = []
    for w1, w2, score in gold.entries:
        if space.resolve(w1) is None or space.resolve(w2) is None:
            skipped.append((w1, w2))
            continue
        sims.append(cosine(space, w1, w2))
        scores.append(score)
    if len(sims) < 2:
        raise InsufficientCoverage(
            f"only {len(sims)} of {len(gold)} gold pairs are evaluable"
        )
    rho = spearman_rho(np.array(sims), np.array(scores))
    coverage = len(sims) / len(gold)
    return EvalResult(rho=rho, coverage=coverage, evaluated=len(sims), skipped=skipped)


def write_eval_results(rows: list[tuple[str, str, EvalResult]], path) -> None:
    """``dataset\\tspace\\trho\\tcoverage`` TSV."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("# dataset\tspace\trho\tcoverage\n")
        for dataset_name, space_name, result in rows:
            fh.write(
                f"{dataset_name}\t{space_name}\t{result.rho:.6f}\t{result.coverage:.6f}\n"
            )
