"""Feature normalization, two-group clustering, and the noun-pair matrix.

Per feature dictionary the pipeline is: interquartile-range outlier removal
on raw values, L2 normalization of the survivors, exact 1-D 2-means on the
normalized values (low cluster 0, high cluster 1). PND is special: zero-
neighbor nouns are split off first into cluster -1 and the rest proceed as
above. Pairs are emitted for nouns that resolve in all three embedding
spaces and share the full 4-label cluster signature.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Iterator

import numpy as np

from .embeddings import EmbeddingSpace, cosine
from .errors import DataError, ValidationError
from .features import FeatureDictionary, FeatureKind

ZERO_PND_CLUSTER = -1
SIM_COLUMNS = ("sim_txt", "sim_kb", "sim_hyb")
REPORT_BINS = ("<0", "0.0-0.2", "0.2-0.4", "0.4-0.6", "0.6-0.8", "0.8-1.0")

DATASET_COLUMNS = (
    "noun_a", "noun_b",
    "cnc_a", "cnc_b", "frq_a", "frq_b", "snd_a", "snd_b", "pnd_a", "pnd_b",
    "cluster_cnc", "cluster_frq", "cluster_snd", "cluster_pnd",
    "sim_txt", "sim_kb", "sim_hyb",
)


class TooFewValues(ValidationError):
    pass


class AllZero(ValidationError):
    pass


class DegenerateInput(ValidationError):
    """Clustering needs at least two distinct values."""


class EmptyDataset(ValidationError):
    pass


@dataclass
class NounPairRecord:
    noun_a: str
    noun_b: str
    cnc_a: float
    cnc_b: float
    frq_a: float
    frq_b: float
    snd_a: float
    snd_b: float
    pnd_a: float
    pnd_b: float
    cluster_cnc: int
    cluster_frq: int
    cluster_snd: int
    cluster_pnd: int
    sim_txt: float
    sim_kb: float
    sim_hyb: float


@dataclass
class PairCaps:
    """Optional per-signature sampling to keep pair counts tractable."""

    max_pairs_per_signature: int | None = None
    seed: int = 0


def iqr_filter(values: dict[str, float], k: float = 1.5) -> dict[str, float]:
    """Drop entries outside [Q1 - k*IQR, Q3 + k*IQR].

    Quartiles use linear interpolation on the sorted sample.
    """
    if len(values) < 4:
        raise TooFewValues(f"IQR filter needs >= 4 values, got {len(values)}")
    sample = np.array(sorted(values.values()), dtype=np.float64)
    q1, q3 = np.percentile(sample, [25.0, 75.0])
    iqr = q3 - q1
    lo, hi = q1 - k * iqr, q3 + k * iqr
    return {n: v for n, v in values.items() if lo <= v <= hi}


def l2_normalize(values: dict[str, float]) -> dict[str, float]:
    """Divide every value by the Euclidean norm of the whole value vector."""
    scale = max((abs(v) for v in values.values()), default=0.0)
    if scale == 0.0:
        raise AllZero("cannot L2-normalize an all-zero value vector")
    # Scale before squaring so denormal-range inputs do not underflow.
    norm = scale * math.sqrt(sum((v / scale) ** 2 for v in values.values()))
    return {n: v / norm for n, v in values.items()}


def two_cluster(values: dict[str, float]) -> dict[str, int]:
    """Exact 1-D 2-means: nouns with low values -> 0, high values -> 1.

    Every one of the n-1 sorted split points is evaluated; the split with
    the minimal within-cluster sum of squares wins, ties going to the
    smaller split index. The resulting clusters are separated by a strict
    threshold (equal values never straddle the boundary).
    """
    items = sorted(values.items(), key=lambda kv: (kv[1], kv[0]))
    n = len(items)
    xs = np.array([v for _, v in items], dtype=np.float64)
    if n < 2 or xs[0] == xs[-1]:
        raise DegenerateInput("clustering needs at least two distinct values")

    csum = np.cumsum(xs)
    csq = np.cumsum(xs * xs)
    total_sum, total_sq = csum[-1], csq[-1]

    best_cost, best_split = math.inf, None
    for i in range(1, n):  # first i values in cluster 0
        s0, q0 = csum[i - 1], csq[i - 1]
        s1, q1 = total_sum - s0, total_sq - q0
        cost = (q0 - s0 * s0 / i) + (q1 - s1 * s1 / (n - i))
        if cost < best_cost:
            best_cost, best_split = cost, i
    labels = {}
    for j, (noun, _) in enumerate(items):
        labels[noun] = 0 if j < best_split else 1
    return labels


def pnd_cluster(values: dict[str, float]) -> dict[str, int]:
    """PND clustering: zero-neighbor nouns -> -1, the rest two-clustered
    on their L2-normalized values."""
    zeros = {n for n, v in values.items() if v == 0}
    nonzero = {n: v for n, v in values.items() if v != 0}
    labels = {n: ZERO_PND_CLUSTER for n in zeros}
    if nonzero:
        labels.update(two_cluster(l2_normalize(nonzero)))
    return labels


def cluster_feature(fd: FeatureDictionary, iqr_k: float = 1.5) -> FeatureDictionary:
    """Run the full normalize-and-cluster pipeline for one dictionary.

    CNC/FRQ/SND: IQR filter raw values, L2-normalize survivors, 2-means.
    PND: zero values go straight to cluster -1 with normalized value 0.0;
    the IQR filter and normalization run on the nonzero subset only.
    """
    if fd.kind is FeatureKind.PND:
        zeros = {n: 0.0 for n, v in fd.raw.items() if v == 0}
        nonzero = {n: v for n, v in fd.raw.items() if v != 0}
        if nonzero:
            if len(nonzero) >= 4:
                nonzero = iqr_filter(nonzero, iqr_k)
            normalized = l2_normalize(nonzero)
            labels = two_cluster(normalized)
        else:
            normalized, labels = {}, {}
        normalized.update(zeros)
        labels.update({n: ZERO_PND_CLUSTER for n in zeros})
        raw = {n: fd.raw[n] for n in normalized}
        return FeatureDictionary(fd.kind, raw=raw, normalized=normalized, cluster=labels)

    survivors = iqr_filter(fd.raw, iqr_k)
    normalized = l2_normalize(survivors)
    labels = two_cluster(normalized)
    raw = {n: fd.raw[n] for n in survivors}
    return FeatureDictionary(fd.kind, raw=raw, normalized=normalized, cluster=labels)


def _pair_from_index(k: int, n: int) -> tuple[int, int]:
    """Unrank k into the (i, j), i < j, pair enumeration of range(n)."""
    # Pairs are ordered (0,1), (0,2) ... (0,n-1), (1,2), ...
    i = 0
    remaining = k
    row = n - 1
    while remaining >= row:
        remaining -= row
        i += 1
        row -= 1
    return i, i + 1 + remaining


def build_pairs(
    dicts: dict[FeatureKind, FeatureDictionary],
    spaces: dict[str, EmbeddingSpace],
    caps: PairCaps | None = None,
) -> Iterator[NounPairRecord]:
    """Stream the feature-matched noun-pair records.

    Eligible nouns are those present in all four clustered dictionaries and
    resolvable in the txt, kb, and hyb spaces. Nouns are grouped by their
    (CNC, FRQ, SND, PND) cluster signature; every unordered pair within a
    group is emitted in canonical order, unless a per-signature cap asks
    for a seeded uniform sample instead.
    """
    for kind in FeatureKind:
        fd = dicts.get(kind)
        if fd is None or fd.cluster is None or fd.normalized is None:
            raise ValidationError(f"dictionary for {kind.value} is missing or unclustered")
    for name in ("txt", "kb", "hyb"):
        if name not in spaces:
            raise ValidationError(f"missing embedding space {name!r}")

    eligible = set(dicts[FeatureKind.CNC].cluster)
    for kind in (FeatureKind.FRQ, FeatureKind.SND, FeatureKind.PND):
        eligible &= set(dicts[kind].cluster)
    eligible = {
        n for n in eligible
        if all(spaces[s].resolve(n) is not None for s in ("txt", "kb", "hyb"))
    }

    groups: dict[tuple[int, int, int, int], list[str]] = {}
    for noun in eligible:
        sig = (
            dicts[FeatureKind.CNC].cluster[noun],
            dicts[FeatureKind.FRQ].cluster[noun],
            dicts[FeatureKind.SND].cluster[noun],
            dicts[FeatureKind.PND].cluster[noun],
        )
        groups.setdefault(sig, []).append(noun)

    norm = {kind: dicts[kind].normalized for kind in FeatureKind}
    max_pairs = caps.max_pairs_per_signature if caps else None

    for sig in sorted(groups):
        nouns = sorted(groups[sig])
        g = len(nouns)
        if g < 2:
            continue
        total = g * (g - 1) // 2
        if max_pairs is not None and total > max_pairs:
            # Seed the sampler per signature so groups stay independent.
            rng = np.random.default_rng(
                np.random.SeedSequence([caps.seed, *(label + 1 for label in sig)])
            )
            picks = np.sort(rng.choice(total, size=max_pairs, replace=False))
            index_pairs = [_pair_from_index(int(k), g) for k in picks]
        else:
            index_pairs = itertools.combinations(range(g), 2)
        for i, j in index_pairs:
            a, b = nouns[i], nouns[j]
            yield NounPairRecord(
                noun_a=a, noun_b=b,
                cnc_a=norm[FeatureKind.CNC][a], cnc_b=norm[FeatureKind.CNC][b],
                frq_a=norm[FeatureKind.FRQ][a], frq_b=norm[FeatureKind.FRQ][b],
                snd_a=norm[FeatureKind.SND][a], snd_b=norm[FeatureKind.SND][b],
                pnd_a=norm[FeatureKind.PND][a], pnd_b=norm[FeatureKind.PND][b],
                cluster_cnc=sig[0], cluster_frq=sig[1],
                cluster_snd=sig[2], cluster_pnd=sig[3],
                sim_txt=cosine(spaces["txt"], a, b),
                sim_kb=cosine(spaces["kb"], a, b),
                sim_hyb=cosine(spaces["hyb"], a, b),
            )


def similarity_report(records: Iterable[NounPairRecord]) -> dict[str, list[float]]:
    """Percentage of similarity values per bin, for each similarity column.

    Bins: (-inf, 0), [0, 0.2), [0.2, 0.4), [0.4, 0.6), [0.6, 0.8), [0.8, 1].
    Each column's percentages sum to 100 within floating error.
    """
    counts = {col: [0] * len(REPORT_BINS) for col in SIM_COLUMNS}
    n = 0
    for rec in records:
        n += 1
        for col in SIM_COLUMNS:
            v = getattr(rec, col)
            if v < 0:
                b = 0
            elif v >= 0.8:
                b = 5
            else:
                b = 1 + int(v / 0.2)
            counts[col][b] += 1
    if n == 0:
        raise EmptyDataset("similarity report needs at least one record")
    return {col: [100.0 * c / n for c in counts[col]] for col in SIM_COLUMNS}


# ---------------------------------------------------------------------------
# Dataset and report files.
# ---------------------------------------------------------------------------

def write_dataset(records: Iterable[NounPairRecord], path) -> int:
    """Write the 17-column TSV; returns the number of records written."""
    n = 0
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("# " + "\t".join(DATASET_COLUMNS) + "\n")
        for rec in records:
            fields = [rec.noun_a, rec.noun_b]
            fields += ["%.6f" % getattr(rec, c) for c in DATASET_COLUMNS[2:10]]
            fields += [str(getattr(rec, c)) for c in DATASET_COLUMNS[10:14]]
            fields += ["%.6f" % getattr(rec, c) for c in DATASET_COLUMNS[14:]]
            fh.write("\t".join(fields) + "\n")
            n += 1
    return n


def read_dataset(path) -> Iterator[NounPairRecord]:
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line or line.startswith("#"):
                continue
            fields = line.split("\t")
            if len(fields) != len(DATASET_COLUMNS):
                raise DataError(
                    f"{path}:{lineno}: expected {len(DATASET_COLUMNS)} columns, "
                    f"got {len(fields)}"
                )
            yield NounPairRecord(
                noun_a=fields[0], noun_b=fields[1],
                cnc_a=float(fields[2]), cnc_b=float(fields[3]),
                frq_a=float(fields[4]), frq_b=float(fields[5]),
                snd_a=float(fields[6]), snd_b=float(fields[7]),
                pnd_a=float(fields[8]), pnd_b=float(fields[9]),
                cluster_cnc=int(fields[10]), cluster_frq=int(fields[11]),
                cluster_snd=int(fields[12]), cluster_pnd=int(fields[13]),
                sim_txt=float(fields[14]), sim_kb=float(fields[15]),
                sim_hyb=float(fields[16]),
            )


def write_report(report: dict[str, list[float]], path) -> None:
    """Bins as rows, the three similarity columns as columns."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("# bin\t" + "\t".join(SIM_COLUMNS) + "\n")
        for i, label in enumerate(REPORT_BINS):
            row = [label] + ["%.6f" % report[col][i] for col in SIM_COLUMNS]
            fh.write("\t".join(row) + "\n")
