"""Pipeline CLI: composable stages driven by one run configuration.

Each stage validates its inputs, writes its artifacts under the configured
output directory, and records a manifest line (inputs digest, seed,
duration, output hashes). ``run-all`` executes the stages in dependency
order, skipping any whose manifest entry is still current.

Exit codes: 0 success, 1 validation error, 2 data error, 3 internal error.
All diagnostics go to stderr; only artifacts land in the output directory.
"""

from __future__ import annotations

import argparse
import logging
import sys
import time
from pathlib import Path

from . import __version__
from .align import build_hybrid, fit_orthogonal_map, save_alignment, seed_dictionary
from .config import RunConfig, StageInputMissing, load_run_config
from .corpus import TokenCounts, load_counts, preprocess, read_lines, save_counts
from .dataset import (
    PairCaps, build_pairs, cluster_feature, read_dataset, similarity_report,
    write_dataset, write_report,
)
from .embeddings import load_text_format, save_text_format
from .errors import DataError, ValidationError
from .evaluate import load_gold, spearman_eval, write_eval_results
from .features import (
    FeatureDictionary, FeatureKind, PndIndex, concreteness,
    load_feature_dictionary, save_feature_dictionary, snd, zipf_frequency,
)
from .fixtures import build_toy_fixture
from .kb import load_kb, save_kb
from .manifest import Manifest, digest_inputs
from .sgns import train
from .walks import generate_pseudo_corpus

log = logging.getLogger("nounpairs")

SPACES = ("txt", "kb", "hyb")
STAGE_ORDER = (
    "import-kb", "walk", "count", "train-txt", "train-kb",
    "align", "features", "cluster", "pairs", "report", "eval",
)


def _kb_paths(cfg: RunConfig, canonical: bool) -> dict[str, Path]:
    if canonical:
        root = cfg.out / "kb"
        return {
            "synsets": root / "synsets.tsv",
            "relations": root / "relations.tsv",
            "lexicon": root / "lexicon.tsv",
        }
    return {
        "synsets": cfg.path(cfg.kb_synsets),
        "relations": cfg.path(cfg.kb_relations),
        "lexicon": cfg.path(cfg.kb_lexicon),
    }


def _load_canonical_kb(cfg: RunConfig):
    p = _kb_paths(cfg, canonical=True)
    return load_kb(p["synsets"], p["relations"], p["lexicon"])


def _feature_path(cfg: RunConfig, kind: FeatureKind, clustered: bool) -> Path:
    suffix = "tsv" if clustered else "raw.tsv"
    return cfg.out / "features" / f"{kind.value.lower()}.{suffix}"


# ---------------------------------------------------------------------------
# Stage bodies. Each returns the list of produced artifacts.
# ---------------------------------------------------------------------------

def _stage_import_kb(cfg: RunConfig) -> list[Path]:
    src = _kb_paths(cfg, canonical=False)
    kb = load_kb(src["synsets"], src["relations"], src["lexicon"])
    dst = _kb_paths(cfg, canonical=True)
    dst["synsets"].parent.mkdir(parents=True, exist_ok=True)
    save_kb(kb, dst["synsets"], dst["relations"], dst["lexicon"])
    log.info("imported KB: %d synsets, %d lemmas", kb.n_synsets, kb.n_lemmas)
    return list(dst.values())


def _stage_walk(cfg: RunConfig) -> list[Path]:
    kb = _load_canonical_kb(cfg)
    out = cfg.artifact("pseudo.txt")
    stats = generate_pseudo_corpus(kb, cfg.walk_config(), out, workers=cfg.workers)
    print(stats.as_json(), file=sys.stderr)
    return [out]


def _stage_count(cfg: RunConfig) -> list[Path]:
    counts_path = cfg.artifact("counts.tsv")
    norm_path = cfg.artifact("corpus.norm.txt")
    total = 0
    vocab_counts: dict[str, int] = {}
    with open(norm_path, "w", encoding="utf-8") as out:
        for tokens in preprocess(read_lines(cfg.path(cfg.corpus_text)),
                                 lowercase=cfg.corpus_lowercase):
            if not tokens:
                continue
            out.write(" ".join(tokens) + "\n")
            for t in tokens:
                vocab_counts[t] = vocab_counts.get(t, 0) + 1
                total += 1
    save_counts(TokenCounts(vocab_counts, total), counts_path)
    log.info("counted %d tokens, %d types", total, len(vocab_counts))
    return [counts_path, norm_path]


def _stage_train(cfg: RunConfig, space: str) -> list[Path]:
    corpus = cfg.artifact("corpus.norm.txt" if space == "txt" else "pseudo.txt")
    trained = train(corpus, cfg.train_config(space))
    out = cfg.artifact(f"{space}.vec")
    save_text_format(trained, out)
    log.info("trained %s space: %d words, dim %d", space, len(trained), trained.dim)
    return [out]


def _stage_align(cfg: RunConfig) -> list[Path]:
    txt = load_text_format(cfg.artifact("txt.vec"))
    kb = load_text_format(cfg.artifact("kb.vec"))
    seeds = seed_dictionary(txt, kb)
    alignment = fit_orthogonal_map(txt, kb, seeds)
    hyb = build_hybrid(txt, kb, alignment,
                       text_weight=cfg.text_weight, kb_weight=cfg.kb_weight)
    vec_out = cfg.artifact("hyb.vec")
    side_out = cfg.artifact("alignment.tsv")
    save_text_format(hyb, vec_out)
    save_alignment(alignment, side_out)
    log.info("aligned on %d seeds, residual %.6f", len(seeds), alignment.residual)
    return [vec_out, side_out]


def _stage_features(cfg: RunConfig) -> list[Path]:
    kb = _load_canonical_kb(cfg)
    counts = load_counts(cfg.artifact("counts.tsv"))
    nouns = kb.single_word_nouns(cfg.min_word_length)
    pnd_pos = None if cfg.pnd_pos == "all" else cfg.pnd_pos
    lexicon = kb.single_word_lemmas(cfg.min_word_length, pos=pnd_pos)
    index = PndIndex(lexicon)
    in_lexicon = set(lexicon)

    dicts = {
        FeatureKind.CNC: {n: concreteness(kb, n) for n in nouns},
        FeatureKind.SND: {n: snd(kb, n) for n in nouns},
        FeatureKind.PND: {
            n: float(index.count(n)) for n in nouns if n in in_lexicon
        },
        FeatureKind.FRQ: {
            n: zipf_frequency(counts, n)
            for n in nouns
            if counts.counts.get(n, 0) > 0
        },
    }
    outputs = []
    (cfg.out / "features").mkdir(parents=True, exist_ok=True)
    for kind, values in dicts.items():
        path = _feature_path(cfg, kind, clustered=False)
        save_feature_dictionary(FeatureDictionary(kind, raw=values), path)
        log.info("%s: %d nouns", kind.value, len(values))
        outputs.append(path)
    return outputs


def _stage_cluster(cfg: RunConfig) -> list[Path]:
    outputs = []
    for kind in FeatureKind:
        fd = load_feature_dictionary(_feature_path(cfg, kind, clustered=False))
        clustered = cluster_feature(fd, iqr_k=cfg.iqr_k)
        path = _feature_path(cfg, kind, clustered=True)
        save_feature_dictionary(clustered, path)
        outputs.append(path)
    return outputs


def _stage_pairs(cfg: RunConfig) -> list[Path]:
    dicts = {
        kind: load_feature_dictionary(_feature_path(cfg, kind, clustered=True))
        for kind in FeatureKind
    }
    spaces = {s: load_text_format(cfg.artifact(f"{s}.vec")) for s in SPACES}
    caps = PairCaps(max_pairs_per_signature=cfg.max_pairs_per_signature,
                    seed=cfg.seed)
    out = cfg.artifact("dataset.tsv")
    n = write_dataset(build_pairs(dicts, spaces, caps), out)
    log.info("wrote %d noun pairs", n)
    return [out]


def _stage_report(cfg: RunConfig) -> list[Path]:
    report = similarity_report(read_dataset(cfg.artifact("dataset.tsv")))
    out = cfg.artifact("report.tsv")
    write_report(report, out)
    return [out]


def _stage_eval(cfg: RunConfig) -> list[Path]:
    gold = load_gold(cfg.path(cfg.eval_gold))
    rows = []
    for space_name in SPACES:
        space = load_text_format(cfg.artifact(f"{space_name}.vec"))
        result = spearman_eval(space, gold)
        for w1, w2 in result.skipped:
            log.info("eval skip (%s): %s / %s out of vocabulary", space_name, w1, w2)
        rows.append((cfg.eval_gold.name, space_name, result))
        log.info("%s rho=%.4f coverage=%.2f", space_name, result.rho, result.coverage)
    out = cfg.artifact("eval.tsv")
    write_eval_results(rows, out)
    return [out]


# ---------------------------------------------------------------------------
# Stage registry: inputs, digest parameters, and body per stage.
# ---------------------------------------------------------------------------

def _stage_spec(cfg: RunConfig, name: str):
    kb_in = _kb_paths(cfg, canonical=False)
    kb_can = _kb_paths(cfg, canonical=True)
    feats_raw = {k.value: _feature_path(cfg, k, False) for k in FeatureKind}
    feats_clu = {k.value: _feature_path(cfg, k, True) for k in FeatureKind}
    vecs = {s: cfg.artifact(f"{s}.vec") for s in SPACES}

    if name == "import-kb":
        return kb_in, {}, lambda: _stage_import_kb(cfg)
    if name == "walk":
        wc = cfg.walk_config()  # validates alpha and the walk-count choice
        params = dict(alpha=wc.alpha, n_walks=wc.n_walks,
                      ratio=wc.walks_per_lexicalization,
                      min_tokens=wc.min_tokens_per_walk, seed=wc.seed)
        return dict(kb_can), params, lambda: _stage_walk(cfg)
    if name == "count":
        return ({"corpus": cfg.path(cfg.corpus_text)},
                dict(lowercase=cfg.corpus_lowercase), lambda: _stage_count(cfg))
    if name in ("train-txt", "train-kb"):
        space = name.split("-")[1]
        source = cfg.artifact("corpus.norm.txt" if space == "txt" else "pseudo.txt")
        params = dict(vars(cfg.train_config(space)))
        return {"corpus": source}, params, lambda: _stage_train(cfg, space)
    if name == "align":
        params = dict(text_weight=cfg.text_weight, kb_weight=cfg.kb_weight)
        return ({"txt": vecs["txt"], "kb": vecs["kb"]}, params,
                lambda: _stage_align(cfg))
    if name == "features":
        inputs = dict(kb_can)
        inputs["counts"] = cfg.artifact("counts.tsv")
        params = dict(min_word_length=cfg.min_word_length, pnd_pos=cfg.pnd_pos)
        return inputs, params, lambda: _stage_features(cfg)
    if name == "cluster":
        return dict(feats_raw), dict(iqr_k=cfg.iqr_k), lambda: _stage_cluster(cfg)
    if name == "pairs":
        inputs = dict(feats_clu)
        inputs.update(vecs)
        params = dict(cap=cfg.max_pairs_per_signature, seed=cfg.seed)
        return inputs, params, lambda: _stage_pairs(cfg)
    if name == "report":
        return {"dataset": cfg.artifact("dataset.tsv")}, {}, lambda: _stage_report(cfg)
    if name == "eval":
        if cfg.eval_gold is None:
            return None  # stage not configured
        inputs = dict(vecs)
        inputs["gold"] = cfg.path(cfg.eval_gold)
        return inputs, {}, lambda: _stage_eval(cfg)
    raise ValidationError(f"unknown stage {name!r}")


def run_stage(cfg: RunConfig, name: str, force: bool = False) -> bool:
    """Run one stage unless its manifest entry is current. Returns True if ran."""
    spec = _stage_spec(cfg, name)
    if spec is None:
        log.info("stage %s not configured; skipping", name)
        return False
    inputs, params, body = spec
    missing = [str(p) for p in inputs.values() if not Path(p).exists()]
    if missing:
        raise StageInputMissing(
            f"stage {name!r} is missing inputs: {', '.join(missing)}"
        )
    cfg.out.mkdir(parents=True, exist_ok=True)
    manifest = Manifest(cfg.out / "manifest.tsv")
    digest = digest_inputs(inputs, params)
    if not force and manifest.is_current(name, digest, cfg.out):
        log.info("stage %s is up to date; skipping", name)
        return False
    started = time.perf_counter()
    outputs = body()
    duration = time.perf_counter() - started
    manifest.record(name, digest, cfg.seed, duration, outputs, cfg.out)
    log.info("stage %s done in %.2fs", name, duration)
    return True


# ---------------------------------------------------------------------------
# Argument parsing and entry point.
# ---------------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage errors are validation errors (exit 1)
        self.print_usage(sys.stderr)
        raise ValidationError(message)


def _add_common(sub):
    sub.add_argument("-C", "--config", required=True, help="run configuration file")
    sub.add_argument("--force", action="store_true",
                     help="run even if the manifest says the stage is current")
    sub.add_argument("--seed", type=int, help="override the master seed")
    sub.add_argument("--workers", type=int, help="override worker count")
    sub.add_argument("--output-dir", help="override the output directory")


def _apply_overrides(cfg: RunConfig, args) -> RunConfig:
    if args.seed is not None:
        cfg.seed = args.seed
    if args.workers is not None:
        cfg.workers = args.workers
    if args.output_dir is not None:
        cfg.output_dir = Path(args.output_dir)
    if getattr(args, "alpha", None) is not None:
        cfg.walk_alpha = args.alpha
    if getattr(args, "n_walks", None) is not None:
        cfg.walk_n_walks = args.n_walks
        cfg.walk_ratio = None
    if getattr(args, "max_pairs", None) is not None:
        cfg.max_pairs_per_signature = args.max_pairs
    return cfg


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="nounpairs",
                     description="noun-pair similarity dataset pipeline")
    parser.add_argument("--version", action="version", version=__version__)
    subs = parser.add_subparsers(dest="command", required=True)

    for name in STAGE_ORDER + ("run-all",):
        sub = subs.add_parser(name)
        _add_common(sub)
        if name == "walk":
            sub.add_argument("--alpha", type=float, help="damping factor in [0, 1)")
            sub.add_argument("--n-walks", type=int, dest="n_walks")
        if name == "pairs":
            sub.add_argument("--max-pairs", type=int, dest="max_pairs",
                             help="per-signature pair cap")

    fixture = subs.add_parser("make-fixture",
                              help="write the deterministic toy fixture")
    fixture.add_argument("directory")
    fixture.add_argument("--seed", type=int, default=7)
    fixture.add_argument("--tokens", type=int, default=1_000_000)
    fixture.add_argument("--workers", type=int, default=1)
    return parser


def main(argv=None) -> int:
    logging.basicConfig(
        stream=sys.stderr, level=logging.INFO, format="%(levelname)s %(message)s"
    )
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "make-fixture":
            config_path = build_toy_fixture(
                args.directory, seed=args.seed, n_tokens=args.tokens,
                workers=args.workers,
            )
            print(config_path)
            return 0
        cfg = _apply_overrides(load_run_config(args.config), args)
        if args.command == "run-all":
            for name in STAGE_ORDER:
                run_stage(cfg, name, force=args.force)
        else:
            run_stage(cfg, args.command, force=args.force)
        return 0
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 2
    except SystemExit:
        raise
    except Exception as exc:  # internal
        log.exception("internal error: %s", exc)
        return 3


if __name__ == "__main__":
    sys.exit(main())
