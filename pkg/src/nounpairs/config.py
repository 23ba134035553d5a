"""Declarative run configuration for the pipeline CLI.

The config file is INI-style (``key = value`` under section headers); any
CLI flag overrides its config key. Relative paths are resolved against the
config file's directory. The master seed feeds every stochastic stage.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ValidationError
from .sgns import TrainConfig
from .walks import WalkConfig


class StageInputMissing(ValidationError):
    pass


@dataclass
class RunConfig:
    base_dir: Path
    language: str = "xx"
    output_dir: Path = Path("out")
    seed: int = 0
    workers: int = 1

    kb_synsets: Path = Path("kb/synsets.tsv")
    kb_relations: Path = Path("kb/relations.tsv")
    kb_lexicon: Path = Path("kb/lexicon.tsv")

    corpus_text: Path = Path("corpus.txt")
    corpus_lowercase: bool = True

    walk_alpha: float = 0.85
    walk_n_walks: int | None = None
    walk_ratio: float | None = 1358.0
    walk_min_tokens: int = 2

    train_txt: dict = field(default_factory=dict)
    train_kb: dict = field(default_factory=dict)

    text_weight: float = 0.5
    kb_weight: float = 0.5

    min_word_length: int = 3
    pnd_pos: str = "all"          # "all" or a single pos tag
    iqr_k: float = 1.5

    max_pairs_per_signature: int | None = None

    eval_gold: Path | None = None

    # -- resolved paths -----------------------------------------------------

    def path(self, p: Path) -> Path:
        p = Path(p)
        return p if p.is_absolute() else self.base_dir / p

    @property
    def out(self) -> Path:
        return self.path(self.output_dir)

    def artifact(self, name: str) -> Path:
        return self.out / name

    def walk_config(self) -> WalkConfig:
        return WalkConfig(
            alpha=self.walk_alpha,
            n_walks=self.walk_n_walks,
            walks_per_lexicalization=(
                None if self.walk_n_walks is not None else self.walk_ratio
            ),
            seed=self.seed,
            min_tokens_per_walk=self.walk_min_tokens,
        )

    def train_config(self, space: str) -> TrainConfig:
        overrides = self.train_txt if space == "txt" else self.train_kb
        base = dict(
            dim=300, window=5, negatives=10, epochs=5,
            min_count=5 if space == "txt" else 1,
            subsample_threshold=1e-4, subwords=True,
            min_ngram=3, max_ngram=6, learning_rate=0.05,
            seed=self.seed, workers=self.workers,
        )
        base.update(overrides)
        return TrainConfig(**base)


_TRAIN_KEYS = {
    "dim": int, "window": int, "negatives": int, "epochs": int,
    "min_count": int, "subsample_threshold": float, "subwords": bool,
    "min_ngram": int, "max_ngram": int, "learning_rate": float,
}


def _get(parser, section, key, conv, default):
    if not parser.has_option(section, key):
        return default
    raw = parser.get(section, key)
    if conv is bool:
        return raw.strip().lower() in ("1", "true", "yes", "on")
    try:
        return conv(raw)
    except ValueError as exc:
        raise ValidationError(f"[{section}] {key} = {raw!r}: {exc}") from None


def load_run_config(path) -> RunConfig:
    path = Path(path)
    if not path.exists():
        raise StageInputMissing(f"config file {path} does not exist")
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    with open(path, encoding="utf-8") as fh:
        parser.read_file(fh)

    cfg = RunConfig(base_dir=path.parent.resolve())
    cfg.language = _get(parser, "run", "language", str, cfg.language)
    cfg.output_dir = Path(_get(parser, "run", "output_dir", str, str(cfg.output_dir)))
    cfg.seed = _get(parser, "run", "seed", int, cfg.seed)
    cfg.workers = _get(parser, "run", "workers", int, cfg.workers)

    cfg.kb_synsets = Path(_get(parser, "kb", "synsets", str, str(cfg.kb_synsets)))
    cfg.kb_relations = Path(_get(parser, "kb", "relations", str, str(cfg.kb_relations)))
    cfg.kb_lexicon = Path(_get(parser, "kb", "lexicon", str, str(cfg.kb_lexicon)))

    cfg.corpus_text = Path(_get(parser, "corpus", "text", str, str(cfg.corpus_text)))
    cfg.corpus_lowercase = _get(parser, "corpus", "lowercase", bool, True)

    cfg.walk_alpha = _get(parser, "walk", "alpha", float, cfg.walk_alpha)
    n_walks = _get(parser, "walk", "n_walks", int, None)
    ratio = _get(parser, "walk", "walks_per_lexicalization", float, None)
    if n_walks is not None:
        cfg.walk_n_walks, cfg.walk_ratio = n_walks, None
    elif ratio is not None:
        cfg.walk_n_walks, cfg.walk_ratio = None, ratio
    cfg.walk_min_tokens = _get(parser, "walk", "min_tokens_per_walk", int,
                               cfg.walk_min_tokens)

    for space in ("txt", "kb"):
        section = f"train.{space}"
        overrides = {}
        if parser.has_section(section):
            for key, conv in _TRAIN_KEYS.items():
                if parser.has_option(section, key):
                    overrides[key] = _get(parser, section, key, conv, None)
        setattr(cfg, f"train_{space}", overrides)

    cfg.text_weight = _get(parser, "align", "text_weight", float, cfg.text_weight)
    cfg.kb_weight = _get(parser, "align", "kb_weight", float, cfg.kb_weight)

    cfg.min_word_length = _get(parser, "features", "min_word_length", int,
                               cfg.min_word_length)
    cfg.pnd_pos = _get(parser, "features", "pnd_pos", str, cfg.pnd_pos)
    cfg.iqr_k = _get(parser, "features", "iqr_k", float, cfg.iqr_k)

    cap = _get(parser, "pairs", "max_pairs_per_signature", int, None)
    cfg.max_pairs_per_signature = cap

    gold = _get(parser, "eval", "gold", str, None)
    cfg.eval_gold = Path(gold) if gold else None
    return cfg
