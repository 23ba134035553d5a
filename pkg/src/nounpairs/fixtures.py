"""Deterministic fixtures: a toy end-to-end dataset and a WordNet 3.0 extract.

``build_toy_fixture`` writes a ~100-synset KB, a 1M-token synthetic topic
corpus, a small gold similarity file, and a ready-to-run pipeline config
into a directory. Everything is derived from one seed, so two invocations
produce byte-identical files and the pipeline outputs have stable checksums.

``write_wn30_car_extract`` encodes the neighborhood of WordNet 3.0's primary
"car" synset (02958343-n): its 5 synsets for the lemma "car", its 31
hyponyms, 29 part meronyms and 1 hypernym, and the 10-edge hypernym chain
car -> motor_vehicle -> ... -> entity. Chain and car-synset offsets are the
real WordNet 3.0 identifiers; neighbor synsets whose offsets are not
reproduced here carry synthesized ids (prefix "x"), which load fine since
ids are opaque. The extract is a subgraph: only the listed edges exist.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

VOWELS = "aeiou"
CONSONANTS = "bdfgklmnprstvz"

# --- WordNet 3.0 "car" neighborhood ---------------------------------------

WN30_CAR_PRIMARY = "02958343-n"

# All five synsets of the lemma "car" in WordNet 3.0.
WN30_CAR_SYNSETS = {
    "02958343-n": ["car", "auto", "automobile", "machine", "motorcar"],
    "02959942-n": ["car", "railcar", "railway_car", "railroad_car"],
    "02960501-n": ["car", "cable_car"],
    "03079136-n": ["car", "gondola"],
    "03100490-n": ["car", "elevator_car"],
}

# Hypernym chain of the primary synset, 10 edges up to entity.
WN30_CAR_CHAIN = [
    ("02958343-n", "car"),
    ("03791235-n", "motor_vehicle"),
    ("04170037-n", "self-propelled_vehicle"),
    ("04576211-n", "wheeled_vehicle"),
    ("03094503-n", "container"),
    ("03575240-n", "instrumentality"),
    ("00021939-n", "artifact"),
    ("00003553-n", "whole"),
    ("00002684-n", "object"),
    ("00001930-n", "physical_entity"),
    ("00001740-n", "entity"),
]

WN30_CAR_HYPONYMS = [
    "ambulance", "beach_wagon", "bus", "cab", "compact", "convertible",
    "coupe", "cruiser", "electric", "gas_guzzler", "hardtop", "hatchback",
    "horseless_carriage", "hot_rod", "jeep", "limousine", "loaner",
    "minicar", "minivan", "model_t", "pace_car", "racer", "roadster",
    "sedan", "sports_car", "sport_utility", "stanley_steamer", "stock_car",
    "subcompact", "touring_car", "used-car",
]

WN30_CAR_PART_MERONYMS = [
    "accelerator", "air_bag", "auto_accessory", "automobile_engine",
    "automobile_horn", "buffer", "bumper", "car_door", "car_mirror",
    "car_seat", "car_window", "fender", "first_gear", "floorboard",
    "gasoline_engine", "glove_compartment", "grille", "high_gear", "hood",
    "luggage_compartment", "rear_window", "reverse", "roof",
    "running_board", "stabilizer_bar", "sunroof", "tail_fin", "third_gear",
    "window",
]


def write_wn30_car_extract(outdir) -> dict[str, Path]:
    """Write the car-neighborhood extract as the three KB TSV files."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)

    synsets: dict[str, str] = {}
    relations: list[tuple[str, str, str]] = []
    lexicon: list[tuple[str, str]] = []

    for sid, lemmas in WN30_CAR_SYNSETS.items():
        synsets[sid] = "n"
        for lemma in lemmas:
            lexicon.append((lemma, sid))

    chain_ids = [sid for sid, _ in WN30_CAR_CHAIN]
    for (sid, lemma) in WN30_CAR_CHAIN:
        synsets[sid] = "n"
        if sid != WN30_CAR_PRIMARY:
            lexicon.append((lemma, sid))
    for lower, upper in zip(chain_ids, chain_ids[1:]):
        relations.append((lower, "hypernym", upper))
        relations.append((upper, "hyponym", lower))

    for lemma in WN30_CAR_HYPONYMS:
        sid = f"x-{lemma}-n"
        synsets[sid] = "n"
        lexicon.append((lemma, sid))
        relations.append((WN30_CAR_PRIMARY, "hyponym", sid))
        relations.append((sid, "hypernym", WN30_CAR_PRIMARY))
    for lemma in WN30_CAR_PART_MERONYMS:
        sid = f"x-{lemma}-n"
        synsets[sid] = "n"
        lexicon.append((lemma, sid))
        relations.append((WN30_CAR_PRIMARY, "part_meronym", sid))
        relations.append((sid, "part_holonym", WN30_CAR_PRIMARY))

    paths = {
        "synsets": outdir / "synsets.tsv",
        "relations": outdir / "relations.tsv",
        "lexicon": outdir / "lexicon.tsv",
    }
    with open(paths["synsets"], "w", encoding="utf-8") as fh:
        for sid in sorted(synsets):
            fh.write(f"{sid}\t{synsets[sid]}\n")
    with open(paths["relations"], "w", encoding="utf-8") as fh:
        for row in sorted(set(relations)):
            fh.write("\t".join(row) + "\n")
    with open(paths["lexicon"], "w", encoding="utf-8") as fh:
        for lemma, sid in sorted(set(lexicon)):
            fh.write(f"{lemma}\t{sid}\n")
    return paths


# --- Toy end-to-end fixture ------------------------------------------------

def _make_word(rng) -> str:
    n_syll = 2 + int(rng.integers(0, 2))
    parts = []
    for _ in range(n_syll):
        parts.append(CONSONANTS[rng.integers(len(CONSONANTS))])
        parts.append(VOWELS[rng.integers(len(VOWELS))])
    if rng.random() < 0.4:
        parts.append(CONSONANTS[rng.integers(len(CONSONANTS))])
    return "".join(parts)


def _mutate_word(word: str, rng) -> str:
    pos = int(rng.integers(len(word)))
    alphabet = VOWELS if word[pos] in VOWELS else CONSONANTS
    repl = alphabet[rng.integers(len(alphabet))]
    return word[:pos] + repl + word[pos + 1 :]


def _fresh_words(rng, n: int, taken: set[str]) -> list[str]:
    out = []
    while len(out) < n:
        w = _make_word(rng)
        if len(w) >= 3 and w not in taken:
            taken.add(w)
            out.append(w)
    return out


def build_toy_kb(seed: int = 7, n_domains: int = 2, mids_per_domain: int = 4,
                 leaves_per_mid: int = 8):
    """Synthetic two-domain noun taxonomy with extra semantic edges.

    Returns (synsets, relations, lexicon, structure) where structure maps
    mid synset ids to their topic lemma lists (used by the corpus generator).
    Leaf depths vary (some leaves grow children and grandchildren) so the
    concreteness distribution has a real spread, and about a third of the
    lemmas are 1-edit variants of earlier ones so PND has a nonzero cluster.
    Every synset has at least one lemma and one neighbor, which the walker
    tests rely on.
    """
    rng = np.random.default_rng(np.random.SeedSequence([seed, 0]))
    taken: set[str] = set()

    synsets: dict[str, str] = {}
    relations: list[tuple[str, str, str]] = []
    lexicon: list[tuple[str, str]] = []
    structure: dict[str, list[str]] = {}

    def add_synset(sid: str, lemmas: list[str]):
        synsets[sid] = "n"
        for lemma in lemmas:
            lexicon.append((lemma, sid))

    def link(child: str, parent: str):
        relations.append((child, "hypernym", parent))
        relations.append((parent, "hyponym", child))

    def topic_word(topic_lemmas: list[str]) -> list[str]:
        # 1-edit variants of an earlier topic lemma build PND families.
        if topic_lemmas and rng.random() < 0.4:
            for _ in range(8):
                w = _mutate_word(
                    topic_lemmas[int(rng.integers(len(topic_lemmas)))], rng
                )
                if w not in taken and len(w) >= 3:
                    taken.add(w)
                    return [w]
        return _fresh_words(rng, 1, taken)

    root = "t-root-n"
    add_synset(root, _fresh_words(rng, 1, taken))

    leaf_ids: list[str] = []
    for d in range(n_domains):
        dom = f"t-d{d}-n"
        add_synset(dom, _fresh_words(rng, 2, taken))
        link(dom, root)
        for m in range(mids_per_domain):
            mid = f"t-d{d}m{m}-n"
            add_synset(mid, _fresh_words(rng, 2, taken))
            link(mid, dom)
            topic_lemmas: list[str] = []
            for leaf in range(leaves_per_mid):
                sid = f"t-d{d}m{m}l{leaf:02d}-n"
                lemmas = topic_word(topic_lemmas)
                add_synset(sid, lemmas)
                link(sid, mid)
                leaf_ids.append(sid)
                topic_lemmas.extend(lemmas)
                # Deepen some branches: child at depth 4, sometimes a
                # grandchild at depth 5.
                if rng.random() < 0.3:
                    child = sid[:-2] + "c-n"
                    lemmas = topic_word(topic_lemmas)
                    add_synset(child, lemmas)
                    link(child, sid)
                    leaf_ids.append(child)
                    topic_lemmas.extend(lemmas)
                    if rng.random() < 0.35:
                        grand = sid[:-2] + "g-n"
                        lemmas = topic_word(topic_lemmas)
                        add_synset(grand, lemmas)
                        link(grand, child)
                        leaf_ids.append(grand)
                        topic_lemmas.extend(lemmas)
            structure[mid] = topic_lemmas

    # Sprinkle meronymy within domains and a few gloss links across.
    for _ in range(len(leaf_ids) // 2):
        a, b = rng.choice(len(leaf_ids), size=2, replace=False)
        if leaf_ids[a][:4] == leaf_ids[b][:4]:  # same domain prefix t-dX
            relations.append((leaf_ids[a], "part_meronym", leaf_ids[b]))
            relations.append((leaf_ids[b], "part_holonym", leaf_ids[a]))
    for _ in range(6):
        a, b = rng.choice(len(leaf_ids), size=2, replace=False)
        relations.append((leaf_ids[a], "gloss", leaf_ids[b]))

    return synsets, sorted(set(relations)), sorted(set(lexicon)), structure


def _write_kb(outdir: Path, synsets, relations, lexicon) -> None:
    with open(outdir / "synsets.tsv", "w", encoding="utf-8") as fh:
        for sid in sorted(synsets):
            fh.write(f"{sid}\t{synsets[sid]}\n")
    with open(outdir / "relations.tsv", "w", encoding="utf-8") as fh:
        for row in relations:
            fh.write("\t".join(row) + "\n")
    with open(outdir / "lexicon.tsv", "w", encoding="utf-8") as fh:
        for lemma, sid in lexicon:
            fh.write(f"{lemma}\t{sid}\n")


def write_toy_corpus(path, structure: dict[str, list[str]], lexicon,
                     n_tokens: int = 1_000_000, seed: int = 7) -> int:
    """Topic-structured synthetic corpus: each line draws most of its tokens
    from one mid-level topic's leaf lemmas, the rest from domain vocabulary
    and a Zipfian filler vocabulary. Returns the exact token count."""
    rng = np.random.default_rng(np.random.SeedSequence([seed, 1]))
    taken = {lemma for lemma, _ in lexicon}
    filler = _fresh_words(rng, 250, taken)
    filler_w = 1.0 / np.arange(1, len(filler) + 1)  # Zipfian ranks
    filler_w /= filler_w.sum()

    topics = sorted(structure)
    domain_of = {}
    for mid in topics:
        domain_of[mid] = mid[:4]
    domain_words: dict[str, list[str]] = {}
    for mid in topics:
        domain_words.setdefault(domain_of[mid], []).extend(structure[mid])

    written = 0
    with open(path, "w", encoding="utf-8") as fh:
        while written < n_tokens:
            mid = topics[int(rng.integers(len(topics)))]
            topic_words = structure[mid]
            dom_words = domain_words[domain_of[mid]]
            length = min(3 + int(rng.poisson(9)), n_tokens - written)
            if length == 0:
                length = 1
            line = []
            rolls = rng.random(length)
            for r in rolls:
                if r < 0.55:
                    line.append(topic_words[int(rng.integers(len(topic_words)))])
                elif r < 0.7:
                    line.append(dom_words[int(rng.integers(len(dom_words)))])
                else:
                    line.append(filler[int(rng.choice(len(filler), p=filler_w))])
            fh.write(" ".join(line) + "\n")
            written += length
    return written


def write_toy_gold(path, structure: dict[str, list[str]], seed: int = 7,
                   n_pairs: int = 60) -> int:
    """Synthetic gold judgments: same topic ~ high, same domain ~ mid,
    cross domain ~ low, plus seeded noise."""
    rng = np.random.default_rng(np.random.SeedSequence([seed, 2]))
    topics = sorted(structure)
    rows = []
    seen = set()
    while len(rows) < n_pairs:
        t1 = topics[int(rng.integers(len(topics)))]
        t2 = topics[int(rng.integers(len(topics)))]
        w1 = structure[t1][int(rng.integers(len(structure[t1])))]
        w2 = structure[t2][int(rng.integers(len(structure[t2])))]
        if w1 == w2 or frozenset((w1, w2)) in seen:
            continue
        seen.add(frozenset((w1, w2)))
        if t1 == t2:
            base = 3.2
        elif t1[:4] == t2[:4]:
            base = 2.0
        else:
            base = 0.8
        score = base + rng.normal(0, 0.35)
        rows.append((w1, w2, score))
    rows.sort()
    with open(path, "w", encoding="utf-8") as fh:
        for w1, w2, score in rows:
            fh.write(f"{w1}\t{w2}\t{score:.3f}\n")
    return len(rows)


TOY_CONFIG_TEMPLATE = """\
[run]
language = toy
output_dir = {outdir}
seed = {seed}
workers = {workers}

[kb]
synsets = kb/synsets.tsv
relations = kb/relations.tsv
lexicon = kb/lexicon.tsv

[corpus]
text = corpus.txt
lowercase = true

[walk]
alpha = 0.85
walks_per_lexicalization = 250
min_tokens_per_walk = 2

[train.txt]
dim = 48
window = 5
negatives = 5
epochs = 2
min_count = 5
subwords = true

[train.kb]
dim = 48
window = 5
negatives = 5
epochs = 3
min_count = 1
subwords = true

[align]
text_weight = 0.5
kb_weight = 0.5

[features]
min_word_length = 3
pnd_pos = all

[pairs]
max_pairs_per_signature = 1500

[eval]
gold = gold.tsv
"""


def build_toy_fixture(basedir, seed: int = 7, n_tokens: int = 1_000_000,
                      workers: int = 1) -> Path:
    """Write the complete toy fixture; returns the config file path."""
    basedir = Path(basedir)
    (basedir / "kb").mkdir(parents=True, exist_ok=True)
    synsets, relations, lexicon, structure = build_toy_kb(seed)
    _write_kb(basedir / "kb", synsets, relations, lexicon)
    write_toy_corpus(basedir / "corpus.txt", structure, lexicon,
                     n_tokens=n_tokens, seed=seed)
    write_toy_gold(basedir / "gold.tsv", structure, seed=seed)
    config_path = basedir / "nounpairs.ini"
    config_path.write_text(
        TOY_CONFIG_TEMPLATE.format(outdir="out", seed=seed, workers=workers),
        encoding="utf-8",
    )
    return config_path
