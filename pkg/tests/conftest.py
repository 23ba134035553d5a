import pytest

from nounpairs import kb as kbmod


def write_kb_files(tmpdir, synsets, relations, lexicon):
    """Write the three KB TSVs from (id, pos), (src, kind, dst), (lemma, id) rows."""
    paths = {
        "synsets": tmpdir / "synsets.tsv",
        "relations": tmpdir / "relations.tsv",
        "lexicon": tmpdir / "lexicon.tsv",
    }
    paths["synsets"].write_text(
        "".join(f"{s}\t{p}\n" for s, p in synsets), encoding="utf-8"
    )
    paths["relations"].write_text(
        "".join(f"{a}\t{k}\t{b}\n" for a, k, b in relations), encoding="utf-8"
    )
    paths["lexicon"].write_text(
        "".join(f"{l}\t{s}\n" for l, s in lexicon), encoding="utf-8"
    )
    return paths


def load_kb_from_rows(tmpdir, synsets, relations, lexicon):
    p = write_kb_files(tmpdir, synsets, relations, lexicon)
    return kbmod.load_kb(p["synsets"], p["relations"], p["lexicon"])


@pytest.fixture
def chain_kb(tmp_path):
    """entity <- vehicle <- car, every synset lexicalized."""
    return load_kb_from_rows(
        tmp_path,
        [("e-n", "n"), ("v-n", "n"), ("c-n", "n")],
        [
            ("v-n", "hypernym", "e-n"),
            ("e-n", "hyponym", "v-n"),
            ("c-n", "hypernym", "v-n"),
            ("v-n", "hyponym", "c-n"),
        ],
        [("entity", "e-n"), ("vehicle", "v-n"), ("car", "c-n")],
    )
