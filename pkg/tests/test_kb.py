"""KB loading, validation, and graph queries."""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nounpairs import kb as kbmod
from nounpairs.kb import (
    CycleInHypernyms, DuplicateSynset, KBFormatError, MissingEndpoint,
    RelationKind, UnknownSynset, load_kb, save_kb,
)

from conftest import load_kb_from_rows, write_kb_files


class TestLoad:
    def test_three_synset_chain(self, chain_kb):
        assert chain_kb.n_synsets == 3
        hyp_edges = [
            (s, t)
            for s, edges in chain_kb.out_edges.items()
            for k, t in edges
            if k is RelationKind.HYPERNYM
        ]
        assert len(hyp_edges) == 2
        roots = [s for s in chain_kb.pos if chain_kb.hypernym_depth(s) == 0]
        assert roots == ["e-n"]

    def test_missing_endpoint_reports_line(self, tmp_path):
        p = write_kb_files(
            tmp_path,
            [("a-n", "n")],
            [("a-n", "hypernym", "ghost-n")],
            [("word", "a-n")],
        )
        with pytest.raises(MissingEndpoint) as err:
            load_kb(p["synsets"], p["relations"], p["lexicon"])
        assert "relations.tsv:1" in str(err.value)
        assert "ghost-n" in str(err.value)

    def test_duplicate_synset(self, tmp_path):
        p = write_kb_files(tmp_path, [("a-n", "n"), ("a-n", "n")], [], [])
        with pytest.raises(DuplicateSynset):
            load_kb(p["synsets"], p["relations"], p["lexicon"])

    def test_cycle_in_hypernyms(self, tmp_path):
        with pytest.raises(CycleInHypernyms):
            load_kb_from_rows(
                tmp_path,
                [("a-n", "n"), ("b-n", "n")],
                [("a-n", "hypernym", "b-n"), ("b-n", "hypernym", "a-n")],
                [],
            )

    def test_unknown_relation_label_becomes_other_semantic(self, tmp_path, caplog):
        kb = load_kb_from_rows(
            tmp_path,
            [("a-n", "n"), ("b-n", "n")],
            [("a-n", "entails", "b-n")],
            [],
        )
        assert kb.out_edges["a-n"] == [(RelationKind.OTHER_SEMANTIC, "b-n")]

    def test_comments_and_blank_lines_ignored(self, tmp_path):
        (tmp_path / "synsets.tsv").write_text("# header\na-n\tn\n\n", encoding="utf-8")
        (tmp_path / "relations.tsv").write_text("", encoding="utf-8")
        (tmp_path / "lexicon.tsv").write_text("word\ta-n\n", encoding="utf-8")
        kb = load_kb(tmp_path / "synsets.tsv", tmp_path / "relations.tsv",
                     tmp_path / "lexicon.tsv")
        assert kb.n_synsets == 1

    def test_bad_field_count(self, tmp_path):
        (tmp_path / "synsets.tsv").write_text("a-n\tn\textra\n", encoding="utf-8")
        (tmp_path / "relations.tsv").write_text("", encoding="utf-8")
        (tmp_path / "lexicon.tsv").write_text("", encoding="utf-8")
        with pytest.raises(KBFormatError) as err:
            load_kb(tmp_path / "synsets.tsv", tmp_path / "relations.tsv",
                    tmp_path / "lexicon.tsv")
        assert "synsets.tsv:1" in str(err.value)


class TestQueries:
    def test_synsets_of_known_and_unknown(self, chain_kb):
        assert chain_kb.synsets_of("vehicle") == {"v-n"}
        assert chain_kb.synsets_of("nonesuch") == set()

    def test_semantic_neighbors_counts_kinds_separately(self, tmp_path):
        kb = load_kb_from_rows(
            tmp_path,
            [("a-n", "n"), ("b-n", "n")],
            [
                ("a-n", "hypernym", "b-n"),
                ("a-n", "part_meronym", "b-n"),
                ("a-n", "part_meronym", "b-n"),   # duplicate edge collapses
                ("a-n", "lexical", "b-n"),        # lexical-class excluded
            ],
            [],
        )
        assert kb.semantic_neighbors("a-n") == [
            (RelationKind.HYPERNYM, "b-n"),
            (RelationKind.PART_MERONYM, "b-n"),
        ]

    def test_semantic_neighbors_isolated(self, tmp_path):
        kb = load_kb_from_rows(tmp_path, [("a-n", "n")], [], [])
        assert kb.semantic_neighbors("a-n") == []

    def test_vehicle_has_hypernym_and_hyponym(self, chain_kb):
        kinds = {k for k, _ in chain_kb.semantic_neighbors("v-n")}
        assert kinds == {RelationKind.HYPERNYM, RelationKind.HYPONYM}
        assert len(chain_kb.semantic_neighbors("v-n")) == 2

    def test_unknown_synset_raises(self, chain_kb):
        with pytest.raises(UnknownSynset):
            chain_kb.semantic_neighbors("nope-n")
        with pytest.raises(UnknownSynset):
            chain_kb.hypernym_depth("nope-n")


class TestHypernymDepth:
    def test_root_is_zero(self, chain_kb):
        assert chain_kb.hypernym_depth("e-n") == 0

    def test_chain_depths(self, chain_kb):
        assert chain_kb.hypernym_depth("v-n") == 1
        assert chain_kb.hypernym_depth("c-n") == 2

    def test_diamond_takes_longest_path(self, tmp_path):
        # s has two routes to the root: length 2 via a, length 3 via b1-b2.
        # Hand enumeration of all paths gives max length 3.
        kb = load_kb_from_rows(
            tmp_path,
            [("root-n", "n"), ("a-n", "n"), ("b1-n", "n"), ("b2-n", "n"), ("s-n", "n")],
            [
                ("a-n", "hypernym", "root-n"),
                ("b1-n", "hypernym", "root-n"),
                ("b2-n", "hypernym", "b1-n"),
                ("s-n", "hypernym", "a-n"),
                ("s-n", "hypernym", "b2-n"),
            ],
            [],
        )
        assert kb.hypernym_depth("s-n") == 3

    def test_monotone_along_hypernym_edges(self, tmp_path):
        from nounpairs.fixtures import build_toy_kb
        synsets, relations, lexicon, _ = build_toy_kb(3)
        p = write_kb_files(tmp_path, list(synsets.items()), relations, lexicon)
        kb = load_kb(p["synsets"], p["relations"], p["lexicon"])
        for s, edges in kb.out_edges.items():
            for kind, t in edges:
                if kind is RelationKind.HYPERNYM:
                    assert kb.hypernym_depth(s) >= kb.hypernym_depth(t) + 1


class TestSingleWordNouns:
    def test_exclusion_rules(self, tmp_path):
        kb = load_kb_from_rows(
            tmp_path,
            [("a-n", "n"), ("b-n", "n"), ("c-n", "n")],
            [],
            [("car", "a-n"), ("ox", "b-n"), ("sports_car", "c-n")],
        )
        assert kb.single_word_nouns(min_len=3) == ["car"]

    def test_space_counts_as_multiword(self, tmp_path):
        kb = load_kb_from_rows(tmp_path, [("a-n", "n")], [], [("two words", "a-n")])
        assert kb.single_word_nouns() == []

    def test_non_noun_pos_excluded(self, tmp_path):
        kb = load_kb_from_rows(
            tmp_path, [("a-v", "v")], [], [("running", "a-v")]
        )
        assert kb.single_word_nouns() == []
        assert kb.single_word_lemmas(pos=None) == ["running"]

    def test_empty_kb(self, tmp_path):
        kb = load_kb_from_rows(tmp_path, [], [], [])
        assert kb.single_word_nouns() == []


class TestRoundTrip:
    def test_save_load_canonical_identity(self, tmp_path):
        from nounpairs.fixtures import build_toy_kb
        synsets, relations, lexicon, _ = build_toy_kb(11)
        p = write_kb_files(tmp_path, sorted(synsets.items()), relations, lexicon)
        kb = load_kb(p["synsets"], p["relations"], p["lexicon"])

        d1 = tmp_path / "one"
        d2 = tmp_path / "two"
        d1.mkdir(), d2.mkdir()
        save_kb(kb, d1 / "s.tsv", d1 / "r.tsv", d1 / "l.tsv")
        kb2 = load_kb(d1 / "s.tsv", d1 / "r.tsv", d1 / "l.tsv")
        save_kb(kb2, d2 / "s.tsv", d2 / "r.tsv", d2 / "l.tsv")
        for name in ("s.tsv", "r.tsv", "l.tsv"):
            assert (d1 / name).read_bytes() == (d2 / name).read_bytes()


@settings(max_examples=50, deadline=None)
@given(
    links=st.lists(
        st.tuples(st.sampled_from("abcdefgh"), st.integers(0, 7)),
        min_size=1, max_size=25,
    )
)
def test_lemma_index_inverse_property(tmp_path_factory, links):
    """l in synset_lemmas[s] <=> s in lemma_index[l]."""
    tmpdir = tmp_path_factory.mktemp("kb")
    synsets = [(f"s{i}-n", "n") for i in range(8)]
    lexicon = [(lemma * 3, f"s{i}-n") for lemma, i in links]
    kb = load_kb_from_rows(tmpdir, synsets, [], lexicon)
    for lemma, sids in kb.lemma_index.items():
        for sid in sids:
            assert lemma in kb.synset_lemmas[sid]
    for sid, lemmas in kb.synset_lemmas.items():
        for lemma in lemmas:
            assert sid in kb.lemma_index[lemma]


def test_semantic_neighbors_all_semantic_and_present(tmp_path):
    from nounpairs.fixtures import build_toy_kb
    synsets, relations, lexicon, _ = build_toy_kb(5)
    p = write_kb_files(tmp_path, list(synsets.items()), relations, lexicon)
    kb = load_kb(p["synsets"], p["relations"], p["lexicon"])
    for s in kb.pos:
        for kind, t in kb.semantic_neighbors(s):
            assert kind.semantic
            assert t in kb
