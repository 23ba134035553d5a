"""Gold-set loading and the Spearman harness against the scipy oracle."""

import numpy as np
import pytest
import scipy.stats

from nounpairs.embeddings import EmbeddingSpace
from nounpairs.evaluate import (
    DuplicatePair, GoldDataset, InsufficientCoverage, MalformedLine,
    average_ranks, load_gold, spearman_eval, spearman_rho, write_eval_results,
)


class TestLoadGold:
    def test_three_lines(self, tmp_path):
        p = tmp_path / "gold.tsv"
        p.write_text("cat\tdog\t7.5\ncat\tmoon\t1.0\nsun\tmoon\t4.25\n")
        gold = load_gold(p)
        assert len(gold) == 3
        assert gold.entries[0] == ("cat", "dog", 7.5)

    def test_duplicate_pair_order_insensitive(self, tmp_path):
        p = tmp_path / "gold.tsv"
        p.write_text("cat\tdog\t7.5\ndog\tcat\t3.0\n")
        with pytest.raises(DuplicatePair):
            load_gold(p)

    def test_malformed_line(self, tmp_path):
        p = tmp_path / "gold.tsv"
        p.write_text("cat dog 7.5\n")
        with pytest.raises(MalformedLine):
            load_gold(p)

    def test_bad_score(self, tmp_path):
        p = tmp_path / "gold.tsv"
        p.write_text("cat\tdog\thigh\n")
        with pytest.raises(MalformedLine):
            load_gold(p)

    def test_sixty_five_pairs(self, tmp_path):
        lines = [f"w{i}\tv{i}\t{i * 0.1:.2f}" for i in range(65)]
        p = tmp_path / "rg.tsv"
        p.write_text("\n".join(lines) + "\n")
        assert len(load_gold(p)) == 65


class TestSpearmanRho:
    def test_perfectly_monotone(self):
        x = np.array([0.1, 0.4, 0.5, 0.9])
        y = np.array([1.0, 2.0, 30.0, 31.0])
        assert spearman_rho(x, y) == pytest.approx(1.0)

    def test_perfectly_reversed(self):
        x = np.array([0.1, 0.4, 0.5, 0.9])
        y = np.array([31.0, 30.0, 2.0, 1.0])
        assert spearman_rho(x, y) == pytest.approx(-1.0)

    def test_matches_scipy_on_random_instances_with_ties(self):
        rng = np.random.default_rng(17)
        for _ in range(200):
            n = int(rng.integers(3, 40))
            # Coarse grids force ties in both variables.
            x = rng.integers(0, 6, size=n).astype(float)
            y = rng.integers(0, 6, size=n).astype(float)
            if len(set(x)) < 2 or len(set(y)) < 2:
                continue
            expected = scipy.stats.spearmanr(x, y).statistic
            assert spearman_rho(x, y) == pytest.approx(expected, abs=1e-10)

    def test_invariant_under_monotone_transform(self):
        rng = np.random.default_rng(3)
        x = rng.normal(size=30)
        y = rng.normal(size=30)
        base = spearman_rho(x, y)
        assert spearman_rho(np.exp(x), y) == pytest.approx(base, abs=1e-12)
        assert spearman_rho(x, 3 * y + 7) == pytest.approx(base, abs=1e-12)

    def test_invariant_under_permutation(self):
        rng = np.random.default_rng(4)
        x = rng.integers(0, 4, size=25).astype(float)
        y = rng.normal(size=25)
        base = spearman_rho(x, y)
        perm = rng.permutation(25)
        assert spearman_rho(x[perm], y[perm]) == pytest.approx(base, abs=1e-12)

    def test_average_ranks_with_ties(self):
        ranks = average_ranks(np.array([10.0, 20.0, 20.0, 30.0]))
        assert ranks.tolist() == [1.0, 2.5, 2.5, 4.0]


class TestSpearmanEval:
    def _space(self):
        vectors = {
            "sun": [1.0, 0.0], "star": [0.9, 0.1],
            "car": [0.0, 1.0], "bus": [0.3, 0.7],
        }
        words = sorted(vectors)
        return EmbeddingSpace(words, np.array([vectors[w] for w in words]))

    def test_skips_oov_and_reports_coverage(self):
        gold = GoldDataset([
            ("sun", "star", 9.0), ("car", "bus", 8.0), ("sun", "car", 2.0),
            ("sun", "ghost", 5.0),
        ])
        result = spearman_eval(self._space(), gold)
        assert result.evaluated == 3
        assert result.coverage == pytest.approx(3 / 4)
        assert result.skipped == [("sun", "ghost")]

    def test_full_coverage_no_skips(self):
        gold = GoldDataset([("sun", "star", 9.0), ("car", "bus", 8.0),
                            ("sun", "car", 1.0)])
        result = spearman_eval(self._space(), gold)
        assert result.coverage == 1.0
        assert result.skipped == []
        assert result.rho == pytest.approx(1.0)

    def test_insufficient_coverage(self):
        gold = GoldDataset([("ghost", "wraith", 5.0), ("sun", "star", 9.0)])
        with pytest.raises(InsufficientCoverage):
            spearman_eval(self._space(), gold)

    def test_results_file(self, tmp_path):
        gold = GoldDataset([("sun", "star", 9.0), ("car", "bus", 8.0),
                            ("sun", "car", 1.0)])
        result = spearman_eval(self._space(), gold)
        out = tmp_path / "eval.tsv"
        write_eval_results([("gold.tsv", "txt", result)], out)
        lines = out.read_text().splitlines()
        assert lines[1].split("\t")[:2] == ["gold.tsv", "txt"]
