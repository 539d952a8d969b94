from collections import Counter

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from footfall.patterns import (
    CorpusConfig,
    GroundTruthGraph,
    expected_pattern_length,
    generate_corpus,
    generate_ground_truth,
    generate_pattern,
    split_pattern,
    train_test_split,
    visitors_for_total_visits,
)


class TestGroundTruth:
    def test_two_activities_forced(self):
        for seed in range(5):
            g = generate_ground_truth(2, seed)
            np.testing.assert_array_equal(g.edge_weights, [[0, 1], [1, 0]])

    def test_deterministic(self):
        a = generate_ground_truth(6, 42)
        b = generate_ground_truth(6, 42)
        assert a.edge_weights.tobytes() == b.edge_weights.tobytes()

    def test_large_graph_rows(self):
        g = generate_ground_truth(100, 7)
        np.testing.assert_allclose(g.edge_weights.sum(axis=1), 1.0, atol=1e-12)
        assert ((g.edge_weights > 0).sum(axis=1) <= 3).all()
        assert (np.diag(g.edge_weights) == 0).all()

    def test_rejects_tiny(self):
        with pytest.raises(ValueError):
            generate_ground_truth(1, 0)


def chain_graph(n):
    w = np.zeros((n, n))
    for i in range(n):
        w[i, (i + 1) % n] = 1.0
    return GroundTruthGraph(n, w)


class TestGeneratePattern:
    def test_single_visit(self):
        g = generate_ground_truth(6, 0)
        assert generate_pattern(g, 3, 1, 0.0, np.random.default_rng(0)) == [3]

    def test_chain_walk(self):
        p = generate_pattern(chain_graph(5), 0, 5, 0.0, np.random.default_rng(0))
        assert p == [0, 1, 2, 3, 4]

    def test_noise_length(self):
        g = generate_ground_truth(10, 1)
        p = generate_pattern(g, 0, 10, 0.3, np.random.default_rng(5))
        assert len(p) == 13

    def test_walk_follows_graph_edges(self):
        g = generate_ground_truth(12, 3)
        p = generate_pattern(g, 4, 50, 0.0, np.random.default_rng(9))
        assert p[0] == 4
        for a, b in zip(p, p[1:]):
            assert g.edge_weights[a, b] > 0

    def test_bad_start(self):
        with pytest.raises(ValueError):
            generate_pattern(chain_graph(3), 3, 2, 0.0, np.random.default_rng(0))

    @settings(max_examples=60, deadline=None)
    @given(length=st.integers(1, 40), noise=st.sampled_from([0.0, 0.1, 0.25, 0.3, 0.5, 0.7, 1.0]),
           seed=st.integers(0, 10_000))
    def test_noise_count_property(self, length, noise, seed):
        g = generate_ground_truth(7, seed)
        p = generate_pattern(g, seed % 7, length, noise, np.random.default_rng(seed))
        # the hand-computed floor of noise * length for these decimal noise levels
        extra = {0.0: 0, 0.1: length // 10, 0.25: length // 4, 0.3: (3 * length) // 10,
                 0.5: length // 2, 0.7: (7 * length) // 10, 1.0: length}[noise]
        assert len(p) == length + extra
        assert all(0 <= a < 7 for a in p)


class TestCorpus:
    def test_round_robin_starts(self):
        c = generate_corpus(CorpusConfig(n_activities=6, n_visitors=6, noise_factor=0.0, seed=3))
        assert sorted(p[0] for p in c.patterns) == list(range(6))

    def test_round_robin_multiple(self):
        c = generate_corpus(CorpusConfig(n_activities=5, n_visitors=40, noise_factor=0.0, seed=3))
        assert Counter(p[0] for p in c.patterns) == {a: 8 for a in range(5)}

    def test_deterministic_20000(self):
        cfg = CorpusConfig(n_activities=30, n_visitors=20000, seed=11)
        assert generate_corpus(cfg).patterns == generate_corpus(cfg).patterns

    def test_thread_count_does_not_matter(self):
        cfg = CorpusConfig(n_activities=12, n_visitors=500, seed=2)
        base = generate_corpus(cfg, threads=1).patterns
        for t in (2, 3, 8):
            assert generate_corpus(cfg, threads=t).patterns == base

    def test_lengths_and_ids(self):
        cfg = CorpusConfig(n_activities=9, n_visitors=300, walk_length_min=3, walk_length_max=6,
                           noise_factor=0.5, seed=4)
        c = generate_corpus(cfg)
        assert len(c) == 300
        for p in c.patterns:
            assert len(p) in {L + L // 2 for L in range(3, 7)}
            assert all(0 <= a < 9 for a in p)

    def test_event_scale_total_visits(self):
        n_visitors = visitors_for_total_visits(470_000, 4, 12, 0.1)
        cfg = CorpusConfig(n_activities=100, n_visitors=n_visitors, noise_factor=0.1, seed=0)
        total = generate_corpus(cfg).total_visits
        assert abs(total - 470_000) <= 0.01 * 470_000

    def test_expected_length(self):
        # lengths 4..12 without noise average to 8; with 10% noise lengths 10..12 gain one visit
        assert expected_pattern_length(4, 12, 0.0) == 8.0
        assert expected_pattern_length(4, 12, 0.1) == pytest.approx(8 + 3 / 9)

    @pytest.mark.parametrize("kwargs", [
        dict(n_activities=1, n_visitors=5),
        dict(n_activities=4, n_visitors=5, walk_length_min=0),
        dict(n_activities=4, n_visitors=5, walk_length_min=6, walk_length_max=5),
        dict(n_activities=4, n_visitors=5, noise_factor=1.5),
    ])
    def test_invalid_config(self, kwargs):
        with pytest.raises(ValueError):
            CorpusConfig(**kwargs)

    def test_train_test_split_partitions(self):
        c = generate_corpus(CorpusConfig(n_activities=5, n_visitors=100, seed=1))
        tr, te = train_test_split(c, 0.2, seed=0)
        assert len(tr) == 80 and len(te) == 20
        assert sorted(map(tuple, tr.patterns + te.patterns)) == sorted(map(tuple, c.patterns))


class TestSplitPattern:
    def test_split_example(self):
        assert split_pattern([7, 2, 3, 1, 5], 2, 3) == ([7, 2, 3], [1, 5])

    def test_empty_history(self):
        assert split_pattern([0, 1], 1, 0) == ([], [1])

    def test_history_clamped(self):
        assert split_pattern([0, 1, 2], 1, 5) == ([0, 1], [2])

    def test_history_window_is_adjacent(self):
        assert split_pattern([9, 8, 7, 6, 5, 4], 2, 2) == ([7, 6], [5, 4])

    def test_cut_too_large(self):
        with pytest.raises(ValueError):
            split_pattern([1, 2], 2, 1)
