import numpy as np
import pytest

from mvclust import (
    KMeansConfig,
    agglomerate_distance,
    agglomerate_features,
    agglomerative_fit_distance,
    agglomerative_fit_features,
    canonicalize,
    kmeans_fit,
    kmeanspp_init,
    pairwise_euclidean,
)
from mvclust.cluster import _lloyd
from mvclust.seeding import substream

from oracles import best_two_cluster_inertia


class TestPairwiseEuclidean:
    def test_exact_symmetry_zero_diagonal(self):
        rng = np.random.default_rng(0)
        x = rng.standard_normal((15, 7))
        d = pairwise_euclidean(x)
        assert np.array_equal(d, d.T)
        assert np.all(np.diag(d) == 0.0)

    def test_known_values(self):
        d = pairwise_euclidean(np.array([[0.0, 0.0], [3.0, 4.0]]))
        assert d[0, 1] == 5.0


class TestKmeansPPInit:
    def test_k_equals_n_is_permutation(self):
        rng = np.random.default_rng(1)
        for seed in range(10):
            x = np.random.default_rng(seed).standard_normal((6, 3))
            c = kmeanspp_init(x, 6, substream(seed))
            assert np.array_equal(
                np.sort(c.view([("", c.dtype)] * 3), axis=0),
                np.sort(x.view([("", x.dtype)] * 3), axis=0),
            )

    def test_single_distinct_row(self):
        x = np.tile([[2.0, 2.0]], (5, 1))
        c = kmeanspp_init(x, 2, substream(4))
        assert np.array_equal(c, np.tile([[2.0, 2.0]], (2, 1)))

    def test_two_far_points_always_both(self):
        x = np.array([[0.0], [100.0]])
        for seed in range(20):
            c = kmeanspp_init(x, 2, substream(seed))
            assert sorted(c.ravel().tolist()) == [0.0, 100.0]

    def test_k_too_large(self):
        with pytest.raises(ValueError):
            kmeanspp_init(np.zeros((2, 1)), 3, substream(0))


class TestKmeansFit:
    def test_two_well_separated_pairs(self):
        x = np.array([[0.0], [1.0], [10.0], [11.0]])
        labels, inertia = kmeans_fit(x, KMeansConfig(k=2, seed=0))
        assert labels.tolist() == [0, 0, 1, 1]
        assert inertia == 1.0
        # enumeration oracle confirms optimality
        assert inertia == best_two_cluster_inertia([[0.0], [1.0], [10.0], [11.0]])

    def test_k_equals_n(self):
        x = np.random.default_rng(2).standard_normal((5, 2))
        labels, inertia = kmeans_fit(x, KMeansConfig(k=5, seed=0))
        assert inertia == 0.0
        assert sorted(labels.tolist()) == [0, 1, 2, 3, 4]

    def test_identical_rows_k2(self):
        x = np.ones((6, 2))
        labels, inertia = kmeans_fit(x, KMeansConfig(k=2, seed=0))
        assert inertia == 0.0
        assert set(labels.tolist()) == {0, 1}
        assert len(labels) == 6

    def test_k_too_large(self):
        with pytest.raises(ValueError):
            kmeans_fit(np.zeros((2, 1)), KMeansConfig(k=3))

    def test_non_finite_rejected(self):
        with pytest.raises(ValueError):
            kmeans_fit(np.array([[np.nan], [0.0]]), KMeansConfig(k=1))

    def test_seeded_determinism_bitwise(self):
        rng = np.random.default_rng(5)
        for trial in range(20):
            x = rng.standard_normal((int(rng.integers(4, 25)), 3))
            cfg = KMeansConfig(k=3, seed=trial)
            la, ia = kmeans_fit(x, cfg)
            lb, ib = kmeans_fit(x, cfg)
            assert np.array_equal(la, lb)
            assert ia == ib

    def test_translation_invariance(self):
        rng = np.random.default_rng(6)
        shift = np.array([1000.25, -77.5])
        for trial in range(20):
            x = rng.standard_normal((12, 2))
            cfg = KMeansConfig(k=3, seed=trial)
            la, _ = kmeans_fit(x, cfg)
            lb, _ = kmeans_fit(x + shift, cfg)
            assert np.array_equal(la, lb)

    def test_lloyd_monotone_descent(self):
        rng = np.random.default_rng(7)
        for _ in range(30):
            x = rng.standard_normal((20, 2))
            init = kmeanspp_init(x, 4, substream(int(rng.integers(1 << 30))))
            _, _, _, history = _lloyd(x, init, max_iter=50, tol_sq=0.0)
            for before, after in zip(history, history[1:]):
                assert after <= before * (1 + 1e-9) + 1e-12

    def test_restart_optimality_statistics(self):
        rng = np.random.default_rng(8)
        hits = 0
        for trial in range(100):
            n = int(rng.integers(4, 9))
            x = rng.standard_normal((n, 2))
            _, inertia = kmeans_fit(x, KMeansConfig(k=2, n_init=10, seed=trial))
            best = best_two_cluster_inertia([list(r) for r in x])
            if inertia <= best * (1 + 1e-9):
                hits += 1
        assert hits >= 95


class TestAgglomerative:
    def test_two_points_two_clusters(self):
        x = np.array([[0.0], [5.0]])
        for linkage in ("ward", "average", "complete"):
            assert agglomerative_fit_features(x, 2, linkage).tolist() == [0, 1]

    def test_separated_pairs_all_linkages(self):
        x = np.array([[0.0], [1.0], [10.0], [11.0]])
        for linkage in ("ward", "average", "complete"):
            assert agglomerative_fit_features(x, 2, linkage).tolist() == [0, 0, 1, 1]

    def test_near_pair_merges_first(self):
        x = np.array([[0.0, 0.0], [1.0, 0.0], [10.0, 0.0]])
        for linkage in ("ward", "average", "complete"):
            dend = agglomerate_features(x, linkage)
            assert dend.merges[0, 0] == 0 and dend.merges[0, 1] == 1
            assert dend.cut(2).tolist() == [0, 0, 1]

    def test_distance_example(self):
        d = np.array([[0.0, 1.0, 5.0], [1.0, 0.0, 4.0], [5.0, 4.0, 0.0]])
        assert agglomerative_fit_distance(d, 2, "average").tolist() == [0, 0, 1]

    def test_zero_matrix_single_cluster(self):
        assert agglomerative_fit_distance(np.zeros((4, 4)), 1).tolist() == [0, 0, 0, 0]

    def test_k_equals_n_singletons(self):
        d = pairwise_euclidean(np.arange(5.0)[:, None])
        assert agglomerative_fit_distance(d, 5).tolist() == [0, 1, 2, 3, 4]

    def test_ward_rejected_on_distances(self):
        with pytest.raises(ValueError):
            agglomerative_fit_distance(np.zeros((3, 3)), 2, "ward")

    def test_asymmetric_rejected(self):
        d = np.array([[0.0, 1.0], [2.0, 0.0]])
        with pytest.raises(ValueError):
            agglomerative_fit_distance(d, 1)

    def test_k_out_of_range(self):
        with pytest.raises(ValueError):
            agglomerative_fit_features(np.zeros((3, 1)), 4)

    def test_features_equals_distance_path(self):
        rng = np.random.default_rng(9)
        for _ in range(10):
            x = rng.standard_normal((int(rng.integers(3, 20)), 4))
            k = int(rng.integers(1, x.shape[0] + 1))
            via_features = agglomerative_fit_features(x, k, "average")
            via_distance = agglomerative_fit_distance(pairwise_euclidean(x), k, "average")
            assert np.array_equal(via_features, via_distance)

    def test_height_monotonicity(self):
        rng = np.random.default_rng(10)
        for _ in range(20):
            x = rng.standard_normal((int(rng.integers(3, 25)), 3))
            for linkage in ("average", "complete"):
                h = agglomerate_features(x, linkage).heights()
                assert np.all(np.diff(h) >= -1e-12 * np.abs(h[:-1]))

    def test_dendrogram_structure(self):
        rng = np.random.default_rng(11)
        x = rng.standard_normal((10, 2))
        dend = agglomerate_features(x, "average")
        assert dend.merges.shape == (9, 4)
        merged_ids = dend.merges[:, :2].ravel().astype(int)
        assert len(set(merged_ids.tolist())) == len(merged_ids)  # each id merged once
        for k in range(1, 11):
            labels = dend.cut(k)
            assert int(labels.max()) + 1 == k
        # new cluster size bookkeeping
        assert dend.merges[-1, 3] == 10

    def test_deterministic(self):
        rng = np.random.default_rng(12)
        x = rng.standard_normal((15, 3))
        a = agglomerative_fit_features(x, 4)
        b = agglomerative_fit_features(x, 4)
        assert np.array_equal(a, b)

    def test_tie_break_lowest_pair(self):
        # equilateral configuration: merge ties resolved to the smallest (i, j)
        d = np.array(
            [[0.0, 1.0, 1.0], [1.0, 0.0, 1.0], [1.0, 1.0, 0.0]]
        )
        dend = agglomerate_distance(d, "average")
        assert dend.merges[0, 0] == 0 and dend.merges[0, 1] == 1

    def test_canonical_output(self):
        x = np.array([[10.0], [0.0], [10.1], [0.1]])
        labels = agglomerative_fit_features(x, 2)
        assert np.array_equal(labels, canonicalize(labels))
        assert labels[0] == 0

    def test_single_leaf(self):
        assert agglomerative_fit_features(np.array([[1.0, 2.0]]), 1).tolist() == [0]
        dend = agglomerate_features(np.array([[1.0, 2.0]]))
        assert dend.merges.shape == (0, 4)


def test_config_defaults():
    cfg = KMeansConfig(k=3)
    assert (cfg.n_init, cfg.max_iter, cfg.tol) == (10, 300, 1e-4)
    with pytest.raises(ValueError):
        KMeansConfig(k=0)
    with pytest.raises(ValueError):
        KMeansConfig(k=1, tol=-1.0)
