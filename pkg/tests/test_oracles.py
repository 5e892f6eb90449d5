"""The shipped brute-force references agree with the optimized paths."""

import numpy as np

from proto_curriculum import (
    ClusterModel,
    EmbeddingMatrix,
    distribution_from_probs,
    oracle_alias_mass,
    oracle_scores,
    score,
)
from tests.conftest import random_fixture


class TestOracleScores:
    def test_agrees_with_optimized_on_random_fixtures(self):
        rng = np.random.default_rng(1234)
        for _ in range(100):
            emb, model = random_fixture(
                rng,
                n_clusters=int(rng.integers(2, 6)),
                per_cluster=int(rng.integers(3, 12)),
                dim=int(rng.integers(1, 6)),
            )
            fast = score(emb, model)
            slow = oracle_scores(emb, model)
            assert (
                float(
                    np.max(
                        np.abs(fast.normalized.astype(np.float64) - slow.normalized)
                    )
                )
                < 1e-6
            )

    def test_line_cluster(self):
        emb = EmbeddingMatrix(np.array([[0.0], [1.0], [2.0]], dtype=np.float32))
        model = ClusterModel(
            k=2,
            dim=1,
            centroids=np.array([[1.0], [50.0]], dtype=np.float32),
            assignments=np.array([0, 0, 0], dtype=np.uint32),
            per_cluster_counts=np.array([3, 0]),
        )
        slow = oracle_scores(emb, model)
        np.testing.assert_allclose(slow.normalized, [1.0, 0.0, 1.0])

    def test_zero_spread_cluster(self):
        emb = EmbeddingMatrix(np.array([[2.0], [2.0], [2.0]], dtype=np.float32))
        model = ClusterModel(
            k=2,
            dim=1,
            centroids=np.array([[2.0], [50.0]], dtype=np.float32),
            assignments=np.array([0, 0, 0], dtype=np.uint32),
            per_cluster_counts=np.array([3, 0]),
        )
        slow = oracle_scores(emb, model)
        np.testing.assert_array_equal(slow.normalized, [0.0, 0.0, 0.0])


class TestOracleAliasMass:
    def test_three_categories(self):
        dist = distribution_from_probs(np.array([0.2, 0.3, 0.5]))
        np.testing.assert_allclose(
            oracle_alias_mass(dist), [0.2, 0.3, 0.5], atol=1e-12
        )

    def test_uniform(self):
        dist = distribution_from_probs(np.full(7, 1.0 / 7.0))
        np.testing.assert_allclose(oracle_alias_mass(dist), 1.0 / 7.0, atol=1e-12)

    def test_single(self):
        dist = distribution_from_probs(np.array([1.0]))
        np.testing.assert_array_equal(oracle_alias_mass(dist), [1.0])
