import numpy as np
import pytest

from proto_curriculum import (
    EmbeddingMatrix,
    KMeansConfig,
    SyntheticSpec,
    fit_minibatch_kmeans,
    generate_synthetic,
    score,
)


@pytest.fixture(scope="session")
def four_blob_spec():
    return SyntheticSpec(
        n_clusters=4,
        samples_per_cluster=500,
        dim=8,
        separation=50.0,
        spread=0.5,
        seed=20250808,
    )


@pytest.fixture(scope="session")
def four_blobs(four_blob_spec):
    return generate_synthetic(four_blob_spec)


@pytest.fixture(scope="session")
def fitted_four_blobs(four_blobs):
    model = fit_minibatch_kmeans(four_blobs, KMeansConfig(k=4, seed=13))
    return four_blobs, model


@pytest.fixture(scope="session")
def four_blob_scores(fitted_four_blobs):
    embeddings, model = fitted_four_blobs
    return score(embeddings, model)


def random_fixture(rng, n_clusters=5, per_cluster=10, dim=3, spread=1.0):
    """Small random blob matrix plus a fitted model, for property loops."""
    centers = rng.normal(scale=10.0, size=(n_clusters, dim))
    data = np.vstack(
        [c + spread * rng.normal(size=(per_cluster, dim)) for c in centers]
    ).astype(np.float32)
    emb = EmbeddingMatrix(data)
    model = fit_minibatch_kmeans(
        emb, KMeansConfig(k=n_clusters, seed=int(rng.integers(1 << 32)))
    )
    return emb, model
