"""Brute-force reference implementations for verifying the optimized paths.

These are shipped (not test-only) so `verify` can run them against user data:
the headline quality of a curriculum is unobservable locally, but the
numerical pipeline is fully checkable. Each oracle is a plain scalar loop
sharing no kernels with its optimized counterpart.
"""

from __future__ import annotations

import math

import numpy as np

from .clustering import ClusterModel
from .data_io import EmbeddingMatrix
from .errors import ValidationError
from .prototypicality import PrototypicalityScores
from .sampler import SamplingDistribution


def oracle_scores(
    embeddings: EmbeddingMatrix, model: ClusterModel
) -> PrototypicalityScores:
    """Nested-loop distance + min-max normalization, float64 throughout."""
    if embeddings.dim != model.dim:
        raise ValidationError(
            f"dim mismatch: embeddings {embeddings.dim}, model {model.dim}"
        )
    if embeddings.n_samples != model.n_samples:
        raise ValidationError("model was not fitted over these embeddings")
    n = embeddings.n_samples
    dim = embeddings.dim
    data = embeddings.data.tolist()
    centroids = model.centroids.astype(np.float64).tolist()
    assign = model.assignments.tolist()

    raw = [0.0] * n
    for i in range(n):
        c = centroids[assign[i]]
        zi = data[i]
        acc = 0.0
        for j in range(dim):
            diff = zi[j] - c[j]
            acc += diff * diff
        raw[i] = math.sqrt(acc)

    k = model.k
    cmin = [math.inf] * k
    cmax = [-math.inf] * k
    for i in range(n):
        a = assign[i]
        if raw[i] < cmin[a]:
            cmin[a] = raw[i]
        if raw[i] > cmax[a]:
            cmax[a] = raw[i]

    normalized = [0.0] * n
    for i in range(n):
        a = assign[i]
        denom = cmax[a] - cmin[a]
        if denom > 0.0:
            normalized[i] = (raw[i] - cmin[a]) / denom

    counts = model.per_cluster_counts.tolist()
    cmin_out = [cmin[c] if counts[c] > 0 else math.nan for c in range(k)]
    cmax_out = [cmax[c] if counts[c] > 0 else math.nan for c in range(k)]
    return PrototypicalityScores(
        normalized=np.asarray(normalized, dtype=np.float64),
        raw=np.asarray(raw, dtype=np.float64),
        cluster_of=model.assignments,
        per_cluster_min=np.asarray(cmin_out),
        per_cluster_max=np.asarray(cmax_out),
    )


def oracle_softmax(normalized_scores, tau: float) -> list[float]:
    """Direct textbook softmax with libm exp; no max subtraction, no tables.

    Reference path for moderate temperatures (exp(-1/tau) must not underflow).
    """
    values = [float(v) for v in np.asarray(normalized_scores, dtype=np.float64)]
    weights = [math.exp(-v / tau) for v in values]
    total = math.fsum(weights)
    return [w / total for w in weights]


def oracle_alias_mass(dist: SamplingDistribution) -> np.ndarray:
    """Exact per-index selection probability of an alias table.

    A draw picks slot s uniformly, then index s with probability threshold[s]
    and alias[s] otherwise; summing those terms enumerates the table exactly,
    with no randomness involved.
    """
    n = dist.n
    threshold = dist.threshold.tolist()
    alias = dist.alias.tolist()
    mass = [0.0] * n
    inv_n = 1.0 / n
    for slot in range(n):
        mass[slot] += inv_n * threshold[slot]
        mass[alias[slot]] += inv_n * (1.0 - threshold[slot])
    return np.asarray(mass, dtype=np.float64)
