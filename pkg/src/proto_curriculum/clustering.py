"""Mini-batch k-means, Davies-Bouldin validity index, and automatic k selection.

The fitting loop follows Sculley's mini-batch scheme with a per-centroid
learning rate of 1/count; a whole mini-batch assigned to one centroid is
folded in as (count*mu + sum_x) / (count + m), which is algebraically the
same sequence of per-sample updates. Empty centroids are reseeded during
training to the worst-fit point of the current batch; after the freeze pass
they are kept (count 0) and flagged.
"""

from __future__ import annotations

import json
import struct
import warnings
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .data_io import EmbeddingMatrix
from .errors import ConfigError, FormatError, ValidationError

CENTROID_MAGIC = b"PROTOCEN"
ASSIGNMENT_MAGIC = b"PROTOASN"
_CEN_HEADER = struct.Struct("<8sIII")
_ASN_HEADER = struct.Struct("<8sQ")

_ASSIGN_BLOCK = 8192


@dataclass(frozen=True)
class KMeansConfig:
    k: int
    batch_size: int = 1024
    max_iters: int = 100  # full-pass-equivalents
    tol: float = 1e-4     # relative centroid shift between passes
    seed: int = 0
    init: str = "kmeanspp"

    def __post_init__(self):
        if self.k < 2:
            raise ConfigError(f"k must be >= 2, got {self.k}")
        if self.batch_size < 1:
            raise ConfigError(f"batch_size must be >= 1, got {self.batch_size}")
        if self.max_iters < 1:
            raise ConfigError(f"max_iters must be >= 1, got {self.max_iters}")
        if self.tol < 0:
            raise ConfigError(f"tol must be >= 0, got {self.tol}")
        if self.init not in ("kmeanspp", "random"):
            raise ConfigError(f"init must be 'kmeanspp' or 'random', got {self.init!r}")

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "batch_size": self.batch_size,
            "max_iters": self.max_iters,
            "tol": self.tol,
            "seed": self.seed,
            "init": self.init,
        }


@dataclass
class ClusterModel:
    """Frozen clustering: float32 centroids plus a full argmin assignment pass."""

    k: int
    dim: int
    centroids: np.ndarray          # (k, dim) float32
    assignments: np.ndarray        # (n,) uint32
    per_cluster_counts: np.ndarray # (k,) int64
    config: KMeansConfig | None = None

    def __post_init__(self):
        self.centroids = np.ascontiguousarray(self.centroids, dtype=np.float32)
        self.assignments = np.ascontiguousarray(self.assignments, dtype=np.uint32)
        self.per_cluster_counts = np.ascontiguousarray(
            self.per_cluster_counts, dtype=np.int64
        )
        if self.centroids.shape != (self.k, self.dim):
            raise ValidationError(
                f"centroids shape {self.centroids.shape} != ({self.k}, {self.dim})"
            )
        if not np.isfinite(self.centroids).all():
            raise ValidationError("centroids contain non-finite values")
        if self.assignments.size and int(self.assignments.max()) >= self.k:
            raise ValidationError("assignment index out of range")
        if int(self.per_cluster_counts.sum()) != self.assignments.size:
            raise ValidationError("per_cluster_counts do not sum to n_samples")
        self.centroids.setflags(write=False)
        self.assignments.setflags(write=False)
        self.per_cluster_counts.setflags(write=False)

    @property
    def n_samples(self) -> int:
        return int(self.assignments.size)

    @property
    def empty_clusters(self) -> np.ndarray:
        """Clusters that own no samples after the freeze pass."""
        return np.flatnonzero(self.per_cluster_counts == 0)


def _sq_distances(points64: np.ndarray, centroids64: np.ndarray) -> np.ndarray:
    d2 = (
        np.einsum("ij,ij->i", points64, points64)[:, None]
        + np.einsum("kj,kj->k", centroids64, centroids64)[None, :]
        - 2.0 * points64 @ centroids64.T
    )
    return d2


def assign_full(data32: np.ndarray, centroids64: np.ndarray) -> np.ndarray:
    """Deterministic full assignment pass; ties go to the lowest cluster index."""
    n = data32.shape[0]
    out = np.empty(n, dtype=np.uint32)
    for start in range(0, n, _ASSIGN_BLOCK):
        block = data32[start:start + _ASSIGN_BLOCK].astype(np.float64)
        out[start:start + _ASSIGN_BLOCK] = np.argmin(
            _sq_distances(block, centroids64), axis=1
        ).astype(np.uint32)
    return out


def initial_centroids(embeddings: EmbeddingMatrix, config: KMeansConfig) -> np.ndarray:
    """Initial float64 centroids (k-means++ over a subsampled pool, or random)."""
    rng = np.random.default_rng(config.seed)
    return _init_centroids(embeddings.data, config, rng)


def _init_centroids(data32: np.ndarray, config: KMeansConfig, rng) -> np.ndarray:
    n = data32.shape[0]
    pool_size = min(n, 100 * config.k)
    pool_idx = rng.permutation(n)[:pool_size]
    pool = data32[pool_idx].astype(np.float64)
    k = config.k
    if config.init == "random":
        chosen = rng.choice(pool_size, size=k, replace=False)
        return pool[chosen].copy()
    # k-means++ seeding
    centers = np.empty((k, pool.shape[1]), dtype=np.float64)
    first = int(rng.integers(pool_size))
    centers[0] = pool[first]
    d2 = np.einsum("ij,ij->i", pool - centers[0], pool - centers[0])
    for c in range(1, k):
        total = d2.sum()
        if total > 0:
            target = rng.random() * total
            idx = int(np.searchsorted(np.cumsum(d2), target, side="right"))
            idx = min(idx, pool_size - 1)
        else:
            # all remaining points coincide with a chosen center
            idx = c % pool_size
        centers[c] = pool[idx]
        new_d2 = np.einsum("ij,ij->i", pool - centers[c], pool - centers[c])
        d2 = np.minimum(d2, new_d2)
    return centers


def fit_minibatch_kmeans(
    embeddings: EmbeddingMatrix, config: KMeansConfig
) -> ClusterModel:
    """Fit mini-batch k-means and freeze the model with a full assignment pass."""
    n = embeddings.n_samples
    if config.k > n:
        raise ConfigError(f"k={config.k} exceeds n_samples={n}")
    data32 = embeddings.data
    rng = np.random.default_rng(config.seed)
    centers = _init_centroids(data32, config, rng)
    k = config.k
    counts = np.zeros(k, dtype=np.float64)

    pool_probe = data32[: min(n, 100 * k)].astype(np.float64)
    data_scale = max(float(np.sqrt(np.mean(np.einsum("ij,ij->i", pool_probe, pool_probe)))), 1e-12)

    batch_size = min(config.batch_size, n)
    batches_per_pass = -(-n // batch_size)
    prev = centers.copy()
    for _ in range(config.max_iters):
        batch = None
        d_assigned = None
        for _ in range(batches_per_pass):
            idx = rng.integers(0, n, size=batch_size)
            batch = data32[idx].astype(np.float64)
            d2 = _sq_distances(batch, centers)
            assign = np.argmin(d2, axis=1)
            d_assigned = np.take_along_axis(d2, assign[:, None], axis=1).ravel()
            batch_counts = np.bincount(assign, minlength=k).astype(np.float64)
            sums = np.zeros_like(centers)
            np.add.at(sums, assign, batch)
            new_counts = counts + batch_counts
            touched = batch_counts > 0
            centers[touched] = (
                counts[touched, None] * centers[touched] + sums[touched]
            ) / new_counts[touched, None]
            counts = new_counts
        empty = np.flatnonzero(counts == 0)
        if empty.size:
            # still-unclaimed centroids move to the worst-fit points of the
            # last batch; zero-distance candidates would only create
            # coincident centroids, so they are skipped
            candidates = np.flatnonzero(d_assigned > 0.0)
            order = candidates[np.argsort(-d_assigned[candidates], kind="stable")]
            for slot, batch_pos in zip(empty, order):
                centers[slot] = batch[batch_pos]
                counts[slot] = 1.0
        shift = float(np.sqrt(np.max(np.einsum("ij,ij->i", centers - prev, centers - prev))))
        if shift / data_scale < config.tol:
            break
        prev = centers.copy()

    centroids32 = centers.astype(np.float32)
    assignments = assign_full(data32, centroids32.astype(np.float64))
    final_counts = np.bincount(assignments, minlength=k).astype(np.int64)
    return ClusterModel(
        k=k,
        dim=embeddings.dim,
        centroids=centroids32,
        assignments=assignments,
        per_cluster_counts=final_counts,
        config=config,
    )


def mean_squared_distance(embeddings: EmbeddingMatrix, centroids) -> float:
    """Full-pass mean squared distance to the nearest centroid."""
    c64 = np.asarray(centroids, dtype=np.float64)
    total = 0.0
    data32 = embeddings.data
    for start in range(0, embeddings.n_samples, _ASSIGN_BLOCK):
        block = data32[start:start + _ASSIGN_BLOCK].astype(np.float64)
        d2 = _sq_distances(block, c64)
        total += float(np.maximum(d2.min(axis=1), 0.0).sum())
    return total / embeddings.n_samples


def davies_bouldin(embeddings: EmbeddingMatrix, model: ClusterModel) -> float:
    """Davies-Bouldin index over non-empty clusters; lower is better.

    Coincident centroids of two non-empty clusters yield +inf with a warning
    so that k sweeps keep going instead of aborting.
    """
    if embeddings.dim != model.dim:
        raise ValidationError(
            f"dim mismatch: embeddings {embeddings.dim}, model {model.dim}"
        )
    if embeddings.n_samples != model.n_samples:
        raise ValidationError("model was not fitted over these embeddings")
    nonempty = np.flatnonzero(model.per_cluster_counts > 0)
    if nonempty.size < 2:
        raise ValidationError(
            f"Davies-Bouldin undefined with {nonempty.size} non-empty cluster(s)"
        )
    z = embeddings.data.astype(np.float64)
    c = model.centroids.astype(np.float64)
    diffs = z - c[model.assignments]
    dist = np.sqrt(np.einsum("ij,ij->i", diffs, diffs))
    scatter_sum = np.zeros(model.k, dtype=np.float64)
    np.add.at(scatter_sum, model.assignments, dist)
    s_all = scatter_sum[nonempty] / model.per_cluster_counts[nonempty]

    sub = c[nonempty]
    gaps = np.sqrt(
        np.maximum(_sq_distances(sub, sub), 0.0)
    )
    m = nonempty.size
    off_diag = ~np.eye(m, dtype=bool)
    if np.any(gaps[off_diag] == 0.0):
        warnings.warn(
            "coincident centroids of non-empty clusters; Davies-Bouldin is +inf",
            RuntimeWarning,
            stacklevel=2,
        )
        return float("inf")
    np.fill_diagonal(gaps, np.inf)
    ratios = (s_all[:, None] + s_all[None, :]) / gaps
    ratios[~off_diag] = -np.inf
    return float(np.mean(ratios.max(axis=1)))


def select_k(
    embeddings: EmbeddingMatrix,
    k_min: int,
    k_max: int,
    base_config: KMeansConfig,
) -> tuple[int, dict[int, tuple[ClusterModel, float]]]:
    """Fit every k in [k_min, k_max], score with Davies-Bouldin, keep the minimum.

    Each candidate runs with seed = base seed XOR k; ties break to the smaller k.
    """
    if not (2 <= k_min <= k_max <= embeddings.n_samples):
        raise ConfigError(
            f"need 2 <= k_min <= k_max <= n_samples, got "
            f"k_min={k_min}, k_max={k_max}, n={embeddings.n_samples}"
        )
    models: dict[int, tuple[ClusterModel, float]] = {}
    best_k = None
    best_db = None
    for k in range(k_min, k_max + 1):
        config = replace(base_config, k=k, seed=base_config.seed ^ k)
        model = fit_minibatch_kmeans(embeddings, config)
        db = davies_bouldin(embeddings, model)
        models[k] = (model, db)
        if best_db is None or db < best_db:
            best_k, best_db = k, db
    return best_k, models


def save_cluster_model(
    out_dir: str | Path,
    model: ClusterModel,
    db: float | None = None,
    config_hash: str | None = None,
    stem: str = "model",
) -> None:
    """Persist JSON sidecar + PROTOCEN centroid block + PROTOASN assignment block."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    cen = _CEN_HEADER.pack(CENTROID_MAGIC, 1, model.k, model.dim)
    (out / f"{stem}.centroids.bin").write_bytes(
        cen + model.centroids.astype("<f4").tobytes()
    )
    asn = _ASN_HEADER.pack(ASSIGNMENT_MAGIC, model.n_samples)
    (out / f"{stem}.assignments.bin").write_bytes(
        asn + model.assignments.astype("<u4").tobytes()
    )
    sidecar = {
        "k": model.k,
        "dim": model.dim,
        "seed": model.config.seed if model.config else None,
        "config": model.config.to_dict() if model.config else None,
        "per_cluster_counts": model.per_cluster_counts.tolist(),
        "db": db,
        "empty_clusters": model.empty_clusters.tolist(),
        "config_hash": config_hash,
    }
    (out / f"{stem}.json").write_text(json.dumps(sidecar, indent=2) + "\n")


def load_cluster_model(out_dir: str | Path, stem: str = "model") -> ClusterModel:
    out = Path(out_dir)
    sidecar = json.loads((out / f"{stem}.json").read_text())

    raw = (out / f"{stem}.centroids.bin").read_bytes()
    if len(raw) < _CEN_HEADER.size:
        raise FormatError(f"{stem}.centroids.bin: truncated header")
    magic, version, k, dim = _CEN_HEADER.unpack_from(raw)
    if magic != CENTROID_MAGIC:
        raise FormatError(
            f"{stem}.centroids.bin: bad magic {magic!r}, expected {CENTROID_MAGIC!r}"
        )
    if version != 1:
        raise FormatError(f"{stem}.centroids.bin: unsupported version {version}")
    payload = raw[_CEN_HEADER.size:]
    if len(payload) != k * dim * 4:
        raise FormatError(f"{stem}.centroids.bin: payload length mismatch")
    centroids = np.frombuffer(payload, dtype="<f4").reshape(k, dim)

    raw = (out / f"{stem}.assignments.bin").read_bytes()
    if len(raw) < _ASN_HEADER.size:
        raise FormatError(f"{stem}.assignments.bin: truncated header")
    magic, n = _ASN_HEADER.unpack_from(raw)
    if magic != ASSIGNMENT_MAGIC:
        raise FormatError(
            f"{stem}.assignments.bin: bad magic {magic!r}, expected {ASSIGNMENT_MAGIC!r}"
        )
    payload = raw[_ASN_HEADER.size:]
    if len(payload) != n * 4:
        raise FormatError(f"{stem}.assignments.bin: payload length mismatch")
    assignments = np.frombuffer(payload, dtype="<u4")

    config = KMeansConfig(**sidecar["config"]) if sidecar.get("config") else None
    return ClusterModel(
        k=k,
        dim=dim,
        centroids=centroids,
        assignments=assignments,
        per_cluster_counts=np.asarray(sidecar["per_cluster_counts"], dtype=np.int64),
        config=config,
    )
