"""Per-sample prototypicality: centroid distance with per-cluster min-max scaling.

A score of 0 means the sample sits on its cluster centroid (most prototypical);
1 means it is the farthest member of its cluster. Clusters with no internal
spread (singletons, coincident members) score 0 for all members so they stay
available from the earliest curriculum stage.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .clustering import ClusterModel
from .data_io import EmbeddingMatrix
from .errors import FormatError, ValidationError

SCORES_MAGIC = b"PROTOSCR"
_SCR_HEADER = struct.Struct("<8sIQ")
_SCR_RECORD = np.dtype([("normalized", "<f4"), ("raw", "<f4"), ("cluster", "<u4")])


@dataclass
class PrototypicalityScores:
    normalized: np.ndarray       # (n,) float32 in [0, 1]
    raw: np.ndarray              # (n,) float32 centroid distances
    cluster_of: np.ndarray       # (n,) uint32
    per_cluster_min: np.ndarray  # (k,) float64, NaN for empty clusters
    per_cluster_max: np.ndarray  # (k,) float64, NaN for empty clusters

    def __post_init__(self):
        self.normalized = np.ascontiguousarray(self.normalized, dtype=np.float32)
        self.raw = np.ascontiguousarray(self.raw, dtype=np.float32)
        self.cluster_of = np.ascontiguousarray(self.cluster_of, dtype=np.uint32)
        self.per_cluster_min = np.ascontiguousarray(self.per_cluster_min, dtype=np.float64)
        self.per_cluster_max = np.ascontiguousarray(self.per_cluster_max, dtype=np.float64)
        n = self.normalized.size
        if self.raw.size != n or self.cluster_of.size != n:
            raise ValidationError("score arrays disagree on n_samples")
        if n == 0:
            raise ValidationError("scores must cover at least one sample")
        if np.any(self.normalized < 0) or np.any(self.normalized > 1):
            raise ValidationError("normalized scores outside [0, 1]")
        for arr in (self.normalized, self.raw, self.cluster_of,
                    self.per_cluster_min, self.per_cluster_max):
            arr.setflags(write=False)

    @property
    def n_samples(self) -> int:
        return int(self.normalized.size)

    @property
    def k(self) -> int:
        return int(self.per_cluster_min.size)


def score(embeddings: EmbeddingMatrix, model: ClusterModel) -> PrototypicalityScores:
    """Distance to the assigned centroid, min-max normalized within each cluster."""
    if embeddings.dim != model.dim:
        raise ValidationError(
            f"dim mismatch: embeddings {embeddings.dim}, model {model.dim}"
        )
    if embeddings.n_samples != model.n_samples:
        raise ValidationError(
            f"assignment length {model.n_samples} != n_samples {embeddings.n_samples}"
        )
    if model.assignments.size and int(model.assignments.max()) >= model.k:
        raise ValidationError("corrupt model: assignment index >= k")

    z = embeddings.data.astype(np.float64)
    c = model.centroids.astype(np.float64)
    diffs = z - c[model.assignments]
    raw64 = np.sqrt(np.einsum("ij,ij->i", diffs, diffs))

    k = model.k
    cmin = np.full(k, np.inf)
    cmax = np.full(k, -np.inf)
    np.minimum.at(cmin, model.assignments, raw64)
    np.maximum.at(cmax, model.assignments, raw64)
    empty = model.per_cluster_counts == 0
    cmin[empty] = np.nan
    cmax[empty] = np.nan

    denom = cmax - cmin
    denom_per_sample = denom[model.assignments]
    num = raw64 - cmin[model.assignments]
    normalized64 = np.zeros_like(raw64)
    np.divide(num, denom_per_sample, out=normalized64, where=denom_per_sample > 0)

    return PrototypicalityScores(
        normalized=normalized64.astype(np.float32),
        raw=raw64.astype(np.float32),
        cluster_of=model.assignments.astype(np.uint32),
        per_cluster_min=cmin,
        per_cluster_max=cmax,
    )


def save_scores(
    out_dir: str | Path,
    scores: PrototypicalityScores,
    config_hash: str | None = None,
    stem: str = "scores",
) -> None:
    """Persist PROTOSCR records (d-hat, raw, cluster) plus a JSON sidecar."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    records = np.empty(scores.n_samples, dtype=_SCR_RECORD)
    records["normalized"] = scores.normalized
    records["raw"] = scores.raw
    records["cluster"] = scores.cluster_of
    header = _SCR_HEADER.pack(SCORES_MAGIC, 1, scores.n_samples)
    (out / f"{stem}.bin").write_bytes(header + records.tobytes())

    def _optional(values):
        return [None if np.isnan(v) else float(v) for v in values]

    sidecar = {
        "n_samples": scores.n_samples,
        "k": scores.k,
        "per_cluster_min": _optional(scores.per_cluster_min),
        "per_cluster_max": _optional(scores.per_cluster_max),
        "config_hash": config_hash,
    }
    (out / f"{stem}.json").write_text(json.dumps(sidecar, indent=2) + "\n")


def load_scores(out_dir: str | Path, stem: str = "scores") -> PrototypicalityScores:
    out = Path(out_dir)
    raw = (out / f"{stem}.bin").read_bytes()
    if len(raw) < _SCR_HEADER.size:
        raise FormatError(f"{stem}.bin: truncated header")
    magic, version, n = _SCR_HEADER.unpack_from(raw)
    if magic != SCORES_MAGIC:
        raise FormatError(f"{stem}.bin: bad magic {magic!r}, expected {SCORES_MAGIC!r}")
    if version != 1:
        raise FormatError(f"{stem}.bin: unsupported version {version}")
    payload = raw[_SCR_HEADER.size:]
    if len(payload) != n * _SCR_RECORD.itemsize:
        raise FormatError(
            f"{stem}.bin: payload length mismatch: header claims {n} records"
        )
    records = np.frombuffer(payload, dtype=_SCR_RECORD)
    sidecar = json.loads((out / f"{stem}.json").read_text())

    def _from_optional(values):
        return np.asarray(
            [np.nan if v is None else v for v in values], dtype=np.float64
        )

    return PrototypicalityScores(
        normalized=records["normalized"],
        raw=records["raw"],
        cluster_of=records["cluster"],
        per_cluster_min=_from_optional(sidecar["per_cluster_min"]),
        per_cluster_max=_from_optional(sidecar["per_cluster_max"]),
    )
