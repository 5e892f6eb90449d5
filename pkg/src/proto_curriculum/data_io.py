"""Embedding matrices and the on-disk formats of the pipeline.

Binary layouts (all little-endian):

  embeddings  magic ``PROTOEMB`` (8 bytes), u32 version=1, u64 n_samples,
              u32 dim, u32 reserved=0, then n_samples*dim float32 row-major.
  indices     magic ``PROTOIDX``, u32 version=1, u64 count, count u64 values.

CSV embeddings are one row per sample, comma-separated decimal floats, no
header; values are parsed as float64 and narrowed to float32, so a CSV and a
binary file holding the same float32 data load to identical matrices.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ConfigError, FormatError, ValidationError

EMBEDDING_MAGIC = b"PROTOEMB"
INDEX_MAGIC = b"PROTOIDX"
_EMB_HEADER = struct.Struct("<8sIQII")
_IDX_HEADER = struct.Struct("<8sIQ")


@dataclass
class EmbeddingMatrix:
    """N x d float32 feature matrix, immutable once constructed."""

    data: np.ndarray
    sample_ids: list[str] | None = None

    def __post_init__(self):
        arr = np.ascontiguousarray(self.data, dtype=np.float32)
        if arr.ndim != 2:
            raise ValidationError(f"embedding data must be 2-D, got ndim={arr.ndim}")
        n, d = arr.shape
        if n < 1 or d < 1:
            raise ValidationError(f"embedding matrix must be at least 1x1, got {n}x{d}")
        finite_rows = np.isfinite(arr).all(axis=1)
        if not finite_rows.all():
            bad = int(np.flatnonzero(~finite_rows)[0])
            raise ValidationError(f"non-finite value in row {bad}")
        if self.sample_ids is not None:
            if len(self.sample_ids) != n:
                raise ValidationError(
                    f"sample_ids length {len(self.sample_ids)} != n_samples {n}"
                )
            if len(set(self.sample_ids)) != n:
                raise ValidationError("sample_ids are not unique")
        arr.setflags(write=False)
        self.data = arr

    @property
    def n_samples(self) -> int:
        return int(self.data.shape[0])

    @property
    def dim(self) -> int:
        return int(self.data.shape[1])


@dataclass(frozen=True)
class SyntheticSpec:
    """Recipe for a Gaussian-blob fixture with known cluster structure."""

    n_clusters: int
    samples_per_cluster: int
    dim: int
    separation: float
    spread: float
    seed: int

    def __post_init__(self):
        if self.n_clusters < 1 or self.samples_per_cluster < 1 or self.dim < 1:
            raise ConfigError("n_clusters, samples_per_cluster and dim must be >= 1")
        if self.separation < 0:
            raise ConfigError(f"separation must be >= 0, got {self.separation}")
        if not self.spread > 0:
            raise ConfigError(f"spread must be > 0, got {self.spread}")


def synthetic_centroid(spec: SyntheticSpec, cluster: int) -> np.ndarray:
    """Centroid layout: axis e_{c mod dim} scaled by separation*(1 + c//dim).

    Distinct centroids are at least `separation` apart: same-axis pairs differ
    by a multiple of separation, cross-axis pairs by at least separation*sqrt(2).
    """
    c = np.zeros(spec.dim, dtype=np.float64)
    c[cluster % spec.dim] = spec.separation * (1 + cluster // spec.dim)
    return c


def generate_synthetic(spec: SyntheticSpec) -> EmbeddingMatrix:
    """Draw isotropic Gaussian blobs around well-separated centroids.

    Rows are grouped by cluster: row i belongs to cluster i // samples_per_cluster
    (see synthetic_labels).
    """
    rng = np.random.default_rng(spec.seed)
    blocks = []
    for c in range(spec.n_clusters):
        center = synthetic_centroid(spec, c)
        pts = center + spec.spread * rng.standard_normal(
            (spec.samples_per_cluster, spec.dim)
        )
        blocks.append(pts)
    data = np.vstack(blocks).astype(np.float32)
    return EmbeddingMatrix(data)


def synthetic_labels(spec: SyntheticSpec) -> np.ndarray:
    """Generating cluster of each row of generate_synthetic(spec)."""
    return np.repeat(np.arange(spec.n_clusters), spec.samples_per_cluster)


def l2_normalize(matrix: EmbeddingMatrix) -> EmbeddingMatrix:
    """Scale every row to unit L2 norm. Opt-in; zero rows are rejected."""
    norms = np.linalg.norm(matrix.data.astype(np.float64), axis=1)
    if not (norms > 0).all():
        bad = int(np.flatnonzero(norms == 0)[0])
        raise ValidationError(f"cannot L2-normalize zero row {bad}")
    data = (matrix.data.astype(np.float64) / norms[:, None]).astype(np.float32)
    return EmbeddingMatrix(data, sample_ids=matrix.sample_ids)


def save_embeddings(path: str | Path, matrix: EmbeddingMatrix) -> None:
    header = _EMB_HEADER.pack(
        EMBEDDING_MAGIC, 1, matrix.n_samples, matrix.dim, 0
    )
    Path(path).write_bytes(header + matrix.data.astype("<f4").tobytes())


def _read_file(path: str | Path) -> bytes:
    p = Path(path)
    try:
        return p.read_bytes()
    except OSError as exc:
        raise FormatError(f"{p}: cannot read: {exc}") from exc


def load_embeddings(path: str | Path, format: str = "binary") -> EmbeddingMatrix:
    """Load a PROTOEMB binary file or a headerless CSV of floats.

    Row order is preserved exactly as stored.
    """
    if format == "binary":
        return _load_embeddings_binary(path)
    if format == "csv":
        return _load_embeddings_csv(path)
    raise ConfigError(f"unknown embedding format {format!r}")


def _load_embeddings_binary(path: str | Path) -> EmbeddingMatrix:
    raw = _read_file(path)
    if len(raw) < _EMB_HEADER.size:
        raise FormatError(f"{path}: truncated header ({len(raw)} bytes)")
    magic, version, n, dim, reserved = _EMB_HEADER.unpack_from(raw)
    if magic != EMBEDDING_MAGIC:
        raise FormatError(f"{path}: bad magic {magic!r}, expected {EMBEDDING_MAGIC!r}")
    if version != 1:
        raise FormatError(f"{path}: unsupported version {version}")
    if reserved != 0:
        raise FormatError(f"{path}: reserved field must be 0, got {reserved}")
    if n < 1 or dim < 1:
        raise FormatError(f"{path}: header claims n_samples={n}, dim={dim}")
    payload = raw[_EMB_HEADER.size:]
    expected = n * dim * 4
    if len(payload) != expected:
        raise FormatError(
            f"{path}: payload length mismatch: header claims {n}x{dim} "
            f"({expected} bytes), file holds {len(payload)}"
        )
    data = np.frombuffer(payload, dtype="<f4").reshape(n, dim)
    try:
        return EmbeddingMatrix(data)
    except ValidationError as exc:
        raise ValidationError(f"{path}: {exc}") from exc


def _load_embeddings_csv(path: str | Path) -> EmbeddingMatrix:
    text = _read_file(path).decode("utf-8")
    rows = []
    width = None
    for lineno, line in enumerate(text.splitlines()):
        if not line.strip():
            continue
        fields = line.split(",")
        if width is None:
            width = len(fields)
        elif len(fields) != width:
            raise FormatError(
                f"{path}: row {lineno} has {len(fields)} fields, expected {width}"
            )
        try:
            rows.append([float(f) for f in fields])
        except ValueError as exc:
            raise FormatError(f"{path}: row {lineno}: {exc}") from exc
    if not rows:
        raise FormatError(f"{path}: no data rows")
    data = np.asarray(rows, dtype=np.float64).astype(np.float32)
    try:
        return EmbeddingMatrix(data)
    except ValidationError as exc:
        raise ValidationError(f"{path}: {exc}") from exc


def save_indices(path: str | Path, indices) -> None:
    arr = np.asarray(indices, dtype=np.uint64)
    if arr.ndim != 1:
        raise ValidationError("indices must be one-dimensional")
    header = _IDX_HEADER.pack(INDEX_MAGIC, 1, arr.size)
    Path(path).write_bytes(header + arr.astype("<u8").tobytes())


def load_indices(path: str | Path) -> np.ndarray:
    raw = _read_file(path)
    if len(raw) < _IDX_HEADER.size:
        raise FormatError(f"{path}: truncated header ({len(raw)} bytes)")
    magic, version, count = _IDX_HEADER.unpack_from(raw)
    if magic != INDEX_MAGIC:
        raise FormatError(f"{path}: bad magic {magic!r}, expected {INDEX_MAGIC!r}")
    if version != 1:
        raise FormatError(f"{path}: unsupported version {version}")
    payload = raw[_IDX_HEADER.size:]
    if len(payload) != count * 8:
        raise FormatError(
            f"{path}: payload length mismatch: header claims {count} indices "
            f"({count * 8} bytes), file holds {len(payload)}"
        )
    return np.frombuffer(payload, dtype="<u8").copy()
