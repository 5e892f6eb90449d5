"""Curriculum sampling over precomputed embeddings.

Pipeline: cluster embeddings with mini-batch k-means (Davies-Bouldin picks k),
score each sample by its normalized distance to the assigned centroid, turn
scores into temperature-softmax sampling distributions, and emit deterministic
per-epoch index streams whose temperature (equivalently, effective dataset
size) anneals over training.
"""

from .clustering import (
    ClusterModel,
    KMeansConfig,
    davies_bouldin,
    fit_minibatch_kmeans,
    initial_centroids,
    load_cluster_model,
    mean_squared_distance,
    save_cluster_model,
    select_k,
)
from .data_io import (
    EmbeddingMatrix,
    SyntheticSpec,
    generate_synthetic,
    l2_normalize,
    load_embeddings,
    load_indices,
    save_embeddings,
    save_indices,
    synthetic_labels,
)
from .errors import (
    ConfigError,
    DegenerateDistributionError,
    FormatError,
    ValidationError,
)
from .oracles import oracle_alias_mass, oracle_scores, oracle_softmax
from .prototypicality import (
    PrototypicalityScores,
    load_scores,
    save_scores,
    score,
)
from .sampler import (
    TAU_INF,
    EpochDrawSpec,
    SamplingDistribution,
    build_alias_table,
    build_distribution,
    distribution_from_probs,
    draw_epoch,
    draw_with_epoch_seed,
    softmax_probs,
)
from .schedule import (
    UNIFORM_LIMIT,
    CurriculumSchedule,
    ScheduleEntry,
    TauSolution,
    build_schedule,
    effective_fraction,
    effective_size,
    load_schedule,
    monte_carlo_effective_size,
    save_schedule,
    schedule_curve_csv,
    solve_tau,
)

__version__ = "0.1.0"

__all__ = [
    "ClusterModel",
    "ConfigError",
    "CurriculumSchedule",
    "DegenerateDistributionError",
    "EmbeddingMatrix",
    "EpochDrawSpec",
    "FormatError",
    "KMeansConfig",
    "PrototypicalityScores",
    "SamplingDistribution",
    "ScheduleEntry",
    "SyntheticSpec",
    "TAU_INF",
    "TauSolution",
    "UNIFORM_LIMIT",
    "ValidationError",
    "build_alias_table",
    "build_distribution",
    "build_schedule",
    "davies_bouldin",
    "distribution_from_probs",
    "draw_epoch",
    "draw_with_epoch_seed",
    "effective_fraction",
    "effective_size",
    "fit_minibatch_kmeans",
    "generate_synthetic",
    "initial_centroids",
    "l2_normalize",
    "load_cluster_model",
    "load_embeddings",
    "load_indices",
    "load_schedule",
    "load_scores",
    "mean_squared_distance",
    "monte_carlo_effective_size",
    "oracle_alias_mass",
    "oracle_scores",
    "oracle_softmax",
    "save_cluster_model",
    "save_embeddings",
    "save_indices",
    "save_schedule",
    "save_scores",
    "schedule_curve_csv",
    "score",
    "select_k",
    "softmax_probs",
    "solve_tau",
    "synthetic_labels",
]
