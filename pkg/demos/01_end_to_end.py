"""End-to-end walkthrough on synthetic blobs.

Generates a small labeled embedding set, picks the cluster count with a
Davies-Bouldin sweep, scores prototypicality, and draws a handful of epochs
from an annealed schedule, printing how the sampled pool widens over time.

Run from the repo root:  python demos/01_end_to_end.py
"""

import pathlib
import sys

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parents[1] / "src"))

import numpy as np

from proto_curriculum import (
    EpochDrawSpec,
    KMeansConfig,
    SyntheticSpec,
    build_distribution,
    build_schedule,
    draw_epoch,
    generate_synthetic,
    score,
    select_k,
    synthetic_labels,
)

spec = SyntheticSpec(
    n_clusters=4,
    samples_per_cluster=400,
    dim=8,
    separation=40.0,
    spread=0.8,
    seed=1,
)
embeddings = generate_synthetic(spec)
print(f"embeddings: {embeddings.n_samples} samples x {embeddings.dim} dims")

best_k, models = select_k(embeddings, 2, 8, KMeansConfig(k=2, seed=42))
print("\nDavies-Bouldin sweep (lower is better):")
for k, (_, db) in models.items():
    marker = "  <-- selected" if k == best_k else ""
    print(f"  k={k}: DB={db:.4f}{marker}")

model, _ = models[best_k]
labels = synthetic_labels(spec)
hit = sum(
    int(np.bincount(labels[model.assignments == c]).max())
    for c in range(model.k)
    if np.any(model.assignments == c)
)
print(f"assignment purity vs. generator labels: {hit / embeddings.n_samples:.3f}")

scores = score(embeddings, model)
print(
    f"\nprototypicality: min={scores.normalized.min():.3f} "
    f"median={np.median(scores.normalized):.3f} max={scores.normalized.max():.3f}"
)

schedule = build_schedule(
    scores, mode="tau_range", start=0.07, end=0.6, total_epochs=8, master_seed=7
)
print("\nepoch  tau     |pool|/N   share of draws with d-hat < 0.2")
for entry in schedule.entries:
    dist = build_distribution(scores, entry.tau)
    indices = draw_epoch(
        dist, EpochDrawSpec(epoch=entry.epoch, n_draws=2000, master_seed=7)
    ).astype(np.int64)
    proto_share = float((scores.normalized[indices] < 0.2).mean())
    print(
        f"  {entry.epoch}     {entry.tau:.3f}   {entry.effective_fraction:.3f}      "
        f"{proto_share:.3f}"
    )
print("\nlow temperatures concentrate draws on prototypical samples;")
print("annealing widens the pool toward the uniform 1 - 1/e ceiling.")
