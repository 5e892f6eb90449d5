"""Annealing curves: how temperature maps to the touched fraction of the data.

Builds the default 0.07 -> 0.6 cosine schedule plus an effective-size-driven
schedule on the same scores and writes both curves to CSV for plotting
(epoch, tau, effective_fraction rows).

Run from the repo root:  python demos/02_annealing_curve.py
"""

import pathlib
import sys

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parents[1] / "src"))

import numpy as np

from proto_curriculum import (
    PrototypicalityScores,
    UNIFORM_LIMIT,
    build_schedule,
    schedule_curve_csv,
)

rng = np.random.default_rng(3)
dhat = rng.beta(2.0, 2.0, size=20_000).astype(np.float32)
scores = PrototypicalityScores(
    normalized=dhat,
    raw=dhat,
    cluster_of=np.zeros(dhat.size, dtype=np.uint32),
    per_cluster_min=np.array([0.0]),
    per_cluster_max=np.array([1.0]),
)

out_dir = pathlib.Path(__file__).resolve().parent / "out"
out_dir.mkdir(exist_ok=True)

for mode, start, end in [
    ("tau_range", 0.07, 0.6),
    ("effective_size", 0.15, UNIFORM_LIMIT),
]:
    schedule = build_schedule(
        scores, mode=mode, start=start, end=end, total_epochs=100, master_seed=11
    )
    path = out_dir / f"curve_{mode}.csv"
    path.write_text(schedule_curve_csv(schedule))
    mid = schedule.entries[50]
    print(f"{mode}: start={start} end={end}")
    print(
        f"  epoch 0:  tau={schedule.entries[0].tau:.4f}  "
        f"fraction={schedule.entries[0].effective_fraction:.4f}"
    )
    print(f"  epoch 50: tau={mid.tau:.4f}  fraction={mid.effective_fraction:.4f}")
    print(
        f"  epoch 99: tau={schedule.entries[-1].tau:.4f}  "
        f"fraction={schedule.entries[-1].effective_fraction:.4f}"
    )
    print(f"  wrote {path}")

print(f"\nuniform-sampling ceiling: 1 - 1/e = {UNIFORM_LIMIT:.6f}")
print("the fraction column approaches it as tau grows; no schedule exceeds it.")
