"""Builds the equivalence-test fixture by driving the producing CLI.

Usage: python3 scripts/build_fixture.py [fixture_dir]

Writes a 10^4-sample synthetic embedding file, a pipeline config, and the
full artifact set (model, scores, schedule, 10 epoch index files) under
<fixture_dir>/out. Skips the work if the artifacts already exist.
"""

import json
import pathlib
import sys

HERE = pathlib.Path(__file__).resolve().parent
REPO = HERE.parents[1]
sys.path.insert(0, str(REPO / "src"))

from proto_curriculum import SyntheticSpec, generate_synthetic, save_embeddings
from proto_curriculum.cli import main

MASTER_SEED = 16045690984833335019  # deliberately above 2^53
TOTAL_EPOCHS = 10


def build(fixture_dir: pathlib.Path) -> None:
    out = fixture_dir / "out"
    done = all(
        (out / f"epoch_{e:04}.idx").exists() for e in range(TOTAL_EPOCHS)
    ) and (out / "scores.bin").exists() and (out / "schedule.json").exists()
    if done:
        print(f"fixture already present in {out}")
        return
    fixture_dir.mkdir(parents=True, exist_ok=True)
    spec = SyntheticSpec(
        n_clusters=10,
        samples_per_cluster=1000,
        dim=16,
        separation=60.0,
        spread=1.5,
        seed=777,
    )
    save_embeddings(fixture_dir / "embeddings.bin", generate_synthetic(spec))
    config = {
        "embeddings_path": "embeddings.bin",
        "format": "binary",
        "kmeans": {"k": 10, "batch_size": 1024, "max_iters": 60, "tol": 1e-4, "seed": 5},
        "schedule": {
            "mode": "tau_range",
            "start": 0.07,
            "end": 0.6,
            "total_epochs": TOTAL_EPOCHS,
        },
        "master_seed": MASTER_SEED,
        "output_dir": "out",
    }
    config_path = fixture_dir / "config.json"
    config_path.write_text(json.dumps(config, indent=2))
    for command in (["cluster"], ["score"], ["schedule"], ["sample", "--all"]):
        code = main([*command, "--config", str(config_path)])
        if code != 0:
            raise SystemExit(f"{command[0]} failed with exit code {code}")
    print(f"fixture written to {out}")


if __name__ == "__main__":
    target = pathlib.Path(sys.argv[1]) if len(sys.argv) > 1 else HERE.parent / "fixture"
    build(target.resolve())
