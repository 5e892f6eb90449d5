"""Command-line pipeline: cluster -> score -> schedule -> sample, plus verify.

All parameters live in one JSON config file so a run is reproducible from a
single artifact; every output sidecar embeds the config hash. Reports (with
wall-clock timings) go to stdout; files on disk are byte-identical across
reruns of the same config.

Exit codes: 0 ok, 2 config error, 3 data/IO error, 4 verification failure.

Artifacts written to output_dir:
    model.json, model.centroids.bin, model.assignments.bin
    scores.bin, scores.json
    schedule.json, schedule_curve.csv
    epoch_NNNN.idx (one per sampled epoch)

Config schema (JSON object):
    embeddings_path: str            path, relative to the config file
    format: "binary" | "csv"
    normalize_l2: bool = false      opt-in row normalization before clustering
                                     (off by default; upstream feature dumps
                                     are ingested as-is)
    kmeans: {k, batch_size, max_iters, tol, seed, init}
    k_sweep: {k_min, k_max}         optional; sweep overrides kmeans.k
    schedule: {mode, start, end, total_epochs, n_draws}
    master_seed: int
    output_dir: str                 path, relative to the config file
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .clustering import (
    KMeansConfig,
    davies_bouldin,
    fit_minibatch_kmeans,
    load_cluster_model,
    save_cluster_model,
    select_k,
)
from .data_io import l2_normalize, load_embeddings, save_indices
from .errors import ConfigError, FormatError, ValidationError
from .oracles import oracle_alias_mass, oracle_scores
from .prototypicality import load_scores, save_scores, score
from .sampler import build_distribution, draw_with_epoch_seed
from .schedule import (
    build_schedule,
    effective_size,
    load_schedule,
    monte_carlo_effective_size,
    save_schedule,
    schedule_curve_csv,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DATA = 3
EXIT_VERIFY = 4

SCORE_ORACLE_THRESHOLD = 1e-6
ALIAS_MASS_THRESHOLD = 1e-12
MC_SIGMA_THRESHOLD = 3.0


def thread_cap() -> int:
    """Worker cap for parallel subcommands, bounded by PROTO_CURRICULUM_THREADS."""
    cap = os.cpu_count() or 1
    env = os.environ.get("PROTO_CURRICULUM_THREADS")
    if env is not None:
        try:
            requested = int(env)
        except ValueError as exc:
            raise ConfigError(f"PROTO_CURRICULUM_THREADS={env!r} is not an integer") from exc
        if requested < 1:
            raise ConfigError("PROTO_CURRICULUM_THREADS must be >= 1")
        cap = min(cap, requested)
    return cap


@dataclass
class PipelineConfig:
    embeddings_path: Path
    format: str
    normalize_l2: bool
    kmeans: KMeansConfig
    k_sweep: tuple[int, int] | None
    schedule_mode: str
    schedule_start: float
    schedule_end: float
    total_epochs: int
    n_draws: int | None
    master_seed: int
    output_dir: Path
    config_hash: str

    @staticmethod
    def load(path: str | Path) -> "PipelineConfig":
        p = Path(path)
        try:
            raw = json.loads(p.read_text())
        except OSError as exc:
            raise ConfigError(f"{p}: cannot read config: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{p}: invalid JSON: {exc}") from exc
        digest = hashlib.sha256(
            json.dumps(raw, sort_keys=True, separators=(",", ":")).encode()
        ).hexdigest()
        base = p.resolve().parent

        def _resolve(rel: str) -> Path:
            rp = Path(rel)
            return rp if rp.is_absolute() else base / rp

        try:
            kmeans = KMeansConfig(**raw.get("kmeans", {}))
            sweep = raw.get("k_sweep")
            k_sweep = (int(sweep["k_min"]), int(sweep["k_max"])) if sweep else None
            sched = raw["schedule"]
            n_draws = sched.get("n_draws")
            return PipelineConfig(
                embeddings_path=_resolve(raw["embeddings_path"]),
                format=raw.get("format", "binary"),
                normalize_l2=bool(raw.get("normalize_l2", False)),
                kmeans=kmeans,
                k_sweep=k_sweep,
                schedule_mode=sched.get("mode", "tau_range"),
                schedule_start=float(sched.get("start", 0.07)),
                schedule_end=float(sched.get("end", 0.6)),
                total_epochs=int(sched["total_epochs"]),
                n_draws=None if n_draws is None else int(n_draws),
                master_seed=int(raw["master_seed"]),
                output_dir=_resolve(raw["output_dir"]),
                config_hash=digest,
            )
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(f"{p}: bad config: {exc}") from exc


def _load_pipeline_embeddings(config: PipelineConfig):
    matrix = load_embeddings(config.embeddings_path, config.format)
    if config.normalize_l2:
        matrix = l2_normalize(matrix)
    return matrix


def _emit(report: dict) -> None:
    print(json.dumps(report, indent=2))


def cmd_cluster(config: PipelineConfig) -> int:
    started = time.perf_counter()
    embeddings = _load_pipeline_embeddings(config)
    if config.k_sweep is not None:
        k_min, k_max = config.k_sweep
        best_k, models = select_k(embeddings, k_min, k_max, config.kmeans)
        model, db = models[best_k]
        sweep_table = {str(k): float(db_k) for k, (_, db_k) in models.items()}
    else:
        model = fit_minibatch_kmeans(embeddings, config.kmeans)
        db = davies_bouldin(embeddings, model)
        best_k = model.k
        sweep_table = None
    save_cluster_model(config.output_dir, model, db=db, config_hash=config.config_hash)
    report = {
        "k": best_k,
        "db": float(db),
        "seconds": time.perf_counter() - started,
        "config_hash": config.config_hash,
    }
    if sweep_table is not None:
        report["sweep"] = sweep_table
    _emit(report)
    return EXIT_OK


def cmd_score(config: PipelineConfig) -> int:
    started = time.perf_counter()
    embeddings = _load_pipeline_embeddings(config)
    model = load_cluster_model(config.output_dir)
    scores = score(embeddings, model)
    save_scores(config.output_dir, scores, config_hash=config.config_hash)
    hist, _ = np.histogram(scores.normalized, bins=20, range=(0.0, 1.0))
    report = {
        "n_samples": scores.n_samples,
        "k": scores.k,
        "per_cluster_min": [
            None if np.isnan(v) else float(v) for v in scores.per_cluster_min
        ],
        "per_cluster_max": [
            None if np.isnan(v) else float(v) for v in scores.per_cluster_max
        ],
        "histogram_20_bins": hist.tolist(),
        "seconds": time.perf_counter() - started,
        "config_hash": config.config_hash,
    }
    _emit(report)
    return EXIT_OK


def cmd_schedule(config: PipelineConfig) -> int:
    started = time.perf_counter()
    scores = load_scores(config.output_dir)
    schedule = build_schedule(
        scores,
        mode=config.schedule_mode,
        start=config.schedule_start,
        end=config.schedule_end,
        total_epochs=config.total_epochs,
        master_seed=config.master_seed,
        n_draws=config.n_draws,
    )
    save_schedule(config.output_dir / "schedule.json", schedule, config.config_hash)
    (config.output_dir / "schedule_curve.csv").write_text(schedule_curve_csv(schedule))
    report = {
        "mode": schedule.mode,
        "total_epochs": schedule.total_epochs,
        "tau_first": schedule.entries[0].tau,
        "tau_last": schedule.entries[-1].tau,
        "fraction_first": schedule.entries[0].effective_fraction,
        "fraction_last": schedule.entries[-1].effective_fraction,
        "seconds": time.perf_counter() - started,
        "config_hash": config.config_hash,
    }
    _emit(report)
    return EXIT_OK


def epoch_index_filename(epoch: int) -> str:
    return f"epoch_{epoch:04}.idx"


def _sample_one(config: PipelineConfig, scores, schedule, epoch: int) -> None:
    entry = schedule.entry(epoch)
    dist = build_distribution(scores, entry.tau)
    indices = draw_with_epoch_seed(dist, entry.epoch_seed, schedule.n_draws)
    save_indices(config.output_dir / epoch_index_filename(epoch), indices)


def cmd_sample(config: PipelineConfig, epoch: int | None, all_epochs: bool) -> int:
    started = time.perf_counter()
    scores = load_scores(config.output_dir)
    schedule = load_schedule(config.output_dir / "schedule.json")
    if all_epochs:
        epochs = list(range(schedule.total_epochs))
    else:
        if epoch is None:
            raise ConfigError("sample requires --epoch N or --all")
        if not 0 <= epoch < schedule.total_epochs:
            raise ConfigError(
                f"epoch {epoch} out of range [0, {schedule.total_epochs})"
            )
        epochs = [epoch]
    workers = min(thread_cap(), len(epochs))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(lambda e: _sample_one(config, scores, schedule, e), epochs))
    else:
        for e in epochs:
            _sample_one(config, scores, schedule, e)
    _emit(
        {
            "epochs_written": len(epochs),
            "n_draws": schedule.n_draws,
            "seconds": time.perf_counter() - started,
            "config_hash": config.config_hash,
        }
    )
    return EXIT_OK


def cmd_verify(config: PipelineConfig, trials: int) -> int:
    if trials < 1:
        raise ConfigError(f"--trials must be >= 1, got {trials}")
    started = time.perf_counter()
    checks = []
    try:
        embeddings = _load_pipeline_embeddings(config)
        model = load_cluster_model(config.output_dir)
        scores = load_scores(config.output_dir)
        schedule = load_schedule(config.output_dir / "schedule.json")

        reference = oracle_scores(embeddings, model)
        score_err = float(
            np.max(np.abs(scores.normalized.astype(np.float64) - reference.normalized))
        )
        checks.append(
            {
                "name": "scores_vs_oracle_max_error",
                "value": score_err,
                "threshold": SCORE_ORACLE_THRESHOLD,
                "passed": score_err <= SCORE_ORACLE_THRESHOLD,
            }
        )

        subset = sorted(
            {0, schedule.total_epochs // 2, schedule.total_epochs - 1}
        )
        for e in subset:
            entry = schedule.entry(e)
            dist = build_distribution(scores, entry.tau)
            mass_err = float(np.max(np.abs(oracle_alias_mass(dist) - dist.probs)))
            checks.append(
                {
                    "name": "alias_mass_max_error",
                    "epoch": e,
                    "value": mass_err,
                    "threshold": ALIAS_MASS_THRESHOLD,
                    "passed": mass_err <= ALIAS_MASS_THRESHOLD,
                }
            )
            analytic = effective_size(dist.probs, schedule.n_draws)
            mc_mean, mc_stderr = monte_carlo_effective_size(
                dist,
                schedule.n_draws,
                trials=trials,
                seed=config.master_seed ^ (0xE50000 + e),
            )
            gap = abs(analytic - mc_mean)
            allowed = MC_SIGMA_THRESHOLD * mc_stderr + 1e-9
            checks.append(
                {
                    "name": "effective_size_vs_monte_carlo",
                    "epoch": e,
                    "analytic": analytic,
                    "monte_carlo_mean": mc_mean,
                    "monte_carlo_stderr": mc_stderr,
                    "z_threshold": MC_SIGMA_THRESHOLD,
                    "passed": gap <= allowed,
                }
            )
    except (FormatError, ValidationError, OSError) as exc:
        _emit(
            {
                "passed": False,
                "error": str(exc),
                "checks": checks,
                "seconds": time.perf_counter() - started,
            }
        )
        return EXIT_VERIFY
    passed = all(c["passed"] for c in checks)
    _emit(
        {
            "passed": passed,
            "trials": trials,
            "checks": checks,
            "seconds": time.perf_counter() - started,
            "config_hash": config.config_hash,
        }
    )
    return EXIT_OK if passed else EXIT_VERIFY


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="proto-curriculum",
        description=(
            "Curriculum sampling over precomputed embeddings: cluster, score "
            "prototypicality, build an annealing schedule, and emit per-epoch "
            "sample-index streams."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def _with_config(p):
        p.add_argument("--config", required=True, help="path to the JSON pipeline config")
        return p

    _with_config(sub.add_parser("cluster", help="fit k-means (or sweep k) and persist the model"))
    _with_config(sub.add_parser("score", help="compute and persist prototypicality scores"))
    _with_config(sub.add_parser("schedule", help="build and persist the annealing schedule + CSV curve"))
    sample = _with_config(sub.add_parser("sample", help="write per-epoch index files"))
    group = sample.add_mutually_exclusive_group(required=True)
    group.add_argument("--epoch", type=int, help="single epoch to draw")
    group.add_argument("--all", action="store_true", help="draw every scheduled epoch")
    verify = _with_config(sub.add_parser("verify", help="re-check artifacts against brute-force oracles"))
    verify.add_argument("--trials", type=int, default=200, help="Monte-Carlo trials per checked epoch")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        config = PipelineConfig.load(args.config)
        if args.command == "cluster":
            return cmd_cluster(config)
        if args.command == "score":
            return cmd_score(config)
        if args.command == "schedule":
            return cmd_schedule(config)
        if args.command == "sample":
            return cmd_sample(config, args.epoch, args.all)
        if args.command == "verify":
            return cmd_verify(config, args.trials)
        raise ConfigError(f"unknown command {args.command!r}")
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (FormatError, ValidationError, OSError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA


def entry() -> None:
    sys.exit(main())
