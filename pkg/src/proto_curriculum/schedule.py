"""Effective dataset size, its inversion to a temperature, and epoch schedules.

Drawing n times with replacement from probabilities p touches

    E[#unique] = sum_i [1 - (1 - p_i)^n]

which is strictly increasing in tau for any non-degenerate score vector and
approaches N*(1 - 1/e) as tau -> inf (drawing N times from N samples). There
is no closed-form inverse, so temperatures are recovered by bisection.

Schedules ramp either tau directly or the effective-size fraction with a
cosine ease from `start` to `end` over the training epochs.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import NamedTuple

import numpy as np

from .errors import ConfigError, DegenerateDistributionError, FormatError
from .prototypicality import PrototypicalityScores
from .rng import derive_epoch_seed
from .sampler import SamplingDistribution, draw_with_epoch_seed, softmax_probs

UNIFORM_LIMIT = 1.0 - 1.0 / math.e

DEFAULT_TAU_BRACKET = (1e-4, 1e4)
DEFAULT_FRACTION_TOL = 1e-4
_MAX_BISECT_ITERS = 200


def effective_size(probs: np.ndarray, n_draws: int) -> float:
    """Expected number of unique samples in n_draws with-replacement draws."""
    p = np.asarray(probs, dtype=np.float64)
    if n_draws < 1:
        raise ConfigError(f"n_draws must be >= 1, got {n_draws}")
    if np.any(p < 0) or np.any(p > 1):
        raise ConfigError("probabilities must lie in [0, 1]")
    total = float(p.sum())
    if abs(total - 1.0) > 1e-9:
        raise ConfigError(f"probabilities sum to {total}, not 1")
    # exp(n*log1p(-p)) keeps tiny p accurate where (1-p)**n loses everything
    with np.errstate(divide="ignore"):
        miss = n_draws * np.log1p(-p)
    return float(np.sum(-np.expm1(miss)))


def effective_fraction(
    scores: PrototypicalityScores, tau: float, n_draws: int | None = None
) -> float:
    """effective_size at temperature tau, as a fraction of the dataset."""
    n = scores.n_samples
    draws = n if n_draws is None else n_draws
    probs = softmax_probs(scores.normalized, tau)
    return effective_size(probs, draws) / n


def monte_carlo_effective_size(
    dist: SamplingDistribution,
    n_draws: int,
    trials: int,
    seed: int,
) -> tuple[float, float]:
    """Empirical unique-count mean and standard error over independent trials.

    This is the independent oracle for effective_size: it exercises the actual
    draw path (alias table + counter stream) and counts distinct indices.
    """
    if trials < 1:
        raise ConfigError(f"trials must be >= 1, got {trials}")
    counts = np.empty(trials, dtype=np.float64)
    for t in range(trials):
        epoch_seed = derive_epoch_seed(seed, t)
        draws = draw_with_epoch_seed(dist, epoch_seed, n_draws)
        ordered = np.sort(draws)
        counts[t] = 1 + int(np.count_nonzero(np.diff(ordered)))
    mean = float(counts.mean())
    stderr = float(counts.std(ddof=1) / math.sqrt(trials)) if trials > 1 else 0.0
    return mean, stderr


class TauSolution(NamedTuple):
    tau: float
    fraction: float
    saturated: bool


def solve_tau(
    scores: PrototypicalityScores,
    target_fraction: float,
    n_draws: int | None = None,
    tol: float = DEFAULT_FRACTION_TOL,
    bracket: tuple[float, float] = DEFAULT_TAU_BRACKET,
) -> TauSolution:
    """Invert effective_fraction by bisection on tau.

    Targets above the fraction achievable at the top of the bracket saturate
    there (the tau -> inf regime) instead of erroring; targets below the
    bottom of the bracket are out of range. Degenerate scores (all equal)
    make the fraction constant in tau: the bracket midpoint is returned with
    a warning when the target matches that constant, otherwise it is an error.
    """
    if not tol > 0:
        raise ConfigError(f"tol must be > 0, got {tol}")
    tau_lo, tau_hi = bracket
    if not (0 < tau_lo < tau_hi):
        raise ConfigError(f"invalid tau bracket {bracket}")
    f_lo = effective_fraction(scores, tau_lo, n_draws)
    f_hi = effective_fraction(scores, tau_hi, n_draws)

    if f_hi - f_lo < 1e-12:
        if abs(target_fraction - f_lo) <= tol:
            warnings.warn(
                "degenerate scores: effective fraction does not depend on tau",
                RuntimeWarning,
                stacklevel=2,
            )
            return TauSolution(0.5 * (tau_lo + tau_hi), f_lo, False)
        raise DegenerateDistributionError(
            f"scores have no spread; effective fraction is constant at {f_lo:.6g} "
            f"but target is {target_fraction:.6g}"
        )
    if target_fraction >= f_hi:
        return TauSolution(tau_hi, f_hi, target_fraction > f_hi)
    if target_fraction <= f_lo:
        if f_lo - target_fraction < tol:
            return TauSolution(tau_lo, f_lo, False)
        raise ConfigError(
            f"target fraction {target_fraction:.6g} below achievable range "
            f"[{f_lo:.6g}, {f_hi:.6g}] for bracket {bracket}"
        )

    lo, hi = tau_lo, tau_hi
    mid = 0.5 * (lo + hi)
    f_mid = effective_fraction(scores, mid, n_draws)
    for _ in range(_MAX_BISECT_ITERS):
        if f_mid < target_fraction:
            lo = mid
        else:
            hi = mid
        mid = 0.5 * (lo + hi)
        f_mid = effective_fraction(scores, mid, n_draws)
        if abs(f_mid - target_fraction) < tol and (hi - lo) < 1e-9 * mid:
            break
    return TauSolution(mid, f_mid, False)


@dataclass(frozen=True)
class ScheduleEntry:
    epoch: int
    tau: float
    effective_fraction: float
    epoch_seed: int
    saturated: bool = False


@dataclass
class CurriculumSchedule:
    mode: str                       # "tau_range" | "effective_size"
    total_epochs: int
    master_seed: int
    n_draws: int
    start: float
    end: float
    entries: list[ScheduleEntry] = field(default_factory=list)

    def entry(self, epoch: int) -> ScheduleEntry:
        if not 0 <= epoch < self.total_epochs:
            raise ConfigError(
                f"epoch {epoch} out of range [0, {self.total_epochs})"
            )
        return self.entries[epoch]


def _cosine_value(start: float, end: float, epoch: int, total_epochs: int) -> float:
    # endpoints pinned exactly; the float formula would miss `end` by an ulp
    if total_epochs == 1 or epoch == total_epochs - 1:
        return end
    if epoch == 0:
        return start
    ramp = (1.0 - math.cos(math.pi * epoch / (total_epochs - 1))) / 2.0
    return start + (end - start) * ramp


def build_schedule(
    scores: PrototypicalityScores,
    mode: str,
    start: float,
    end: float,
    total_epochs: int,
    master_seed: int,
    n_draws: int | None = None,
) -> CurriculumSchedule:
    """Cosine-annealed schedule in either tau or effective-size parameterization.

    tau_range mode ramps tau from start to end and evaluates the resulting
    fraction forward; effective_size mode ramps the target fraction and
    recovers tau by bisection (saturating at the uniform limit).
    """
    if total_epochs < 1:
        raise ConfigError(f"total_epochs must be >= 1, got {total_epochs}")
    draws = scores.n_samples if n_draws is None else int(n_draws)
    if draws < 1:
        raise ConfigError(f"n_draws must be >= 1, got {draws}")
    if mode == "tau_range":
        if not (0 < start <= end):
            raise ConfigError(
                f"tau_range needs 0 < start <= end, got start={start}, end={end}"
            )
    elif mode == "effective_size":
        if not (0 < start <= end <= UNIFORM_LIMIT + DEFAULT_FRACTION_TOL):
            raise ConfigError(
                "effective_size needs 0 < start <= end <= 1 - 1/e "
                f"(+tolerance), got start={start}, end={end}"
            )
    else:
        raise ConfigError(f"unknown schedule mode {mode!r}")

    entries: list[ScheduleEntry] = []
    prev_tau = 0.0
    prev_fraction = 0.0
    for epoch in range(total_epochs):
        value = _cosine_value(start, end, epoch, total_epochs)
        saturated = False
        if mode == "tau_range":
            tau = value
            fraction = effective_fraction(scores, tau, draws)
        else:
            try:
                solution = solve_tau(scores, value, draws)
            except (ConfigError, DegenerateDistributionError) as exc:
                raise type(exc)(f"epoch {epoch}: {exc}") from exc
            tau, fraction, saturated = solution
        # monotone projection; inactive unless float jitter bites at the last ulp
        tau = max(tau, prev_tau)
        fraction = max(fraction, prev_fraction)
        prev_tau, prev_fraction = tau, fraction
        entries.append(
            ScheduleEntry(
                epoch=epoch,
                tau=tau,
                effective_fraction=fraction,
                epoch_seed=derive_epoch_seed(master_seed, epoch),
                saturated=saturated,
            )
        )
    return CurriculumSchedule(
        mode=mode,
        total_epochs=total_epochs,
        master_seed=master_seed,
        n_draws=draws,
        start=start,
        end=end,
        entries=entries,
    )


def save_schedule(
    path: str | Path,
    schedule: CurriculumSchedule,
    config_hash: str | None = None,
) -> None:
    """Schedule JSON. 64-bit seeds are decimal strings: JSON numbers lose
    integer precision above 2^53 in JavaScript parsers."""
    doc = {
        "mode": schedule.mode,
        "total_epochs": schedule.total_epochs,
        "master_seed": str(schedule.master_seed),
        "n_draws": schedule.n_draws,
        "params": {"start": schedule.start, "end": schedule.end},
        "entries": [
            {
                "epoch": e.epoch,
                "tau": e.tau,
                "effective_fraction": e.effective_fraction,
                "epoch_seed": str(e.epoch_seed),
                "saturated": e.saturated,
            }
            for e in schedule.entries
        ],
        "config_hash": config_hash,
    }
    Path(path).write_text(json.dumps(doc, indent=2) + "\n")


def load_schedule(path: str | Path) -> CurriculumSchedule:
    try:
        doc = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise FormatError(f"{path}: cannot load schedule: {exc}") from exc
    try:
        entries = [
            ScheduleEntry(
                epoch=int(e["epoch"]),
                tau=float(e["tau"]),
                effective_fraction=float(e["effective_fraction"]),
                epoch_seed=int(e["epoch_seed"]),
                saturated=bool(e.get("saturated", False)),
            )
            for e in doc["entries"]
        ]
        schedule = CurriculumSchedule(
            mode=doc["mode"],
            total_epochs=int(doc["total_epochs"]),
            master_seed=int(doc["master_seed"]),
            n_draws=int(doc["n_draws"]),
            start=float(doc["params"]["start"]),
            end=float(doc["params"]["end"]),
            entries=entries,
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"{path}: malformed schedule JSON: {exc}") from exc
    if len(schedule.entries) != schedule.total_epochs:
        raise FormatError(
            f"{path}: {len(schedule.entries)} entries for "
            f"{schedule.total_epochs} epochs"
        )
    return schedule


def schedule_curve_csv(schedule: CurriculumSchedule) -> str:
    """(epoch, tau, effective_fraction) rows for plotting annealing curves."""
    lines = ["epoch,tau,effective_fraction"]
    for e in schedule.entries:
        lines.append(f"{e.epoch},{e.tau!r},{e.effective_fraction!r}")
    return "\n".join(lines) + "\n"
