"""Temperature softmax over prototypicality scores and O(1) categorical draws.

The probability of sample i at temperature tau is

    P(i, tau) = exp(-d_i / tau) / sum_j exp(-d_j / tau)

with the minimum d subtracted before exponentiation so the largest term is
exactly 1 (no overflow, and underflow only collapses negligible tails).
tau = inf is a uniform-distribution marker: probs are exactly 1/N.

Draws use Walker/Vose alias tables (O(1) per draw) fed by the counter-based
stream in rng.py: draw t of epoch e consumes counters 2t and 2t+1 of the
(master_seed, e) stream, so any worker can produce any slice of an epoch.

Everything on this path sticks to the reproducible kernels in numerics.py;
the order of every floating-point operation is part of the contract and is
mirrored by external consumers of the persisted artifacts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .numerics import pairwise_sum_pow2, portable_exp_array
from .prototypicality import PrototypicalityScores
from .rng import derive_epoch_seed, stream_u64, u64_to_unit

TAU_INF = math.inf


@dataclass
class SamplingDistribution:
    tau: float
    probs: np.ndarray       # (n,) float64, sums to 1
    threshold: np.ndarray   # (n,) float64 alias acceptance thresholds
    alias: np.ndarray       # (n,) int64 alias partners

    def __post_init__(self):
        for arr in (self.probs, self.threshold, self.alias):
            arr.setflags(write=False)

    @property
    def n(self) -> int:
        return int(self.probs.size)


@dataclass(frozen=True)
class EpochDrawSpec:
    epoch: int
    n_draws: int
    master_seed: int

    def __post_init__(self):
        if self.epoch < 0:
            raise ConfigError(f"epoch must be >= 0, got {self.epoch}")
        if self.n_draws < 1:
            raise ConfigError(f"n_draws must be >= 1, got {self.n_draws}")


def softmax_probs(normalized_scores: np.ndarray, tau: float) -> np.ndarray:
    """Float64 sampling probabilities for one temperature.

    Fixed operation order: widen float32 scores to float64, subtract the
    minimum, divide by tau, exponentiate with the portable kernel, normalize
    by the power-of-two pairwise sum.
    """
    d = np.asarray(normalized_scores, dtype=np.float64)
    if d.size == 0:
        raise ConfigError("scores must be nonempty")
    n = d.size
    if math.isinf(tau) and tau > 0:
        return np.full(n, 1.0 / n)
    if not (tau > 0) or math.isnan(tau):
        raise ConfigError(f"tau must be positive or inf, got {tau}")
    shifted = d - float(d.min())
    exponents = -(shifted / tau)
    weights = portable_exp_array(exponents)
    total = pairwise_sum_pow2(weights)
    return weights / total


def build_alias_table(probs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Vose alias construction. Deterministic: stacks are LIFO over index order."""
    p = np.asarray(probs, dtype=np.float64)
    n = p.size
    scaled = (p * n).tolist()
    threshold = [1.0] * n
    alias = list(range(n))
    small = []
    large = []
    for i in range(n):
        if scaled[i] < 1.0:
            small.append(i)
        else:
            large.append(i)
    while small and large:
        l = small.pop()
        g = large.pop()
        threshold[l] = scaled[l]
        alias[l] = g
        scaled[g] = (scaled[g] + scaled[l]) - 1.0
        if scaled[g] < 1.0:
            small.append(g)
        else:
            large.append(g)
    # leftovers are numerically 1 within rounding
    return (
        np.asarray(threshold, dtype=np.float64),
        np.asarray(alias, dtype=np.int64),
    )


def build_distribution(
    scores: PrototypicalityScores, tau: float
) -> SamplingDistribution:
    """Softmax probabilities plus an alias table, ready for constant-time draws."""
    probs = softmax_probs(scores.normalized, tau)
    threshold, alias = build_alias_table(probs)
    return SamplingDistribution(tau=tau, probs=probs, threshold=threshold, alias=alias)


def distribution_from_probs(probs: np.ndarray, tau: float = TAU_INF) -> SamplingDistribution:
    """Wrap an explicit probability vector (tests, verification, plumbing)."""
    p = np.asarray(probs, dtype=np.float64)
    if p.size == 0:
        raise ConfigError("probs must be nonempty")
    if np.any(p < 0) or np.any(p > 1):
        raise ConfigError("probabilities must lie in [0, 1]")
    if abs(float(p.sum()) - 1.0) > 1e-9:
        raise ConfigError(f"probabilities sum to {float(p.sum())}, not 1")
    threshold, alias = build_alias_table(p)
    return SamplingDistribution(tau=tau, probs=p, threshold=threshold, alias=alias)


def draw_epoch(dist: SamplingDistribution, spec: EpochDrawSpec) -> np.ndarray:
    """n_draws i.i.d. indices; bit-identical for a given (master_seed, epoch)."""
    epoch_seed = derive_epoch_seed(spec.master_seed, spec.epoch)
    return draw_with_epoch_seed(dist, epoch_seed, spec.n_draws)


def draw_with_epoch_seed(
    dist: SamplingDistribution, epoch_seed: int, n_draws: int
) -> np.ndarray:
    """Draw using an already-derived epoch seed (as recorded in schedules)."""
    n = dist.n
    counters = np.arange(2 * n_draws, dtype=np.uint64)
    u = u64_to_unit(stream_u64(epoch_seed, counters))
    u_slot = u[0::2]
    u_accept = u[1::2]
    slots = np.minimum(np.floor(u_slot * n).astype(np.int64), n - 1)
    take = u_accept < dist.threshold[slots]
    return np.where(take, slots, dist.alias[slots]).astype(np.uint64)
