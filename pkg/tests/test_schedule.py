"""Effective dataset size, temperature inversion, and annealing schedules."""

import json
import math

import numpy as np
import pytest

from proto_curriculum import (
    ConfigError,
    DegenerateDistributionError,
    PrototypicalityScores,
    TAU_INF,
    UNIFORM_LIMIT,
    build_distribution,
    build_schedule,
    distribution_from_probs,
    effective_fraction,
    effective_size,
    load_schedule,
    monte_carlo_effective_size,
    save_schedule,
    schedule_curve_csv,
    softmax_probs,
    solve_tau,
)


def scores_from(dhat):
    arr = np.asarray(dhat, dtype=np.float32)
    return PrototypicalityScores(
        normalized=arr,
        raw=arr,
        cluster_of=np.zeros(arr.size, dtype=np.uint32),
        per_cluster_min=np.array([0.0]),
        per_cluster_max=np.array([1.0]),
    )


@pytest.fixture(scope="module")
def ten_k_scores():
    rng = np.random.default_rng(314)
    return scores_from(rng.random(10_000))


class TestEffectiveSize:
    def test_uniform_million(self):
        n = 1_000_000
        probs = np.full(n, 1.0 / n)
        frac = effective_size(probs, n) / n
        assert frac == pytest.approx(1.0 - (1.0 - 1.0 / n) ** n, abs=1e-9)
        assert round(frac, 3) == 0.632

    def test_two_point_closed_form(self):
        assert effective_size(np.array([0.5, 0.5]), 2) == pytest.approx(1.5, abs=1e-12)

    def test_degenerate_mass(self):
        assert effective_size(np.array([1.0, 0.0]), 2) == pytest.approx(1.0, abs=1e-12)

    def test_bounded_by_draws_and_population(self):
        rng = np.random.default_rng(21)
        for _ in range(20):
            w = rng.random(int(rng.integers(2, 500)))
            p = w / w.sum()
            for n_draws in [1, 3, p.size, 4 * p.size]:
                value = effective_size(p, n_draws)
                assert value <= min(n_draws, p.size) + 1e-9

    def test_domain_errors(self):
        with pytest.raises(ConfigError):
            effective_size(np.array([0.5, 0.6]), 2)  # sums to 1.1
        with pytest.raises(ConfigError):
            effective_size(np.array([-0.1, 1.1]), 2)
        with pytest.raises(ConfigError):
            effective_size(np.array([0.5, 0.5]), 0)

    def test_approaches_uniform_limit(self):
        n = 100_000
        d = np.random.default_rng(5).random(n).astype(np.float32)
        frac = effective_fraction(scores_from(d), 1e6)
        assert abs(frac - UNIFORM_LIMIT) < 2.0 / n + 1e-6

    def test_strictly_increasing_in_tau(self, ten_k_scores):
        taus = np.geomspace(0.01, 100.0, 50)
        fracs = [effective_fraction(ten_k_scores, t) for t in taus]
        assert all(b > a for a, b in zip(fracs, fracs[1:]))


class TestMonteCarlo:
    def test_uniform_matches_analytic(self):
        n = 1000
        dist = distribution_from_probs(np.full(n, 1.0 / n))
        analytic = effective_size(dist.probs, n)
        mean, stderr = monte_carlo_effective_size(dist, n, trials=200, seed=77)
        assert stderr > 0
        assert abs(mean - analytic) <= 3 * stderr

    def test_point_mass(self):
        dist = distribution_from_probs(np.array([1.0, 0.0]))
        mean, stderr = monte_carlo_effective_size(dist, 5, trials=50, seed=1)
        assert mean == 1.0
        assert stderr == 0.0

    def test_two_uniform(self):
        dist = distribution_from_probs(np.array([0.5, 0.5]))
        mean, stderr = monte_carlo_effective_size(dist, 2, trials=10_000, seed=9)
        assert abs(mean - 1.5) <= 3 * stderr

    def test_trials_validated(self):
        dist = distribution_from_probs(np.array([0.5, 0.5]))
        with pytest.raises(ConfigError):
            monte_carlo_effective_size(dist, 2, trials=0, seed=0)


class TestSolveTau:
    def test_round_trip(self, ten_k_scores):
        f = effective_fraction(ten_k_scores, 0.2)
        solution = solve_tau(ten_k_scores, f)
        assert abs(solution.tau - 0.2) / 0.2 < 1e-3
        assert not solution.saturated

    def test_saturation_above_uniform_limit(self, ten_k_scores):
        solution = solve_tau(ten_k_scores, UNIFORM_LIMIT + 0.01)
        assert solution.saturated
        assert solution.tau == 1e4

    def test_below_range_reports_bracket(self, ten_k_scores):
        with pytest.raises(ConfigError, match="achievable range"):
            solve_tau(ten_k_scores, 1e-9)

    def test_degenerate_scores_match_constant(self):
        flat = scores_from(np.full(100, 0.5))
        constant = effective_fraction(flat, 1.0)
        with pytest.warns(RuntimeWarning, match="degenerate"):
            solution = solve_tau(flat, constant)
        assert solution.tau == pytest.approx(0.5 * (1e-4 + 1e4))

    def test_degenerate_scores_mismatch_errors(self):
        flat = scores_from(np.full(100, 0.5))
        with pytest.raises(DegenerateDistributionError):
            solve_tau(flat, 0.1)


class TestBuildSchedule:
    def test_tau_range_endpoints_exact(self, ten_k_scores):
        sched = build_schedule(
            ten_k_scores, "tau_range", 0.07, 0.6, 800, master_seed=1
        )
        assert sched.entries[0].tau == 0.07
        assert sched.entries[-1].tau == 0.6

    def test_tau_range_midpoint_matches_cosine(self, ten_k_scores):
        total = 800
        sched = build_schedule(
            ten_k_scores, "tau_range", 0.07, 0.6, total, master_seed=1
        )
        e = 400
        expected = 0.07 + (0.6 - 0.07) * (1 - math.cos(math.pi * e / (total - 1))) / 2
        assert sched.entries[e].tau == pytest.approx(expected, abs=1e-12)

    def test_single_epoch_uses_end(self, ten_k_scores):
        sched = build_schedule(ten_k_scores, "tau_range", 0.07, 0.6, 1, master_seed=1)
        assert len(sched.entries) == 1
        assert sched.entries[0].tau == 0.6

    def test_tau_range_monotone(self, ten_k_scores):
        sched = build_schedule(ten_k_scores, "tau_range", 0.07, 0.6, 40, master_seed=3)
        taus = [e.tau for e in sched.entries]
        fracs = [e.effective_fraction for e in sched.entries]
        assert all(b >= a for a, b in zip(taus, taus[1:]))
        assert all(b >= a for a, b in zip(fracs, fracs[1:]))

    def test_effective_size_mode_monotone(self, ten_k_scores):
        sched = build_schedule(
            ten_k_scores, "effective_size", 0.1, 0.63, 10, master_seed=3
        )
        taus = [e.tau for e in sched.entries]
        fracs = [e.effective_fraction for e in sched.entries]
        assert all(b >= a for a, b in zip(taus, taus[1:]))
        assert all(b >= a for a, b in zip(fracs, fracs[1:]))
        assert fracs[0] == pytest.approx(0.1, abs=1e-3)

    def test_epoch_seeds_recorded(self, ten_k_scores):
        sched = build_schedule(ten_k_scores, "tau_range", 0.07, 0.6, 5, master_seed=9)
        seeds = [e.epoch_seed for e in sched.entries]
        assert len(set(seeds)) == 5

    def test_solver_errors_carry_epoch_index(self, ten_k_scores):
        # start far below what the bracket bottom can reach
        with pytest.raises(ConfigError, match="epoch 0"):
            build_schedule(
                ten_k_scores, "effective_size", 1e-9, 0.6, 10, master_seed=1
            )

    def test_invalid_ranges(self, ten_k_scores):
        with pytest.raises(ConfigError):
            build_schedule(ten_k_scores, "tau_range", 0.6, 0.07, 10, master_seed=1)
        with pytest.raises(ConfigError):
            build_schedule(ten_k_scores, "effective_size", 0.1, 0.9, 10, master_seed=1)
        with pytest.raises(ConfigError):
            build_schedule(ten_k_scores, "nope", 0.1, 0.2, 10, master_seed=1)
        with pytest.raises(ConfigError):
            build_schedule(ten_k_scores, "tau_range", 0.07, 0.6, 0, master_seed=1)


class TestSchedulePersistence:
    def test_json_round_trip(self, ten_k_scores, tmp_path):
        sched = build_schedule(
            ten_k_scores, "tau_range", 0.07, 0.6, 7, master_seed=(1 << 63) + 12345
        )
        path = tmp_path / "schedule.json"
        save_schedule(path, sched, config_hash="x")
        again = load_schedule(path)
        assert again.mode == sched.mode
        assert again.master_seed == sched.master_seed
        assert again.n_draws == sched.n_draws
        for a, b in zip(sched.entries, again.entries):
            assert a == b

    def test_seeds_serialized_as_strings(self, ten_k_scores, tmp_path):
        sched = build_schedule(ten_k_scores, "tau_range", 0.07, 0.6, 2, master_seed=5)
        path = tmp_path / "schedule.json"
        save_schedule(path, sched)
        doc = json.loads(path.read_text())
        assert isinstance(doc["master_seed"], str)
        assert all(isinstance(e["epoch_seed"], str) for e in doc["entries"])

    def test_curve_csv(self, ten_k_scores):
        sched = build_schedule(ten_k_scores, "tau_range", 0.07, 0.6, 4, master_seed=5)
        lines = schedule_curve_csv(sched).strip().splitlines()
        assert lines[0] == "epoch,tau,effective_fraction"
        assert len(lines) == 5
        fracs = [float(line.split(",")[2]) for line in lines[1:]]
        assert all(b >= a for a, b in zip(fracs, fracs[1:]))


class TestAnalyticVsMonteCarloSweep:
    def test_random_fixtures_agree(self):
        rng = np.random.default_rng(2718)
        taus = [0.05, 0.2, 1.0, TAU_INF]
        for trial in range(8):
            n = int(rng.integers(200, 2000))
            scores = scores_from(rng.random(n))
            tau = taus[trial % len(taus)]
            dist = build_distribution(scores, tau)
            analytic = effective_size(dist.probs, n)
            mean, stderr = monte_carlo_effective_size(
                dist, n, trials=200, seed=1000 + trial
            )
            assert abs(mean - analytic) <= 3 * stderr
