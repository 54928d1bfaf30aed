"""Checks for the sliding-window rate machinery.

The Monte Carlo sampler is validated against an exact absorbing Markov
chain over success-age patterns, against the geometric answer for a
single required success, and against the negative-binomial limit of an
effectively infinite window.
"""

import math

import numpy as np
import pytest

from rrsp.efficiency import DistanceModel, EfficiencyModel
from rrsp.windowing import (
    DEFAULT_MC_SUCCESS_BUDGET,
    InfeasibleWindowError,
    RateResult,
    WindowExperiment,
    _mc_rate,
    analytic_single_batch_rate,
    asymptotic_rate,
    attempt_success_probability,
    choose_method,
    dc_attempt_success_probability,
    default_partitions,
    fig3_experiment,
    figure3_sweep,
    multiplexing_advantage,
    simulate_window_rate,
    window_success_probability,
)


def plain_experiment(p, q, w, *, k=1, trajectories=1000, seed=0, time_bin_s=1.0):
    """Experiment whose attempt success probability is exactly p.

    Both interaction survivals are 1, so the harmonic mean is 1 and the
    detector efficiency carries all of p.
    """
    return WindowExperiment(
        n=q * k,
        k=k,
        q=q,
        w0=w << (k - 1),
        time_bin_s=time_bin_s,
        distance=DistanceModel(0.0),
        base_model=EfficiencyModel(eta_t=1.0, eta_0=1.0, eta_1=1.0, eta_d=p, n=k),
        trajectories=trajectories,
        seed=seed,
    )


def markov_mean_trials(p, q, w):
    """Exact expected attempts until q successes fit inside w attempts.

    State: sorted ages of still-useful previous successes (at most q-1
    of them, each at most w-2 attempts old).  Each attempt either ages
    everything out by one or records a fresh success; completion is the
    absorbing event where a new success joins q-1 survivors within the
    window.  The expected hitting time solves a small linear system.
    """

    def step_fail(state):
        return tuple(sorted(a + 1 for a in state if a + 1 <= w - 2))

    def step_success(state):
        alive = [a + 1 for a in state if a + 1 <= w - 1]
        if len(alive) + 1 >= q:
            return None
        return tuple(sorted([0] + [a for a in alive if a <= w - 2]))

    start = ()
    index = {start: 0}
    frontier = [start]
    while frontier:
        state = frontier.pop()
        for nxt in (step_fail(state), step_success(state)):
            if nxt is not None and nxt not in index:
                index[nxt] = len(index)
                frontier.append(nxt)
    size = len(index)
    mat = np.eye(size)
    rhs = np.ones(size)
    for state, i in index.items():
        mat[i, index[step_fail(state)]] -= 1.0 - p
        succ = step_success(state)
        if succ is not None:
            mat[i, index[succ]] -= p
    return float(np.linalg.solve(mat, rhs)[index[start]])


class TestMarkovOracle:
    def test_consecutive_pair_closed_form(self):
        # two successes in adjacent attempts: classic mean (1 + p) / p**2
        for p in (0.2, 0.5, 0.8):
            assert markov_mean_trials(p, 2, 2) == pytest.approx(
                (1 + p) / p**2, rel=1e-12
            )

    def test_single_success_is_geometric(self):
        assert markov_mean_trials(0.3, 1, 7) == pytest.approx(1 / 0.3, rel=1e-12)

    def test_matches_asymptotic_hazard_when_rare(self):
        # the hazard approximation carries an O(w*p) bias, so push w*p down
        p, q, w = 0.002, 2, 5
        hazard = p**q * math.comb(w - 1, q - 1)
        assert markov_mean_trials(p, q, w) == pytest.approx(1 / hazard, rel=0.02)


class TestMonteCarlo:
    @pytest.mark.parametrize("p", [0.9, 0.5, 0.1, 0.01])
    def test_single_success_matches_geometric_mean(self, p):
        exp = plain_experiment(p, q=1, w=10, seed=42)
        result = simulate_window_rate(exp)
        assert result.method == "monte-carlo"
        # q = 1 draws one geometric sample per trajectory
        sigma = math.sqrt((1 - p) / p**2 / exp.trajectories)
        assert abs(result.mean_trials - 1 / p) < 3 * max(sigma, 1e-9)
        assert result.rate_hz == pytest.approx(
            1.0 / (result.mean_trials * exp.attempt_duration_s)
        )

    @pytest.mark.parametrize(
        "p,q,w",
        [(0.5, 2, 2), (0.3, 2, 5), (0.5, 3, 4), (0.7, 2, 3)],
    )
    def test_matches_markov_oracle(self, p, q, w):
        exp = plain_experiment(p, q=q, w=w, seed=7, trajectories=2000)
        result = simulate_window_rate(exp)
        expected = markov_mean_trials(p, q, w)
        assert abs(result.mean_trials - expected) < 3 * result.stderr

    def test_huge_window_becomes_negative_binomial(self):
        # w far beyond any plausible waiting time: mean attempts -> q / p
        exp = plain_experiment(0.5, q=2, w=1_000_000, seed=11)
        result = simulate_window_rate(exp)
        assert abs(result.mean_trials - 4.0) < 3 * result.stderr

    def test_seed_reproducibility(self):
        exp = plain_experiment(0.3, q=2, w=6, seed=99)
        first = simulate_window_rate(exp)
        second = simulate_window_rate(exp)
        assert first.mean_trials == second.mean_trials
        assert first.stderr == second.stderr

    def test_different_seeds_differ(self):
        a = simulate_window_rate(plain_experiment(0.3, q=2, w=6, seed=1))
        b = simulate_window_rate(plain_experiment(0.3, q=2, w=6, seed=2))
        assert a.mean_trials != b.mean_trials

    def test_shrinking_window_cannot_speed_completion(self):
        # same seed couples the success times draw by draw, so a stricter
        # window can only push the completion later
        wide = simulate_window_rate(plain_experiment(0.3, q=3, w=50, seed=5))
        narrow = simulate_window_rate(plain_experiment(0.3, q=3, w=5, seed=5))
        assert narrow.mean_trials >= wide.mean_trials

    def test_success_budget_exhaustion_raises(self):
        exp = plain_experiment(0.05, q=2, w=2, seed=123, trajectories=50)
        with pytest.raises(RuntimeError):
            simulate_window_rate(exp, max_successes_per_trajectory=2)

    def test_vanishing_probability_rejected(self):
        exp = fig3_experiment(2, 1, 2, 3000.0)
        with pytest.raises(ValueError):
            simulate_window_rate(exp)


class TestAnalyticRoutes:
    def test_single_batch_rate_is_exact(self):
        exp = plain_experiment(0.25, q=1, w=10, time_bin_s=2.0)
        result = analytic_single_batch_rate(exp)
        assert result.mean_trials == pytest.approx(4.0)
        assert result.rate_hz == pytest.approx(0.25 / 2.0)
        assert result.stderr is None
        assert result.method == "analytic-q1"

    def test_single_batch_rate_rejects_multiple_successes(self):
        with pytest.raises(ValueError):
            analytic_single_batch_rate(plain_experiment(0.5, q=2, w=4))

    def test_asymptotic_hazard_small_case(self):
        exp = plain_experiment(0.01, q=2, w=2000)
        result = asymptotic_rate(exp)
        hazard = 0.01**2 * math.comb(1999, 1)
        assert result.rate_hz == pytest.approx(hazard, rel=1e-12)
        assert result.mean_trials == pytest.approx(1 / hazard, rel=1e-12)
        assert result.method == "asymptotic"

    def test_asymptotic_matches_geometric_for_single_success(self):
        exp = plain_experiment(0.2, q=1, w=500, time_bin_s=3.0)
        assert asymptotic_rate(exp).rate_hz == pytest.approx(0.2 / 3.0, rel=1e-12)

    def test_asymptotic_survives_extreme_exponents(self):
        # direct p**q underflows; the log-space fallback must not
        p, q, w = 1e-8, 50, 1600
        from rrsp.windowing import _asymptotic_rate

        result = _asymptotic_rate(p, q, w, 1.0)
        expected = q * math.log(p) + (
            math.lgamma(w) - math.lgamma(q) - math.lgamma(w - q + 1)
        )
        assert math.log(result.rate_hz) == pytest.approx(expected, rel=1e-12)


class TestAttemptProbability:
    def test_harmonic_mean_formula(self):
        model = EfficiencyModel(eta_t=1.0, eta_0=0.8, eta_1=0.4, eta_d=0.7, n=2)
        exp = WindowExperiment(
            n=2,
            k=2,
            q=1,
            w0=8,
            time_bin_s=1e-6,
            distance=DistanceModel(0.0, eta_t_intrinsic=0.5),
            base_model=model,
        )
        harm = 2 * 0.8 * 0.4 / (0.8 + 0.4)
        assert attempt_success_probability(exp) == pytest.approx(
            0.5 * 0.7 * harm**2, rel=1e-14
        )

    def test_long_distance_defaults_at_zero_length(self):
        exp = fig3_experiment(1, 1, 1, 0.0)
        eta_1 = 0.9 * 0.9025
        harm = 2 * 0.9 * eta_1 / (0.9 + eta_1)
        expected = 0.9 * 0.9 * harm
        assert attempt_success_probability(exp) == pytest.approx(expected, rel=1e-14)
        assert expected == pytest.approx(0.69164, abs=5e-5)

    def test_ten_decibels_per_fifty_km(self):
        near = attempt_success_probability(fig3_experiment(2, 1, 2, 0.0))
        far = attempt_success_probability(fig3_experiment(2, 1, 2, 50.0))
        assert far == pytest.approx(near / 10.0, rel=1e-12)

    def test_dc_baseline_probability(self):
        p = dc_attempt_success_probability(DistanceModel(0.0, eta_t_intrinsic=0.9))
        assert p == pytest.approx(0.9 * 0.9 * (38.0 / 39.0) / 2.0, rel=1e-14)


class TestExperimentValidation:
    def test_window_floors_odd_budgets(self):
        assert plain_experiment(0.5, q=1, w=1000, k=2).window == 1000
        exp = WindowExperiment(
            n=3,
            k=3,
            q=1,
            w0=2001,
            time_bin_s=1.0,
            distance=DistanceModel(0.0),
            base_model=EfficiencyModel(1.0, 1.0, 1.0, 0.5, n=3),
        )
        assert exp.window == 500
        assert exp.attempt_duration_s == pytest.approx(4.0)

    def test_window_shorter_than_required_successes(self):
        with pytest.raises(InfeasibleWindowError):
            plain_experiment(0.5, q=2, w=1)

    def test_infeasible_error_is_a_value_error(self):
        assert issubclass(InfeasibleWindowError, ValueError)

    @pytest.mark.parametrize("field,value", [("n", 0), ("k", 0), ("q", 0), ("w0", 0)])
    def test_positive_integer_fields(self, field, value):
        kwargs = dict(
            n=1,
            k=1,
            q=1,
            w0=10,
            time_bin_s=1.0,
            distance=DistanceModel(0.0),
            base_model=EfficiencyModel(1.0, 1.0, 1.0, 0.5, n=1),
        )
        kwargs[field] = value
        with pytest.raises(ValueError):
            WindowExperiment(**kwargs)

    def test_partition_must_multiply_out(self):
        with pytest.raises(ValueError):
            WindowExperiment(
                n=3,
                k=2,
                q=2,
                w0=10,
                time_bin_s=1.0,
                distance=DistanceModel(0.0),
                base_model=EfficiencyModel(1.0, 1.0, 1.0, 0.5, n=2),
            )

    def test_base_model_size_must_match_batch(self):
        with pytest.raises(ValueError):
            WindowExperiment(
                n=2,
                k=2,
                q=1,
                w0=10,
                time_bin_s=1.0,
                distance=DistanceModel(0.0),
                base_model=EfficiencyModel(1.0, 1.0, 1.0, 0.5, n=1),
            )

    def test_transmission_must_live_in_distance_model(self):
        with pytest.raises(ValueError):
            WindowExperiment(
                n=1,
                k=1,
                q=1,
                w0=10,
                time_bin_s=1.0,
                distance=DistanceModel(0.0),
                base_model=EfficiencyModel(0.9, 1.0, 1.0, 0.5, n=1),
            )

    def test_seed_and_trajectory_bounds(self):
        with pytest.raises(ValueError):
            plain_experiment(0.5, q=1, w=10, trajectories=0)
        with pytest.raises(ValueError):
            plain_experiment(0.5, q=1, w=10, seed=2**64)

    def test_rate_result_rejects_unknown_method(self):
        with pytest.raises(ValueError):
            RateResult(1.0, 1.0, None, "guesswork")


class TestWindowSuccessProbability:
    @pytest.mark.parametrize("p", [0.1, 0.5, 0.9])
    @pytest.mark.parametrize("q,w", [(1, 3), (2, 5), (3, 10)])
    def test_matches_direct_binomial_tail(self, p, q, w):
        direct = sum(
            math.comb(w, j) * p**j * (1 - p) ** (w - j) for j in range(q, w + 1)
        )
        assert window_success_probability(p, q, w) == pytest.approx(direct, rel=1e-12)

    def test_edges(self):
        assert window_success_probability(0.5, 4, 3) == 0.0
        assert window_success_probability(0.0, 1, 5) == 0.0
        assert window_success_probability(1.0, 5, 5) == 1.0

    def test_rejects_bad_arguments(self):
        with pytest.raises(ValueError):
            window_success_probability(1.5, 1, 5)
        with pytest.raises(ValueError):
            window_success_probability(0.5, 0, 5)


class TestMethodChoice:
    def test_single_success_is_always_analytic(self):
        assert choose_method(1e-20, 1, 100, 1000, 10) == "analytic-q1"

    def test_vanishing_probability_goes_asymptotic(self):
        assert choose_method(1e-13, 2, 100, 1000, 10**9) == "asymptotic"

    def test_affordable_case_is_sampled(self):
        assert choose_method(0.5, 2, 2000, 1000, DEFAULT_MC_SUCCESS_BUDGET) == "monte-carlo"

    def test_budget_overrun_goes_asymptotic(self):
        assert choose_method(0.5, 2, 2000, 1000, 10) == "asymptotic"


class TestMultiplexing:
    def test_self_ratio_is_one(self):
        exp = fig3_experiment(3, 1, 3, 20.0)
        assert multiplexing_advantage(exp, exp) == pytest.approx(1.0, rel=1e-12)

    def test_frozen_small_case(self):
        # n=2 with p = 0.01 on both sides: batched pays a factor 2 in
        # duration and loses the C(1999,1) window combinatorics, but
        # needs p once instead of twice
        distance = DistanceModel(0.0, eta_t_intrinsic=0.1)
        base = lambda k: EfficiencyModel(1.0, 1.0, 1.0, 0.1, n=k)
        batched = WindowExperiment(
            n=2, k=2, q=1, w0=2000, time_bin_s=1.0, distance=distance, base_model=base(2)
        )
        serial = WindowExperiment(
            n=2, k=1, q=2, w0=2000, time_bin_s=1.0, distance=distance, base_model=base(1)
        )
        advantage = multiplexing_advantage(batched, serial)
        assert advantage == pytest.approx(100.0 * 0.5 / 1999.0, rel=1e-12)
        ratio = asymptotic_rate(batched).rate_hz / asymptotic_rate(serial).rate_hz
        assert advantage == pytest.approx(ratio, rel=1e-12)

    def test_scaling_with_transmission(self):
        # each factor of 10 in transmission changes the advantage by
        # 10**(n - q): the serial protocol pays it n times, batched q
        def advantage(intrinsic):
            distance = DistanceModel(0.0, eta_t_intrinsic=intrinsic)
            batched = WindowExperiment(
                n=4,
                k=4,
                q=1,
                w0=2000,
                time_bin_s=1.0,
                distance=distance,
                base_model=EfficiencyModel(1.0, 1.0, 1.0, 0.5, n=4),
            )
            serial = WindowExperiment(
                n=4,
                k=1,
                q=4,
                w0=2000,
                time_bin_s=1.0,
                distance=distance,
                base_model=EfficiencyModel(1.0, 1.0, 1.0, 0.5, n=1),
            )
            return multiplexing_advantage(batched, serial)

        assert advantage(0.01) / advantage(0.1) == pytest.approx(10.0**3, rel=1e-9)

    def test_reference_shape_enforced(self):
        batched = fig3_experiment(4, 2, 2, 10.0)
        serial = fig3_experiment(4, 1, 4, 10.0)
        with pytest.raises(ValueError):
            multiplexing_advantage(batched, batched)
        with pytest.raises(ValueError):
            multiplexing_advantage(fig3_experiment(2, 2, 1, 10.0), serial)
        with pytest.raises(ValueError):
            multiplexing_advantage(fig3_experiment(4, 2, 2, 10.0, w0=1000), serial)


class TestFigureSweep:
    def test_partitions_cover_divisors(self):
        assert default_partitions(8) == [(1, 8), (2, 4), (4, 2), (8, 1)]
        assert default_partitions(5) == [(1, 5), (5, 1)]

    def test_row_schema_and_order(self):
        rows = figure3_sweep(2, 2000, [0.0, 50.0], trajectories=200, seed=3)
        assert len(rows) == 2 * 3
        keys = {
            "distance_km",
            "k",
            "q",
            "method",
            "rate_hz",
            "stderr",
            "mean_trials",
            "seed",
            "protocol",
        }
        assert all(set(row) == keys for row in rows)
        assert [row["distance_km"] for row in rows] == [0.0, 0.0, 0.0, 50.0, 50.0, 50.0]
        assert [(row["k"], row["protocol"]) for row in rows[:3]] == [
            (1, "R"),
            (2, "R"),
            (1, "DC"),
        ]
        dc = rows[2]
        assert dc["q"] == 2

    def test_sweep_is_deterministic(self):
        first = figure3_sweep(2, 2000, [0.0, 25.0], trajectories=150, seed=8)
        second = figure3_sweep(2, 2000, [0.0, 25.0], trajectories=150, seed=8)
        assert first == second

    def test_dc_rows_optional(self):
        rows = figure3_sweep(2, 2000, [0.0], trajectories=100, include_dc=False)
        assert all(row["protocol"] == "R" for row in rows)
        assert len(rows) == 2

    def test_rows_get_distinct_seeds(self):
        rows = figure3_sweep(2, 2000, [0.0, 10.0], trajectories=100, seed=4)
        seeds = [row["seed"] for row in rows]
        assert len(set(seeds)) == len(seeds)

    def test_bad_partition_rejected(self):
        with pytest.raises(ValueError):
            figure3_sweep(4, 2000, [0.0], partitions=[(3, 1)])

    def test_dc_needs_room_for_all_successes(self):
        with pytest.raises(InfeasibleWindowError):
            figure3_sweep(4, 3, [0.0], partitions=[])

    def test_mc_rows_match_direct_simulation(self):
        rows = figure3_sweep(
            2, 2000, [0.0], partitions=[(1, 2)], trajectories=200, seed=17,
            include_dc=False,
        )
        (row,) = rows
        assert row["method"] == "monte-carlo"
        exp = fig3_experiment(2, 1, 2, 0.0, trajectories=200, seed=row["seed"])
        direct = simulate_window_rate(exp)
        assert row["rate_hz"] == direct.rate_hz
        assert row["mean_trials"] == direct.mean_trials


class TestMcRateHelper:
    def test_consecutive_pair_against_markov(self):
        result = _mc_rate(0.5, 2, 2, 1.0, trajectories=3000, seed=21)
        assert abs(result.mean_trials - 6.0) < 3 * result.stderr
