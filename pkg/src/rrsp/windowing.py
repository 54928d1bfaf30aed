"""Preparation rates under a sliding coherence window.

Register qubits only stay useful for a limited time, modeled here as a
window of ``w`` attempts: a prepared batch of ``k`` qubits expires once
more than ``w - 1`` further attempts have passed.  Preparing ``n = q*k``
qubits therefore means collecting ``q`` batch successes that are all
younger than the window, and the interesting quantity is the expected
number of attempts until that first happens.

Three evaluation routes are provided: exact Monte Carlo over Bernoulli
attempt sequences (success gaps drawn geometrically, so cost scales
with successes rather than attempts), the exact geometric answer for
``q = 1``, and the scan-statistics asymptotic rate that becomes exact
when completing a window is rare.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .cavity import emission_efficiency, reflection_efficiency
from .efficiency import DistanceModel, EfficiencyModel

__all__ = [
    "InfeasibleWindowError",
    "WindowExperiment",
    "RateResult",
    "DEFAULT_MC_SUCCESS_BUDGET",
    "attempt_success_probability",
    "simulate_window_rate",
    "analytic_single_batch_rate",
    "asymptotic_rate",
    "multiplexing_advantage",
    "window_success_probability",
    "choose_method",
    "fig3_base_model",
    "fig3_experiment",
    "default_partitions",
    "dc_attempt_success_probability",
    "figure3_sweep",
]

#: Total Monte Carlo success draws figure3_sweep will spend per row
#: before falling back to the asymptotic formula.
DEFAULT_MC_SUCCESS_BUDGET = 2_000_000

# below this the geometric sampler risks integer overflow and Monte
# Carlo is pointless anyway; the asymptotic route covers it
_MIN_MC_PROBABILITY = 1e-12


class InfeasibleWindowError(ValueError):
    """The window is shorter than the number of required successes."""


@dataclass(frozen=True)
class WindowExperiment:
    """One rate evaluation: ``q`` batches of ``k`` qubits within a window.

    ``w0`` is the window measured in single-qubit attempts; a batch
    attempt spans ``2**(k-1)`` of those, so the effective window is
    ``floor(w0 / 2**(k-1))`` attempts and each attempt lasts
    ``2**(k-1) * time_bin_s`` seconds.  ``base_model`` holds the
    per-batch interface efficiencies (its ``n`` equals ``k``); fibre
    transmission lives exclusively in ``distance``, so ``base_model``
    must carry ``eta_t = 1``.
    """

    n: int
    k: int
    q: int
    w0: int
    time_bin_s: float
    distance: DistanceModel
    base_model: EfficiencyModel
    trajectories: int = 1000
    seed: int = 0

    def __post_init__(self) -> None:
        for name in ("n", "k", "q", "w0"):
            value = getattr(self, name)
            if not isinstance(value, (int, np.integer)) or value < 1:
                raise ValueError(f"{name} must be a positive integer, got {value!r}")
        if self.n != self.q * self.k:
            raise ValueError(f"need n = q*k, got n={self.n}, q={self.q}, k={self.k}")
        if self.time_bin_s <= 0:
            raise ValueError(f"time_bin_s must be > 0, got {self.time_bin_s!r}")
        if self.base_model.n != self.k:
            raise ValueError(
                f"base_model covers {self.base_model.n} qubits but batches have k={self.k}"
            )
        if self.base_model.eta_t != 1.0:
            raise ValueError(
                "base_model.eta_t must be 1; put transmission into "
                "DistanceModel.eta_t_intrinsic instead so it is not counted twice"
            )
        if self.trajectories < 1:
            raise ValueError(f"trajectories must be >= 1, got {self.trajectories!r}")
        if not 0 <= self.seed < 2**64:
            raise ValueError(f"seed must fit in 64 bits, got {self.seed!r}")
        if self.window < self.q:
            raise InfeasibleWindowError(
                f"window of {self.window} attempts cannot hold q={self.q} successes"
            )

    @property
    def window(self) -> int:
        """Effective window in batch attempts."""
        return self.w0 >> (self.k - 1)

    @property
    def attempt_duration_s(self) -> float:
        """Wall-clock span of one batch attempt (``2**k`` time-bins vs 2)."""
        return (1 << (self.k - 1)) * self.time_bin_s


@dataclass(frozen=True)
class RateResult:
    """Rate estimate plus how it was obtained.

    ``stderr`` is the standard error of ``mean_trials`` (the directly
    estimated quantity) and is set only for the monte-carlo method.
    """

    mean_trials: float
    rate_hz: float
    stderr: float | None
    method: str

    def __post_init__(self) -> None:
        if self.method not in ("monte-carlo", "analytic-q1", "asymptotic"):
            raise ValueError(f"unknown method {self.method!r}")
        if self.rate_hz < 0:
            raise ValueError(f"rate_hz must be >= 0, got {self.rate_hz!r}")


def attempt_success_probability(exp: WindowExperiment) -> float:
    """Detection probability of one batch attempt at this distance."""
    m = exp.base_model
    total = m.eta_0 + m.eta_1
    harm = 2.0 * m.eta_0 * m.eta_1 / total if total else 0.0
    return exp.distance.eta_t() * m.eta_d * harm**exp.k


def _trajectory_trials(rng, p: float, q: int, w: int, max_successes: int) -> int:
    """Attempt index at which q successes first share a window of w."""
    if q == 1:
        return int(rng.geometric(p))
    carry = np.empty(0, dtype=np.int64)
    base = 0
    drawn = 0
    while drawn < max_successes:
        size = min(8192, max_successes - drawn)
        gaps = rng.geometric(p, size=size).astype(np.int64)
        times = base + np.cumsum(gaps)
        recent = np.concatenate([carry, times])
        if recent.size >= q:
            spans = recent[q - 1 :] - recent[: recent.size - q + 1]
            hits = np.nonzero(spans <= w - 1)[0]
            if hits.size:
                return int(recent[hits[0] + q - 1])
        carry = recent[-(q - 1) :]
        base = int(times[-1])
        drawn += size
    raise RuntimeError(
        f"no completion within {max_successes} successes; "
        "this configuration belongs to asymptotic_rate"
    )


def _mc_rate(
    p: float,
    q: int,
    w: int,
    duration_s: float,
    trajectories: int,
    seed: int,
    max_successes: int = 5_000_000,
) -> RateResult:
    if p < _MIN_MC_PROBABILITY:
        raise ValueError(
            f"attempt success probability {p!r} is too small to sample directly; "
            "use the asymptotic route"
        )
    trials = np.empty(trajectories, dtype=float)
    for idx in range(trajectories):
        key = np.array([seed, idx], dtype=np.uint64)
        rng = np.random.Generator(np.random.Philox(key=key))
        trials[idx] = _trajectory_trials(rng, p, q, w, max_successes)
    mean = float(trials.mean())
    stderr = float(trials.std(ddof=1) / math.sqrt(trajectories)) if trajectories > 1 else 0.0
    return RateResult(mean, 1.0 / (mean * duration_s), stderr, "monte-carlo")


def _analytic_q1_rate(p: float, duration_s: float) -> RateResult:
    if p <= 0.0:
        raise ValueError("attempt success probability is zero; the rate vanishes")
    return RateResult(1.0 / p, p / duration_s, None, "analytic-q1")


def _log_hazard(p: float, q: int, w: int) -> float:
    """Log of the per-attempt completion hazard ``p**q * C(w-1, q-1)``."""
    if p <= 0.0:
        raise ValueError("attempt success probability is zero; the rate vanishes")
    if w < q:
        raise InfeasibleWindowError(f"window of {w} attempts cannot hold q={q} successes")
    log_comb = math.lgamma(w) - math.lgamma(q) - math.lgamma(w - q + 1)
    return q * math.log(p) + log_comb


def _asymptotic_rate(p: float, q: int, w: int, duration_s: float) -> RateResult:
    per_attempt = p**q * float(math.comb(w - 1, q - 1)) if w >= q else 0.0
    if per_attempt == 0.0 or not math.isfinite(per_attempt):
        per_attempt = math.exp(_log_hazard(p, q, w))
    mean = 1.0 / per_attempt if per_attempt > 0.0 else math.inf
    return RateResult(mean, per_attempt / duration_s, None, "asymptotic")


def _auto_rate(
    p: float,
    q: int,
    w: int,
    duration_s: float,
    trajectories: int,
    seed: int,
    success_budget: int,
) -> RateResult:
    method = choose_method(p, q, w, trajectories, success_budget)
    if method == "analytic-q1":
        return _analytic_q1_rate(p, duration_s)
    if method == "monte-carlo":
        return _mc_rate(p, q, w, duration_s, trajectories, seed)
    return _asymptotic_rate(p, q, w, duration_s)


def simulate_window_rate(
    exp: WindowExperiment, *, max_successes_per_trajectory: int = 5_000_000
) -> RateResult:
    """Monte Carlo estimate of the completion rate.

    Each trajectory draws geometric gaps between successes from its own
    counter-based stream keyed by ``(seed, trajectory index)``, so the
    result is reproducible and independent of evaluation order.
    """
    return _mc_rate(
        attempt_success_probability(exp),
        exp.q,
        exp.window,
        exp.attempt_duration_s,
        exp.trajectories,
        exp.seed,
        max_successes_per_trajectory,
    )


def analytic_single_batch_rate(exp: WindowExperiment) -> RateResult:
    """Exact rate for ``q = 1``: plain geometric waiting, no window."""
    if exp.q != 1:
        raise ValueError(f"analytic route only covers q=1, got q={exp.q}")
    return _analytic_q1_rate(attempt_success_probability(exp), exp.attempt_duration_s)


def asymptotic_rate(exp: WindowExperiment) -> RateResult:
    """Rare-completion limit: hazard ``p**q * C(w-1, q-1)`` per attempt.

    A completion at a given attempt requires a success there plus
    ``q - 1`` earlier successes placed anywhere in the preceding
    ``w - 1`` attempts; when completions are rare the waiting time is
    the inverse of that hazard.  Small cases are computed exactly, huge
    ones in log space.
    """
    return _asymptotic_rate(
        attempt_success_probability(exp), exp.q, exp.window, exp.attempt_duration_s
    )


def multiplexing_advantage(exp_q: WindowExperiment, exp_n: WindowExperiment) -> float:
    """Rate gain of batching: asymptotic rate ratio against one-by-one.

    ``exp_q`` is the batched experiment; ``exp_n`` must prepare the same
    ``n`` qubits one at a time (``k = 1``, ``q = n``) under the same
    window budget and time-bin.  Evaluated in log space so extreme
    transmission losses do not overflow.
    """
    if exp_n.k != 1 or exp_n.q != exp_n.n:
        raise ValueError("reference experiment must prepare qubits one by one (k=1, q=n)")
    if exp_q.n != exp_n.n:
        raise ValueError(f"qubit counts differ: {exp_q.n} vs {exp_n.n}")
    if exp_q.w0 != exp_n.w0:
        raise ValueError(f"window budgets differ: {exp_q.w0} vs {exp_n.w0}")
    if exp_q.time_bin_s != exp_n.time_bin_s:
        raise ValueError(
            f"time-bin durations differ: {exp_q.time_bin_s} vs {exp_n.time_bin_s}"
        )
    log_q = _log_hazard(
        attempt_success_probability(exp_q), exp_q.q, exp_q.window
    ) - math.log(exp_q.attempt_duration_s)
    log_n = _log_hazard(
        attempt_success_probability(exp_n), exp_n.q, exp_n.window
    ) - math.log(exp_n.attempt_duration_s)
    return math.exp(log_q - log_n)


def window_success_probability(p: float, q: int, w: int) -> float:
    """``P(Binomial(w, p) >= q)``: chance one fixed window completes.

    The asymptotic rate is trustworthy when this is small; the
    acceptance checks use it to pick comparison distances.
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p!r}")
    if q < 1 or w < 1:
        raise ValueError("need q >= 1 and w >= 1")
    if q > w:
        return 0.0
    if p == 0.0:
        return 0.0
    if p == 1.0:
        return 1.0
    log_term = (
        math.lgamma(w + 1)
        - math.lgamma(q + 1)
        - math.lgamma(w - q + 1)
        + q * math.log(p)
        + (w - q) * math.log1p(-p)
    )
    term = math.exp(log_term)
    total = 0.0
    ratio = p / (1.0 - p)
    for j in range(q, w + 1):
        total += term
        if j < w:
            term *= (w - j) / (j + 1.0) * ratio
            # safe to stop once terms shrink on the falling flank
            if term < total * 1e-18 and (w - j) * p < (j + 1.0) * (1.0 - p):
                break
    return min(total, 1.0)


def choose_method(
    p: float, q: int, w: int, trajectories: int, success_budget: int
) -> str:
    """Pick the evaluation route a sweep row can afford.

    Deterministic in its inputs: estimates the Monte Carlo cost (total
    success draws across trajectories) from the asymptotic mean and
    falls back to the asymptotic formula when it exceeds the budget.
    """
    if q == 1:
        return "analytic-q1"
    if p < _MIN_MC_PROBABILITY:
        return "asymptotic"
    log_mean = -_log_hazard(p, q, w)
    expected_successes = max(float(q), math.exp(min(math.log(p) + log_mean, 700.0)))
    if expected_successes * trajectories <= success_budget:
        return "monte-carlo"
    return "asymptotic"


def fig3_base_model(
    k: int, cooperativity: float = 38.0, eta_0: float = 0.9, eta_d: float = 0.9
) -> EfficiencyModel:
    """Batch interface efficiencies for the long-distance rate study.

    The interacting-bin survival folds the routing loss into the tuned
    reflection: ``eta_1 = eta_0 * (C/(C+2))**2``.
    """
    eta_1 = eta_0 * reflection_efficiency(cooperativity)
    return EfficiencyModel(eta_t=1.0, eta_0=eta_0, eta_1=eta_1, eta_d=eta_d, n=k)


def fig3_experiment(
    n: int,
    k: int,
    q: int,
    distance_km: float,
    *,
    w0: int = 2000,
    time_bin_s: float = 30e-9,
    cooperativity: float = 38.0,
    eta_0: float = 0.9,
    eta_d: float = 0.9,
    eta_t_intrinsic: float = 0.9,
    trajectories: int = 1000,
    seed: int = 0,
) -> WindowExperiment:
    """Window experiment with the long-distance study's default budget."""
    return WindowExperiment(
        n=n,
        k=k,
        q=q,
        w0=w0,
        time_bin_s=time_bin_s,
        distance=DistanceModel(distance_km, eta_t_intrinsic=eta_t_intrinsic),
        base_model=fig3_base_model(k, cooperativity, eta_0, eta_d),
        trajectories=trajectories,
        seed=seed,
    )


def default_partitions(n: int) -> list[tuple[int, int]]:
    """All ``(k, q)`` factorizations of ``n``, smallest batches first."""
    return [(k, n // k) for k in range(1, n + 1) if n % k == 0]


def dc_attempt_success_probability(
    distance: DistanceModel,
    eta_d: float = 0.9,
    cooperativity: float = 38.0,
) -> float:
    """Per-attempt success of the emission-based two-click baseline.

    Leading order with a perfect single-photon source: transmission
    times detection times half the cavity retrieval efficiency.
    """
    return distance.eta_t() * eta_d * emission_efficiency(cooperativity) / 2.0


def _row_seed(master_seed: int, row_index: int) -> int:
    seq = np.random.SeedSequence(entropy=master_seed, spawn_key=(row_index,))
    return int(seq.generate_state(1, dtype=np.uint64)[0])


def figure3_sweep(
    n: int,
    w0: int,
    distances_km,
    partitions=None,
    *,
    time_bin_s: float = 30e-9,
    cooperativity: float = 38.0,
    eta_0: float = 0.9,
    eta_d: float = 0.9,
    eta_t_intrinsic: float = 0.9,
    trajectories: int = 1000,
    seed: int = 0,
    include_dc: bool = True,
    mc_success_budget: int = DEFAULT_MC_SUCCESS_BUDGET,
) -> list[dict]:
    """Rates over a distance grid for every batch partition of ``n``.

    Rows are emitted distance-major, partitions in ascending ``k``,
    with the two-click baseline (labeled ``DC``, one success per
    register qubit within the raw ``w0`` window) last when enabled.
    Each row's RNG stream is derived from the master seed and the row
    index, so the table is reproducible as a whole and a row's numbers
    do not depend on which methods its neighbours used.
    """
    if partitions is None:
        partitions = default_partitions(n)
    for k, q in partitions:
        if k * q != n:
            raise ValueError(f"partition (k={k}, q={q}) does not multiply to n={n}")
    rows = []
    row_index = 0
    for distance_km in distances_km:
        for k, q in partitions:
            exp = fig3_experiment(
                n,
                k,
                q,
                float(distance_km),
                w0=w0,
                time_bin_s=time_bin_s,
                cooperativity=cooperativity,
                eta_0=eta_0,
                eta_d=eta_d,
                eta_t_intrinsic=eta_t_intrinsic,
                trajectories=trajectories,
                seed=_row_seed(seed, row_index),
            )
            result = _auto_rate(
                attempt_success_probability(exp),
                exp.q,
                exp.window,
                exp.attempt_duration_s,
                exp.trajectories,
                exp.seed,
                mc_success_budget,
            )
            rows.append(_sweep_row(float(distance_km), k, q, result, exp.seed, "R"))
            row_index += 1
        if include_dc:
            if w0 < n:
                raise InfeasibleWindowError(
                    f"window of {w0} attempts cannot hold q={n} successes"
                )
            distance = DistanceModel(float(distance_km), eta_t_intrinsic=eta_t_intrinsic)
            p_dc = dc_attempt_success_probability(distance, eta_d, cooperativity)
            row_seed = _row_seed(seed, row_index)
            result = _auto_rate(
                p_dc, n, w0, time_bin_s, trajectories, row_seed, mc_success_budget
            )
            rows.append(_sweep_row(float(distance_km), 1, n, result, row_seed, "DC"))
            row_index += 1
    return rows


def _sweep_row(
    distance_km: float, k: int, q: int, result: RateResult, seed: int, protocol: str
) -> dict:
    return {
        "distance_km": distance_km,
        "k": k,
        "q": q,
        "method": result.method,
        "rate_hz": result.rate_hz,
        "stderr": result.stderr,
        "mean_trials": result.mean_trials,
        "seed": seed,
        "protocol": protocol,
    }
