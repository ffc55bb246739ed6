"""Sampling policies and the episode driver.

Three policies, a closed enumeration: plain Thompson sampling (posterior
variance 1/n per arm), stable Thompson sampling (posterior variance
inflated to gamma/n with gamma = c*(log T)^beta evaluated once from the
horizon), and a UCB baseline with bonus sqrt(2 log T / n).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .core import BanditInstance, RngStream, Streams

__all__ = [
    "GammaSchedule",
    "PolicySpec",
    "PolicyState",
    "Trajectory",
    "EpisodeExtension",
    "gamma_value",
    "check_gamma_condition",
    "ts_select",
    "stable_ts_select",
    "ucb_select",
    "update",
    "run_episode",
    "run_episode_extended",
]


@dataclass(frozen=True)
class GammaSchedule:
    """Variance-inflation schedule gamma_T = coefficient * (log T)^exponent.

    The growth condition (gamma_T / loglog T -> inf and
    sqrt(log T) / gamma_T -> inf) holds for this family exactly when
    0 < exponent < 1/2.
    """

    coefficient: float
    exponent: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.coefficient) and self.coefficient > 0):
            raise ValueError("gamma coefficient must be positive")
        if not math.isfinite(self.exponent):
            raise ValueError("gamma exponent must be finite")

    @property
    def satisfies_growth_condition(self) -> bool:
        return 0.0 < self.exponent < 0.5


def gamma_value(schedule: GammaSchedule, T: int) -> float:
    """Evaluate gamma_T; requires T >= 3 so log T > 1."""
    if T < 3:
        raise ValueError("gamma_value needs T >= 3 (log T > 1)")
    return schedule.coefficient * math.log(T) ** schedule.exponent


@dataclass(frozen=True)
class GammaConditionReport:
    """Finite-horizon diagnostic for the growth condition: the two ratios
    that must diverge, sampled along a horizon grid."""

    horizons: tuple[int, ...]
    gamma_over_loglog: tuple[float, ...]
    sqrt_log_over_gamma: tuple[float, ...]
    both_increasing: bool


def check_gamma_condition(schedule: GammaSchedule, horizons) -> GammaConditionReport:
    """Report gamma_T/loglog T and sqrt(log T)/gamma_T along `horizons` plus
    whether both sequences are strictly increasing across the grid.

    Note the first ratio is not monotone from small horizons even for
    schedules that satisfy the condition: with coefficient 4, exponent 0.4
    it decreases until T ~ 2e5. Divergence is asymptotic; this check is a
    finite-sample diagnostic, not a test of the analytic condition (use
    GammaSchedule.satisfies_growth_condition for that).
    """
    horizons = tuple(int(h) for h in horizons)
    if len(horizons) < 2:
        raise ValueError("monotonicity needs at least 2 horizons")
    if any(h < 16 for h in horizons):
        raise ValueError("horizons must each be >= 16 (loglog positive)")
    if any(b <= a for a, b in zip(horizons, horizons[1:])):
        raise ValueError("horizons must be strictly increasing")
    r1 = []
    r2 = []
    for T in horizons:
        g = gamma_value(schedule, T)
        log_t = math.log(T)
        r1.append(g / math.log(log_t))
        r2.append(math.sqrt(log_t) / g)
    inc1 = all(b > a for a, b in zip(r1, r1[1:]))
    inc2 = all(b > a for a, b in zip(r2, r2[1:]))
    return GammaConditionReport(horizons, tuple(r1), tuple(r2), inc1 and inc2)


@dataclass(frozen=True)
class PolicySpec:
    """Policy descriptor: kind in {"ts", "stable_ts", "ucb"}; stable_ts
    carries its GammaSchedule."""

    kind: str
    schedule: GammaSchedule | None = None

    def __post_init__(self) -> None:
        if self.kind not in ("ts", "stable_ts", "ucb"):
            raise ValueError(f"unknown policy kind {self.kind!r}")
        if self.kind == "stable_ts" and self.schedule is None:
            raise ValueError("stable_ts needs a GammaSchedule")
        if self.kind != "stable_ts" and self.schedule is not None:
            raise ValueError(f"{self.kind} does not take a gamma schedule")

    @classmethod
    def ts(cls) -> "PolicySpec":
        return cls("ts")

    @classmethod
    def stable_ts(cls, schedule: GammaSchedule) -> "PolicySpec":
        return cls("stable_ts", schedule)

    @classmethod
    def ucb(cls) -> "PolicySpec":
        return cls("ucb")

    def episode_gamma(self, T: int) -> float:
        """Posterior-variance inflation for an episode of horizon T; plain
        Thompson sampling is the gamma = 1 degenerate case."""
        if self.kind == "stable_ts":
            return gamma_value(self.schedule, T)
        return 1.0

    @property
    def code(self) -> int:
        return {"ts": _kernels.POLICY_TS,
                "stable_ts": _kernels.POLICY_STABLE_TS,
                "ucb": _kernels.POLICY_UCB}[self.kind]

    def describe(self) -> str:
        if self.kind == "stable_ts":
            return (f"stable_ts(c={self.schedule.coefficient:g},"
                    f"beta={self.schedule.exponent:g})")
        return self.kind


@dataclass
class PolicyState:
    """Per-arm pull counts, running means, and running squared-deviation
    sums, plus the global round counter t = sum of counts."""

    counts: np.ndarray
    means: np.ndarray
    m2: np.ndarray
    t: int

    @classmethod
    def initial(cls, k: int) -> "PolicyState":
        return cls(
            counts=np.zeros(k, dtype=np.int64),
            means=np.zeros(k, dtype=np.float64),
            m2=np.zeros(k, dtype=np.float64),
            t=0,
        )

    @property
    def k(self) -> int:
        return len(self.counts)


def update(state: PolicyState, arm: int, reward: float) -> PolicyState:
    """Fold one reward into the state: count +1, mean by the recurrence
    (n_prev*mean + x)/n_new, squared-deviation sum for the sample variance.
    Other arms are untouched. Mutates and returns `state`."""
    if not 0 <= arm < state.k:
        raise ValueError(f"arm index {arm} out of range")
    if not math.isfinite(reward):
        raise ValueError("reward must be finite")
    n_new = state.counts[arm] + 1
    mean_new = (state.counts[arm] * state.means[arm] + reward) / n_new
    state.m2[arm] += (reward - state.means[arm]) * (reward - mean_new)
    state.means[arm] = mean_new
    state.counts[arm] = n_new
    state.t += 1
    return state


def _require_initialized(state: PolicyState) -> None:
    if np.any(state.counts < 1):
        bad = int(np.argmin(state.counts))
        raise ValueError(f"arm {bad} has no pulls yet; initialization incomplete")


def ts_select(state: PolicyState, rng: RngStream) -> int:
    """Plain Thompson draw: theta_a ~ Normal(mean_a, 1/n_a), pull the argmax.
    Consumes exactly K posterior variates."""
    return stable_ts_select(state, 1.0, rng)


def stable_ts_select(state: PolicyState, gamma: float, rng: RngStream) -> int:
    """Inflated Thompson draw: theta_a ~ Normal(mean_a, gamma/n_a).
    Ties (measure zero) resolve to the lowest index via argmax."""
    if not (math.isfinite(gamma) and gamma > 0):
        raise ValueError("gamma must be positive")
    _require_initialized(state)
    z = rng.standard_normal(state.k)
    theta = state.means + np.sqrt(gamma / state.counts) * z
    return int(np.argmax(theta))


def ucb_select(state: PolicyState, T) -> int:
    """Index policy: mean_a + sqrt(2 log T / n_a); ties break to the lowest
    arm index."""
    if T < 1:
        raise ValueError("T must be >= 1")
    _require_initialized(state)
    vals = state.means + np.sqrt(2.0 * math.log(T) / state.counts)
    return int(np.argmax(vals))


@dataclass(frozen=True)
class EpisodeExtension:
    """Post-horizon continuation recorded until `arm` was pulled again (or
    the round cap was hit, in which case capped=True and next_pull_round is
    None). Rounds are numbered continuing the base episode (1-based)."""

    arm: int
    arms: np.ndarray
    rewards: np.ndarray
    next_pull_round: int | None
    capped: bool


@dataclass(frozen=True)
class Trajectory:
    """One recorded episode: the full (arm, reward) sequence, the final
    per-arm summaries, and the keys that reproduce it."""

    arms: np.ndarray
    rewards: np.ndarray
    counts: np.ndarray
    means: np.ndarray
    m2: np.ndarray
    instance: BanditInstance
    policy: PolicySpec
    master_seed: int
    replication_index: int
    extension: EpisodeExtension | None = None

    @property
    def horizon(self) -> int:
        return len(self.arms)

    @property
    def final_state(self) -> PolicyState:
        return PolicyState(
            counts=self.counts.copy(),
            means=self.means.copy(),
            m2=self.m2.copy(),
            t=int(self.counts.sum()),
        )

    def pull_rounds(self, arm: int) -> np.ndarray:
        """1-based round indices at which `arm` was pulled."""
        return np.flatnonzero(self.arms == arm) + 1


def _episode_arrays(instance: BanditInstance, policy: PolicySpec, T: int, streams: Streams):
    K = instance.k
    gamma = policy.episode_gamma(T)
    rew_z = streams.reward.standard_normal(T)
    if policy.kind == "ucb":
        post_z = np.empty((0, K), dtype=np.float64)
    else:
        post_z = streams.posterior.standard_normal((T - K) * K).reshape(T - K, K)
    return _kernels.episode_kernel(
        instance.means, instance.stds, post_z, rew_z, T, policy.code, gamma, math.log(T)
    )


def run_episode(instance: BanditInstance, policy: PolicySpec, T: int, streams: Streams) -> Trajectory:
    """Play one episode of exactly T rounds: each arm once in index order,
    then the policy's select/observe/update loop."""
    if T < instance.k:
        raise ValueError(f"horizon T={T} is below the arm count K={instance.k}")
    arms, rewards, counts, means, m2 = _episode_arrays(instance, policy, T, streams)
    return Trajectory(
        arms=arms,
        rewards=rewards,
        counts=counts,
        means=means,
        m2=m2,
        instance=instance,
        policy=policy,
        master_seed=streams.reward.master_seed,
        replication_index=streams.reward.replication_index,
    )


def run_episode_extended(
    instance: BanditInstance,
    policy: PolicySpec,
    T: int,
    streams: Streams,
    watch_arm: int,
    cap_multiple: int = 100,
    chunk: int = 65536,
) -> Trajectory:
    """run_episode, then keep playing (same policy, gamma still evaluated at
    T) until `watch_arm` is pulled once more. The continuation stops at
    round cap_multiple*T; if the pull never happens the extension is marked
    capped. The trajectory itself still has exactly T rounds."""
    if not 0 <= watch_arm < instance.k:
        raise ValueError(f"arm index {watch_arm} out of range")
    if cap_multiple < 2:
        raise ValueError("cap_multiple must be >= 2")
    arms, rewards, counts, means, m2 = _episode_arrays(instance, policy, T, streams)
    gamma = policy.episode_gamma(T)
    log_horizon = math.log(T)
    K = instance.k

    counts_x = counts.copy()
    means_x = means.copy()
    m2_x = m2.copy()
    ext_arms: list[np.ndarray] = []
    ext_rewards: list[np.ndarray] = []
    budget = cap_multiple * T - T
    done = 0
    found = False
    while budget > 0 and not found:
        steps = min(chunk, budget)
        rew_z = streams.reward.standard_normal(steps)
        if policy.kind == "ucb":
            post_z = np.empty((0, K), dtype=np.float64)
        else:
            post_z = streams.posterior.standard_normal(steps * K).reshape(steps, K)
        a, r, n_done, found = _kernels.extension_kernel(
            instance.means, instance.stds, counts_x, means_x, m2_x,
            post_z, rew_z, steps, policy.code, gamma, log_horizon, watch_arm,
        )
        ext_arms.append(a)
        ext_rewards.append(r)
        done += int(n_done)
        budget -= steps

    extension = EpisodeExtension(
        arm=watch_arm,
        arms=np.concatenate(ext_arms) if ext_arms else np.empty(0, dtype=np.int64),
        rewards=np.concatenate(ext_rewards) if ext_rewards else np.empty(0, dtype=np.float64),
        next_pull_round=T + done if found else None,
        capped=not found,
    )
    return Trajectory(
        arms=arms,
        rewards=rewards,
        counts=counts,
        means=means,
        m2=m2,
        instance=instance,
        policy=policy,
        master_seed=streams.reward.master_seed,
        replication_index=streams.reward.replication_index,
        extension=extension,
    )
