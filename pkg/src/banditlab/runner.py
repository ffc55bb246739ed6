"""Replication-level Monte Carlo execution.

Each replication is an independent episode keyed by (master_seed,
replication index, purpose), so results are a pure function of the
experiment description and never of scheduling. A worker pool consumes
replication indices; the fold is in index order regardless of completion
order, which makes worker counts interchangeable byte for byte.
"""
from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import partial

from .config import ExperimentConfig
from .core import UnsupportedByTheoryError, episode_streams, gaps
from .inference import arm_estimates, confidence_interval, standardized_error
from .policies import run_episode
from .stability import pull_count_normalizer

__all__ = ["ReplicationSummary", "summarize_replication", "run_experiment"]


@dataclass(frozen=True)
class ReplicationSummary:
    """Per-replication record: final per-arm statistics, intervals on the
    alpha grid, and realized/pseudo regret.

    intervals[a][j] is the (lower, upper) pair for arm a at alphas[j], or
    None when the arm has fewer than two pulls. std_errs holds the
    standardized errors against the configured true means (None when
    undefined). pull_ratios holds n_a divided by its deterministic
    normalizer, or None where no limit is established for the policy.
    """

    replication: int
    horizon: int
    counts: tuple[int, ...]
    mu_hat: tuple[float, ...]
    sigma_hat: tuple[float | None, ...]
    std_errs: tuple[float | None, ...]
    alphas: tuple[float, ...]
    intervals: tuple[tuple[tuple[float, float] | None, ...], ...]
    realized_regret: float
    pseudo_regret: float
    pull_ratios: tuple[float | None, ...]

    def __post_init__(self) -> None:
        if sum(self.counts) != self.horizon:
            raise ValueError("per-arm pull counts must sum to the horizon")


def _normalizers(config: ExperimentConfig) -> list[float | None]:
    """Per-arm pull-count normalizers; None where theory gives no limit."""
    if config.horizon < 3:
        return [None] * config.instance.k  # ratio limits need T >= 3
    out: list[float | None] = []
    for a in range(config.instance.k):
        try:
            out.append(
                pull_count_normalizer(
                    config.instance,
                    config.policy.schedule,
                    config.horizon,
                    a,
                    config.policy.kind,
                )
            )
        except UnsupportedByTheoryError:
            out.append(None)
    return out


def summarize_replication(config: ExperimentConfig, replication: int) -> ReplicationSummary:
    """Run episode `replication` and reduce it to a ReplicationSummary."""
    streams = episode_streams(config.master_seed, replication)
    trajectory = run_episode(config.instance, config.policy, config.horizon, streams)

    counts, mu_hat, sigma_hat, std_errs, intervals = [], [], [], [], []
    for est in arm_estimates(trajectory):
        counts.append(est.n)
        mu_hat.append(est.mean)
        sigma_hat.append(est.sample_std)
        true_mean = config.instance.arms[est.arm].mean
        if est.n >= 2 and est.sample_std > 0:
            std_errs.append(standardized_error(est, true_mean))
        else:
            std_errs.append(None)
        if est.n >= 2:
            row = tuple(
                (ci.lower, ci.upper)
                for ci in (confidence_interval(est, alpha) for alpha in config.alphas)
            )
        else:
            row = tuple(None for _ in config.alphas)
        intervals.append(row)

    instance_gaps = gaps(config.instance)
    pseudo = float(sum(instance_gaps[a] * counts[a] for a in range(config.instance.k)))
    realized = config.horizon * config.instance.optimal_mean - float(trajectory.rewards.sum())

    ratios = tuple(
        counts[a] / norm if norm is not None else None
        for a, norm in enumerate(_normalizers(config))
    )
    return ReplicationSummary(
        replication=replication,
        horizon=config.horizon,
        counts=tuple(counts),
        mu_hat=tuple(mu_hat),
        sigma_hat=tuple(sigma_hat),
        std_errs=tuple(std_errs),
        alphas=config.alphas,
        intervals=tuple(intervals),
        realized_regret=realized,
        pseudo_regret=pseudo,
        pull_ratios=ratios,
    )


def _run_one(config: ExperimentConfig, replication: int) -> ReplicationSummary:
    # failures must name the replication so a multi-worker abort is traceable
    try:
        return summarize_replication(config, replication)
    except Exception as exc:
        raise RuntimeError(f"replication {replication} failed: {exc}") from exc


def run_experiment(config: ExperimentConfig) -> list[ReplicationSummary]:
    """All R summaries, in replication order, identical for any worker count."""
    worker_count = config.workers if config.workers > 0 else (os.cpu_count() or 1)
    indices = range(config.replications)
    if worker_count == 1 or config.replications == 1:
        return [_run_one(config, r) for r in indices]
    job = partial(_run_one, config)
    chunk = max(1, config.replications // (worker_count * 8))
    with ProcessPoolExecutor(max_workers=worker_count) as pool:
        return list(pool.map(job, indices, chunksize=chunk))
