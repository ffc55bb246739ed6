"""Normalized pull-count statistics and distributional diagnostics.

A policy is stable when each arm's pull count, divided by a deterministic
normalizer, concentrates at 1. For stable Thompson sampling with at most
two optimal arms the normalizers are T/|I| (optimal arms) and
(2/gap^2) * gamma_T * log T (suboptimal arms); for plain Thompson sampling
with a unique optimum they are T and (2/gap^2) * log T. Outside those
cases no limit is claimed and the normalizer request is refused.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import BanditInstance, UnsupportedByTheoryError, gaps, optimal_set
from .inference import normal_cdf
from .policies import GammaSchedule, gamma_value

__all__ = [
    "PullRatioSample",
    "pull_count_normalizer",
    "normalized_pull_ratios",
    "concentration_summary",
    "ks_statistic",
    "ecdf",
]


@dataclass(frozen=True)
class PullRatioSample:
    replication: int
    arm: int
    raw_count: int
    normalizer: float
    value: float

    def __post_init__(self) -> None:
        if self.normalizer <= 0:
            raise ValueError("normalizer must be positive")


def pull_count_normalizer(
    instance: BanditInstance,
    schedule: GammaSchedule | None,
    T: int,
    arm: int,
    policy_kind: str,
    role: str = "auto",
) -> float:
    """Deterministic normalizer whose ratio to the arm's pull count targets 1.

    role picks the formula explicitly ("optimal" / "suboptimal") or infers
    it from the arm's gap ("auto"). Requests outside the proven cases
    (stable_ts with |I| > 2, plain ts without a unique optimum, any ucb)
    raise UnsupportedByTheoryError.
    """
    if T < 3:
        raise ValueError("normalizer needs T >= 3")
    if not 0 <= arm < instance.k:
        raise ValueError(f"arm index {arm} out of range")
    if role not in ("auto", "optimal", "suboptimal"):
        raise ValueError(f"unknown role {role!r}")
    gap = float(gaps(instance)[arm])
    optimal = optimal_set(instance)
    if role == "auto":
        role = "optimal" if gap == 0.0 else "suboptimal"
    if role == "suboptimal" and gap == 0.0:
        raise ValueError(f"arm {arm} has zero gap; no suboptimal normalizer exists")
    if role == "optimal" and gap != 0.0:
        raise ValueError(f"arm {arm} has gap {gap}; it is not an optimal arm")

    if policy_kind == "stable_ts":
        if schedule is None:
            raise ValueError("stable_ts normalizer needs the gamma schedule")
        if len(optimal) > 2:
            raise UnsupportedByTheoryError(
                f"{len(optimal)} optimal arms; stability is only established for |I| <= 2"
            )
        if role == "optimal":
            return T / len(optimal)
        return (2.0 / gap**2) * gamma_value(schedule, T) * math.log(T)
    if policy_kind == "ts":
        if schedule is not None:
            raise ValueError("plain ts takes no gamma schedule")
        if len(optimal) != 1:
            raise UnsupportedByTheoryError(
                "plain Thompson sampling is only stable with a unique optimal arm"
            )
        if role == "optimal":
            return float(T)
        return (2.0 / gap**2) * math.log(T)
    raise UnsupportedByTheoryError(f"no pull-count limit implemented for policy {policy_kind!r}")


def normalized_pull_ratios(trajectories, arm: int, normalizer: float) -> list[PullRatioSample]:
    """Divide each run's pull count of `arm` by `normalizer` (exact
    division). Accepts trajectories or replication summaries; both carry
    per-arm counts and a replication index."""
    if normalizer <= 0:
        raise ValueError("normalizer must be positive")
    out = []
    for t in trajectories:
        rep = getattr(t, "replication_index", None)
        if rep is None:
            rep = t.replication
        raw = int(t.counts[arm])
        out.append(PullRatioSample(replication=int(rep), arm=arm, raw_count=raw,
                                   normalizer=normalizer, value=raw / normalizer))
    return out


@dataclass(frozen=True)
class ConcentrationSummary:
    mean: float
    std: float
    fraction_within: float
    epsilon: float
    n_samples: int


def concentration_summary(samples, epsilon: float = 0.1) -> ConcentrationSummary:
    """Sample mean and std of the normalized ratios plus the fraction lying
    within epsilon of 1 (the concentration surrogate; the limit theory gives
    convergence in probability with no rate)."""
    values = np.array([s.value for s in samples], dtype=np.float64)
    if len(values) < 2:
        raise ValueError("need >= 2 samples")
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    return ConcentrationSummary(
        mean=float(values.mean()),
        std=float(values.std(ddof=1)),
        fraction_within=float(np.mean(np.abs(values - 1.0) <= epsilon)),
        epsilon=epsilon,
        n_samples=len(values),
    )


def _reference_cdf(name: str, x: np.ndarray) -> np.ndarray:
    if name == "uniform01":
        return np.clip(x, 0.0, 1.0)
    if name == "standard-normal":
        return normal_cdf(x)
    raise ValueError(f"unknown reference {name!r}; use 'uniform01' or 'standard-normal'")


def ks_statistic(samples, reference: str) -> float:
    """Exact sup distance between the empirical CDF of `samples` and the
    reference CDF, taking both one-sided gaps at every jump point."""
    x = np.sort(np.asarray(list(samples), dtype=np.float64))
    n = len(x)
    if n < 10:
        raise ValueError("KS statistic needs at least 10 samples")
    f = _reference_cdf(reference, x)
    upper = np.arange(1, n + 1) / n - f
    lower = f - np.arange(0, n) / n
    return float(max(upper.max(), lower.max()))


def ecdf(samples) -> list[tuple[float, float]]:
    """Right-continuous ECDF step points: (value, cumulative fraction) at
    each distinct sample value, ending at 1."""
    x = np.sort(np.asarray(list(samples), dtype=np.float64))
    n = len(x)
    if n == 0:
        raise ValueError("ecdf needs at least one sample")
    values, last_idx = np.unique(x, return_index=True)
    # fraction at a value = rank of its last occurrence / n
    counts = np.diff(np.append(last_idx, n))
    cum = np.cumsum(counts) / n
    return [(float(v), float(c)) for v, c in zip(values, cum)]
