"""Per-arm estimates and asymptotic confidence intervals from adaptively
collected data, plus aggregate coverage curves.

The interval is mean +/- z_{1-alpha/2} * s / sqrt(n) with the
Bessel-corrected sample standard deviation s. It is asymptotically exact
under a stable policy and systematically under-covers for unstable ones;
both behaviors are exercised by the test suite.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr, ndtri

from .core import BanditInstance, EstimateInsufficientError
from .policies import Trajectory

__all__ = [
    "ArmEstimate",
    "ConfidenceInterval",
    "DEFAULT_LEVELS",
    "arm_estimates",
    "normal_quantile",
    "normal_cdf",
    "confidence_interval",
    "standardized_error",
    "coverage_curve",
]

# 25 evenly spaced nominal confidence levels spanning 0.75..0.99
DEFAULT_LEVELS: tuple[float, ...] = tuple(np.linspace(0.75, 0.99, 25))


@dataclass(frozen=True)
class ArmEstimate:
    """Final summary for one arm: pull count, sample mean, and (for n >= 2)
    Bessel-corrected sample standard deviation."""

    arm: int
    n: int
    mean: float
    sample_std: float | None

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError("estimate needs at least one pull")
        if (self.sample_std is None) != (self.n < 2):
            raise ValueError("sample_std must be present exactly when n >= 2")
        if self.sample_std is not None and self.sample_std < 0:
            raise ValueError("sample_std must be >= 0")


@dataclass(frozen=True)
class ConfidenceInterval:
    arm: int
    level: float
    lower: float
    upper: float

    def __post_init__(self) -> None:
        if not 0 < self.level < 1:
            raise ValueError("level must be in (0,1)")
        if self.lower > self.upper:
            raise ValueError("lower must be <= upper")

    def covers(self, value: float) -> bool:
        return self.lower <= value <= self.upper


def arm_estimates(trajectory: Trajectory) -> list[ArmEstimate]:
    """One ArmEstimate per arm from the trajectory's final state."""
    out = []
    for a in range(trajectory.instance.k):
        n = int(trajectory.counts[a])
        if n >= 2:
            std = math.sqrt(trajectory.m2[a] / (n - 1))
        else:
            std = None
        out.append(ArmEstimate(arm=a, n=n, mean=float(trajectory.means[a]), sample_std=std))
    return out


def normal_quantile(p: float) -> float:
    """z with Phi(z) = p, to well under 1e-9 absolute error."""
    if not 0 < p < 1:
        raise ValueError("p must be in (0,1)")
    return float(ndtri(p))


def normal_cdf(z) -> float | np.ndarray:
    """Standard normal Phi, erf-grade accuracy."""
    out = ndtr(z)
    return float(out) if np.isscalar(z) or np.ndim(z) == 0 else out


def confidence_interval(est: ArmEstimate, alpha: float) -> ConfidenceInterval:
    """Two-sided interval at level 1-alpha; requires n >= 2 for the sample
    standard deviation (no fallback prior for single-pull arms)."""
    if not 0 < alpha < 1:
        raise ValueError("alpha must be in (0,1)")
    if est.n < 2:
        raise EstimateInsufficientError(
            f"arm {est.arm} was pulled {est.n} time(s); the interval needs n >= 2"
        )
    half = normal_quantile(1 - alpha / 2) * est.sample_std / math.sqrt(est.n)
    return ConfidenceInterval(
        arm=est.arm, level=1 - alpha, lower=est.mean - half, upper=est.mean + half
    )


def standardized_error(est: ArmEstimate, true_mean: float) -> float:
    """sqrt(n) * (mean - true_mean) / sample_std; approximately standard
    normal when the policy is stable."""
    if est.n < 2:
        raise EstimateInsufficientError(
            f"arm {est.arm} was pulled {est.n} time(s); need n >= 2"
        )
    if est.sample_std == 0:
        raise ValueError("sample standard deviation is zero; statistic undefined")
    return math.sqrt(est.n) * (est.mean - true_mean) / est.sample_std


@dataclass(frozen=True)
class CoveragePoint:
    arm: int
    level: float
    coverage: float
    stderr: float


def coverage_curve(summaries, instance: BanditInstance, alpha_grid,
                   on_missing: str = "error") -> list[CoveragePoint]:
    """Empirical CI coverage per arm and level across replications.

    coverage = fraction of replications whose interval contains the true
    mean; stderr = sqrt(p*(1-p)/R). By default every summary must carry an
    interval for every alpha in the grid (single-pull arms make that
    impossible and raise before any aggregation); on_missing="count-miss"
    instead counts a replication without an interval as not covering,
    which is the honest reading when the interval could not be formed.
    """
    summaries = list(summaries)
    alpha_grid = list(alpha_grid)
    if on_missing not in ("error", "count-miss"):
        raise ValueError(f"unknown on_missing mode {on_missing!r}")
    if not summaries or not alpha_grid:
        raise ValueError("need at least one summary and one alpha")
    if len(summaries) < 2:
        raise ValueError("coverage needs >= 2 replications")
    if any(not 0 < a < 1 for a in alpha_grid):
        raise ValueError("every alpha must be in (0,1)")
    r = len(summaries)
    out = []
    for a in range(instance.k):
        mu = instance.arms[a].mean
        for j, alpha in enumerate(alpha_grid):
            hits = 0
            for s in summaries:
                interval = s.intervals[a][j]
                if interval is None:
                    if on_missing == "error":
                        raise EstimateInsufficientError(
                            f"replication {s.replication} has no interval for arm {a}"
                        )
                    continue
                lo, hi = interval
                hits += lo <= mu <= hi
            p = hits / r
            out.append(CoveragePoint(arm=a, level=1 - alpha, coverage=p,
                                     stderr=math.sqrt(p * (1 - p) / r)))
    return out
