"""Gaussian bandit environments and deterministic per-replication randomness.

Arms are indexed 0-based throughout the Python API; file outputs label them
1-based (see the output module).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "ArmSpec",
    "BanditInstance",
    "RngStream",
    "Streams",
    "episode_streams",
    "sample_reward",
    "gaps",
    "optimal_set",
    "PURPOSES",
    "EstimateInsufficientError",
    "UnsupportedByTheoryError",
]


class EstimateInsufficientError(ValueError):
    """Raised when a statistic needs more samples than the arm received."""


class UnsupportedByTheoryError(ValueError):
    """Raised when a stability normalizer is requested outside the cases
    the limit theory covers."""


@dataclass(frozen=True)
class ArmSpec:
    """One arm: rewards are Normal(mean, variance)."""

    mean: float
    variance: float

    def __post_init__(self) -> None:
        if not math.isfinite(self.mean):
            raise ValueError("arm mean must be finite")
        if not (math.isfinite(self.variance) and self.variance > 0):
            raise ValueError("arm variance must be positive and finite")

    @property
    def std(self) -> float:
        return math.sqrt(self.variance)


@dataclass(frozen=True)
class BanditInstance:
    """An ordered collection of Gaussian arms.

    Gap and optimal-set structure is derived from exact equality of the
    configured means: means are inputs, not estimates, so no epsilon
    matching is applied.
    """

    arms: tuple[ArmSpec, ...]

    def __post_init__(self) -> None:
        arms = tuple(self.arms)
        if len(arms) < 2:
            raise ValueError("a bandit instance needs at least 2 arms")
        object.__setattr__(self, "arms", arms)

    @classmethod
    def from_means(cls, means, variance: float = 1.0) -> "BanditInstance":
        return cls(tuple(ArmSpec(float(m), float(variance)) for m in means))

    @property
    def k(self) -> int:
        return len(self.arms)

    @property
    def means(self) -> np.ndarray:
        return np.array([a.mean for a in self.arms], dtype=np.float64)

    @property
    def stds(self) -> np.ndarray:
        return np.array([a.std for a in self.arms], dtype=np.float64)

    @property
    def optimal_mean(self) -> float:
        return max(a.mean for a in self.arms)


def gaps(instance: BanditInstance) -> np.ndarray:
    """Per-arm gap to the best mean; >= 0, at least one exact zero."""
    best = instance.optimal_mean
    return np.array([best - a.mean for a in instance.arms], dtype=np.float64)


def optimal_set(instance: BanditInstance) -> frozenset[int]:
    """Indices of the zero-gap arms (exact mean equality)."""
    best = instance.optimal_mean
    return frozenset(i for i, a in enumerate(instance.arms) if a.mean == best)


# Stream purposes. The integer codes key the counter-based generator and must
# never be reordered: trajectories are reproducible per (seed, replication,
# purpose), not portable across keying changes.
PURPOSES = {"reward-noise": 0, "posterior-noise": 1, "auxiliary": 2}


@dataclass
class RngStream:
    """One independent random stream keyed by (master_seed, replication, purpose).

    Backed by numpy's Philox counter-based generator seeded via
    SeedSequence(master_seed, spawn_key=(replication_index, purpose_code)),
    so distinct keys never share state and the sequence is independent of
    thread scheduling. Normal variates use numpy Generator.standard_normal
    (ziggurat); this method is fixed for the build because recorded
    trajectories are seed-reproducible, not method-portable.
    """

    master_seed: int
    replication_index: int
    purpose: str
    normals_drawn: int = field(default=0, init=False)
    uniforms_drawn: int = field(default=0, init=False)

    def __post_init__(self) -> None:
        if self.purpose not in PURPOSES:
            raise ValueError(f"unknown stream purpose {self.purpose!r}")
        if not (0 <= int(self.master_seed) < 2**64):
            raise ValueError("master_seed must fit in 64 bits")
        if int(self.replication_index) < 0:
            raise ValueError("replication_index must be >= 0")
        seq = np.random.SeedSequence(
            int(self.master_seed),
            spawn_key=(int(self.replication_index), PURPOSES[self.purpose]),
        )
        self._gen = np.random.Generator(np.random.Philox(seq))

    def standard_normal(self, size: int | None = None):
        """Draw standard normals; a size-n batch consumes the same variates
        as n scalar draws (locked by a regression test)."""
        self.normals_drawn += 1 if size is None else int(size)
        return self._gen.standard_normal(size)

    def uniform(self, size: int | None = None):
        self.uniforms_drawn += 1 if size is None else int(size)
        return self._gen.random(size)


@dataclass(frozen=True)
class Streams:
    """The three per-replication streams an episode may consume."""

    reward: RngStream
    posterior: RngStream
    auxiliary: RngStream


def episode_streams(master_seed: int, replication_index: int) -> Streams:
    return Streams(
        reward=RngStream(master_seed, replication_index, "reward-noise"),
        posterior=RngStream(master_seed, replication_index, "posterior-noise"),
        auxiliary=RngStream(master_seed, replication_index, "auxiliary"),
    )


def sample_reward(instance: BanditInstance, arm: int, rng: RngStream) -> float:
    """One reward draw from the arm's Normal(mean, variance)."""
    if not 0 <= arm < instance.k:
        raise ValueError(f"arm index {arm} out of range for {instance.k} arms")
    spec = instance.arms[arm]
    # mean + std * z, matching the episode kernel's transform bit for bit
    return spec.mean + spec.std * float(rng.standard_normal())
