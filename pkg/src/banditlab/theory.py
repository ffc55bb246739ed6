"""Executable reference quantities behind the stability analysis: the
closed-form two-arm selection probability, geometric waiting-time proxies
and their high-probability bounds, iterated-logarithm deviation events,
algebraic inequality brackets, and the explicit pull-count/regret bound.

These functions are oracles for the simulator: the test suite checks the
simulated policies against them rather than the other way round.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

from . import _kernels
from .core import BanditInstance, EstimateInsufficientError, RngStream, gaps
from .inference import normal_cdf
from .policies import Trajectory

__all__ = [
    "ProxyParams",
    "WaitingTimes",
    "SandwichStatistic",
    "selection_probability_closed_form",
    "proxy_success_prob",
    "proxy_success_prob_bounds",
    "sample_proxy_waiting_time",
    "waiting_times",
    "sandwich_statistic",
    "lil_envelope",
    "lil_event_holds",
    "high_prob_events",
    "mills_ratio_bounds",
    "log_sum_exp_bounds",
    "expected_pulls_bound",
    "empirical_regret",
    "RegretSummary",
]


def selection_probability_closed_form(delta_hat: float, n1: int, n2: int, t: int, gamma: float) -> float:
    """P(arm 1's posterior draw beats arm 2's) for a two-arm state with
    mean difference delta_hat, counts (n1, n2), round t, and inflation
    gamma: Phi(delta_hat * sqrt(n1*n2/(t*gamma))).

    The formula is exact when t = n1 + n2 (the posterior variances are
    gamma/n1 and gamma/n2, so the difference has variance
    gamma*(n1+n2)/(n1*n2)).
    """
    if n1 < 1 or n2 < 1:
        raise ValueError("counts must be >= 1")
    if t < n1 + n2:
        raise ValueError("round t must be >= n1 + n2")
    if not (math.isfinite(gamma) and gamma > 0):
        raise ValueError("gamma must be positive")
    return float(normal_cdf(delta_hat * math.sqrt(n1 * n2 / (t * gamma))))


@dataclass(frozen=True)
class ProxyParams:
    """Inputs for the geometric waiting-time proxy of a gap-`gap` arm after
    its j-th pull under inflation gamma; eps is the slack used by the
    high-probability bounds and must sit in (0, gap^2/2)."""

    gap: float
    gamma: float
    j: int
    eps: float | None = None

    def __post_init__(self) -> None:
        if not (math.isfinite(self.gap) and self.gap > 0):
            raise ValueError("gap must be positive")
        if not (math.isfinite(self.gamma) and self.gamma > 0):
            raise ValueError("gamma must be positive")
        if self.j < 0:
            raise ValueError("pull index j must be >= 0")
        if self.eps is not None and not 0 < self.eps < self.gap**2 / 2:
            raise ValueError("eps must lie in (0, gap^2/2)")


def proxy_success_prob(params: ProxyParams) -> float:
    """exp(-j * gap^2 / (2*gamma)): the per-round chance proxy that the
    suboptimal arm wins after its j-th pull. Equals 1 at j=0 and decreases
    strictly in j."""
    return math.exp(-params.j * params.gap**2 / (2.0 * params.gamma))


def proxy_success_prob_bounds(params: ProxyParams) -> tuple[float, float]:
    """(p_plus, p_minus) with
    p_plus = exp(-(j/gamma)(gap^2/2 + eps)),
    p_minus = 3 * exp(-(j/gamma)(gap^2/2 - eps)),
    so that p_plus <= proxy_success_prob <= min(1, p_minus) for every j."""
    if params.eps is None:
        raise ValueError("bounds need the eps slack")
    scale = params.j / params.gamma
    half_sq = params.gap**2 / 2.0
    return (
        math.exp(-scale * (half_sq + params.eps)),
        3.0 * math.exp(-scale * (half_sq - params.eps)),
    )


def sample_proxy_waiting_time(p: float, rng: RngStream) -> int:
    """One geometric draw on {1, 2, ...} with success probability p by
    inversion; consumes exactly one uniform from the stream."""
    if not 0 < p <= 1:
        raise ValueError("p must be in (0, 1]")
    u = float(rng.uniform())
    if p == 1.0:
        return 1  # the uniform is still consumed: one draw per call, always
    return int(math.floor(math.log1p(-u) / math.log1p(-p))) + 1


@dataclass(frozen=True)
class WaitingTimes:
    """Gaps between successive pulls of one arm.

    tau(0) = 1 by convention and the first pull is anchored at round 1, so
    the partial sum tau(0)+...+tau(n-1) equals the true round of the arm's
    n-th pull for every n >= 2 regardless of where the arm sat in the
    initialization order. When the trajectory carries a continuation for
    this arm, the pull found past the horizon contributes the final entry.
    """

    arm: int
    taus: np.ndarray

    def partial_sum(self, n: int) -> int:
        """Round of the arm's n-th pull (n >= 2), i.e. sum of the first n
        waiting times."""
        if not 1 <= n <= len(self.taus):
            raise ValueError(f"n={n} out of range (have {len(self.taus)} waiting times)")
        return int(self.taus[:n].sum())


def waiting_times(trajectory: Trajectory, arm: int) -> WaitingTimes:
    """Extract the arm's waiting-time sequence from a trajectory (plus its
    recorded continuation, when that continuation watched this arm and
    found the next pull)."""
    if not 0 <= arm < trajectory.instance.k:
        raise ValueError(f"arm index {arm} out of range")
    rounds = trajectory.pull_rounds(arm)
    ext = trajectory.extension
    if ext is not None and ext.arm == arm and ext.next_pull_round is not None:
        rounds = np.append(rounds, ext.next_pull_round)
    if len(rounds) < 2:
        raise EstimateInsufficientError(
            f"arm {arm} was pulled {len(rounds)} time(s); waiting times need >= 2"
        )
    taus = np.empty(len(rounds), dtype=np.int64)
    taus[0] = 1
    taus[1] = rounds[1] - 1  # first pull anchored at round 1 by convention
    taus[2:] = np.diff(rounds)[1:]
    return WaitingTimes(arm=arm, taus=taus)


@dataclass(frozen=True)
class SandwichStatistic:
    """gamma*log(round of n-th pull)/n <= gamma*log(T)/n <= gamma*log(round
    of (n+1)-th pull)/n for n = the arm's count at the horizon. When the
    continuation never saw the next pull before its cap, upper is computed
    at the cap round and censored is True (the true upper is larger)."""

    lower: float
    point: float
    upper: float
    censored: bool


def sandwich_statistic(trajectory: Trajectory, arm: int, gamma: float) -> SandwichStatistic:
    """The bracketed log-horizon-over-pulls statistic for a suboptimal arm;
    its asymptotic target is gap^2/2. Needs a trajectory recorded with a
    continuation for `arm` (run_episode_extended)."""
    if not (math.isfinite(gamma) and gamma > 0):
        raise ValueError("gamma must be positive")
    if float(gaps(trajectory.instance)[arm]) == 0.0:
        raise ValueError(f"arm {arm} has zero gap; the statistic targets suboptimal arms")
    n = int(trajectory.counts[arm])
    if n < 2:
        raise EstimateInsufficientError(f"arm {arm} was pulled {n} time(s); need >= 2")
    ext = trajectory.extension
    if ext is None or ext.arm != arm:
        raise ValueError(f"trajectory has no continuation watching arm {arm}; "
                         "record it with run_episode_extended")
    wt = waiting_times(trajectory, arm)
    t_n = wt.partial_sum(n)
    T = trajectory.horizon
    if ext.next_pull_round is not None:
        upper_round = wt.partial_sum(n + 1)
        censored = False
    else:
        upper_round = T + len(ext.arms)
        censored = True
    return SandwichStatistic(
        lower=gamma * math.log(t_n) / n,
        point=gamma * math.log(T) / n,
        upper=gamma * math.log(upper_round) / n,
        censored=censored,
    )


def lil_envelope(n: int, T: int) -> float:
    """Iterated-logarithm deviation envelope sqrt((3 loglog 2n + 3 loglog T)/n);
    needs n >= 2 and T >= 16 so both iterated logs are positive."""
    if n < 2:
        raise ValueError("envelope needs n >= 2")
    if T < 16:
        raise ValueError("envelope needs T >= 16")
    return math.sqrt((3 * math.log(math.log(2 * n)) + 3 * math.log(math.log(T))) / n)


def lil_event_holds(trajectory: Trajectory) -> bool:
    """Whether every arm's running mean stayed inside lil_envelope(n, T) at
    every round of the episode (rounds with n < 2 are skipped since the
    envelope is undefined there)."""
    T = trajectory.horizon
    if T < 16:
        raise ValueError("event needs T >= 16")
    return bool(_kernels.lil_event_kernel(
        trajectory.arms, trajectory.rewards, trajectory.instance.means,
        math.log(math.log(T)),
    ))


def high_prob_events(trajectory: Trajectory, arm: int) -> dict:
    """Evaluate the four deviation/count events for a suboptimal arm on one
    (extended) trajectory. Returns booleans e1..e4 plus 'capped' when the
    continuation never found the next pull so the e2/e3 window is truncated.

    e1: final count >= log(T)/(2 gap^2).
    e2: count at every round of [exp(sqrt(log T)), next pull past T]
        >= sqrt(log T)/(4 gap^2) (counts are nondecreasing, so the window
        minimum sits at its left edge).
    e3: count over the same window <= (log T)^2 (maximum at the right edge).
    e4: all running means inside the iterated-logarithm envelope.
    """
    gap = float(gaps(trajectory.instance)[arm])
    if gap == 0.0:
        raise ValueError(f"arm {arm} has zero gap; events target suboptimal arms")
    T = trajectory.horizon
    log_t = math.log(T)
    n_final = int(trajectory.counts[arm])
    rounds = trajectory.pull_rounds(arm)

    window_start = math.exp(math.sqrt(log_t))
    count_at_start = int(np.searchsorted(rounds, window_start, side="right"))
    ext = trajectory.extension
    capped = ext is not None and ext.arm == arm and ext.capped
    count_at_end = n_final + (1 if (ext is not None and ext.arm == arm and not ext.capped) else 0)

    return {
        "e1": n_final >= log_t / (2 * gap**2),
        "e2": count_at_start >= math.sqrt(log_t) / (4 * gap**2),
        "e3": count_at_end <= log_t**2,
        "e4": lil_event_holds(trajectory),
        "capped": capped,
    }


def mills_ratio_bounds(z: float) -> tuple[float, float, float]:
    """(lower, exact_tail, upper) bracketing 1 - Phi(z) for z > 0:
    z*phi(z)/(1+z^2) <= 1 - Phi(z) <= phi(z)/z."""
    if not z > 0:
        raise ValueError("z must be positive")
    density = math.exp(-z * z / 2) / math.sqrt(2 * math.pi)
    tail = float(normal_cdf(-z))  # 1 - Phi(z) without cancellation
    return (z * density / (1 + z * z), tail, density / z)


def log_sum_exp_bounds(a) -> tuple[float, float, float]:
    """(max, log-sum-exp, max + log n) for a non-empty vector; the middle
    term is computed with max-shifting so arbitrarily large entries stay
    finite."""
    arr = np.asarray(list(a), dtype=np.float64)
    if arr.size == 0:
        raise ValueError("need a non-empty vector")
    m = float(arr.max())
    return (m, float(logsumexp(arr)), m + math.log(arr.size))


def expected_pulls_bound(T: int, gap: float, gamma: float) -> float:
    """Explicit (deliberately loose) upper bound on the expected pulls of a
    gap-`gap` arm by horizon T under inflation gamma:
    8e4 * gamma * log(T*gap^2/gamma + 300)/gap^2 + 24*gamma/gap^2."""
    if not gap > 0:
        raise ValueError("gap must be positive")
    if not gamma > 0:
        raise ValueError("gamma must be positive")
    if T < 1:
        raise ValueError("T must be >= 1")
    g2 = gap * gap
    return 8e4 * gamma * math.log(T * g2 / gamma + 300.0) / g2 + 24.0 * gamma / g2


@dataclass(frozen=True)
class RegretSummary:
    """Mean realized regret T*mu_star - sum(rewards) across replications,
    with the lower-variance pseudo-regret sum(gap_a * n_a) reported
    separately. stderr fields are None for a single replication."""

    mean_regret: float
    stderr: float | None
    mean_pseudo_regret: float
    pseudo_stderr: float | None
    n_replications: int


def empirical_regret(trajectories, instance: BanditInstance) -> RegretSummary:
    trajectories = list(trajectories)
    if not trajectories:
        raise ValueError("need at least one trajectory")
    horizon = trajectories[0].horizon
    for t in trajectories:
        if t.instance != instance:
            raise ValueError("trajectory was recorded on a different instance")
        if t.horizon != horizon:
            raise ValueError("trajectories mix horizons")
    gap_vec = gaps(instance)
    best = instance.optimal_mean
    realized = np.array([horizon * best - t.rewards.sum() for t in trajectories])
    pseudo = np.array([float(gap_vec @ t.counts) for t in trajectories])
    r = len(trajectories)
    return RegretSummary(
        mean_regret=float(realized.mean()),
        stderr=float(realized.std(ddof=1) / math.sqrt(r)) if r >= 2 else None,
        mean_pseudo_regret=float(pseudo.mean()),
        pseudo_stderr=float(pseudo.std(ddof=1) / math.sqrt(r)) if r >= 2 else None,
        n_replications=r,
    )
