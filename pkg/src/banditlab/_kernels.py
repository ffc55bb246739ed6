"""Compiled episode loops.

The kernels consume pre-generated standard-normal arrays instead of calling
the generator round by round; numpy draws batched and scalar variates from
the identical bit stream, so a kernel episode is bit-identical to the
pure-Python select/update loop (locked by tests).
"""
from __future__ import annotations

import numpy as np
from numba import njit

POLICY_TS = 0
POLICY_STABLE_TS = 1
POLICY_UCB = 2


@njit(cache=True)
def _update_inplace(counts, means, m2, arm, x):
    # mean via the recurrence (n_prev*mean + x)/n_new; m2 accumulates
    # squared deviations for the Bessel-corrected sample variance
    n_new = counts[arm] + 1
    mean_new = (counts[arm] * means[arm] + x) / n_new
    m2[arm] += (x - means[arm]) * (x - mean_new)
    means[arm] = mean_new
    counts[arm] = n_new


@njit(cache=True)
def episode_kernel(mu, sigma, post_z, rew_z, T, policy_code, gamma, log_horizon):
    """Run one episode; returns (arms, rewards, counts, means, m2).

    post_z has shape (T-K, K) and is ignored for UCB; rew_z has shape (T,).
    gamma is 1.0 for plain Thompson sampling. log_horizon = log(T) feeds the
    UCB bonus. Ties pick the lowest arm index.
    """
    K = mu.shape[0]
    counts = np.zeros(K, dtype=np.int64)
    means = np.zeros(K, dtype=np.float64)
    m2 = np.zeros(K, dtype=np.float64)
    arms = np.empty(T, dtype=np.int64)
    rewards = np.empty(T, dtype=np.float64)

    for t in range(K):  # forced initialization, arm order 0..K-1
        a = t
        x = mu[a] + sigma[a] * rew_z[t]
        arms[t] = a
        rewards[t] = x
        _update_inplace(counts, means, m2, a, x)

    for t in range(K, T):
        best = 0
        best_val = -np.inf
        if policy_code == POLICY_UCB:
            for a in range(K):
                val = means[a] + np.sqrt(2.0 * log_horizon / counts[a])
                if val > best_val:
                    best_val = val
                    best = a
        else:
            for a in range(K):
                theta = means[a] + np.sqrt(gamma / counts[a]) * post_z[t - K, a]
                if theta > best_val:
                    best_val = theta
                    best = a
        x = mu[best] + sigma[best] * rew_z[t]
        arms[t] = best
        rewards[t] = x
        _update_inplace(counts, means, m2, best, x)

    return arms, rewards, counts, means, m2


@njit(cache=True)
def lil_event_kernel(arms, rewards, mu, loglog_horizon):
    """Replay a recorded episode and report whether every running mean
    stayed inside the iterated-logarithm envelope
    sqrt((3*loglog(2n) + 3*loglog(T))/n) at every round with n >= 2.
    Counts below 2 are skipped (the envelope is undefined there)."""
    K = mu.shape[0]
    T = arms.shape[0]
    counts = np.zeros(K, dtype=np.int64)
    means = np.zeros(K, dtype=np.float64)
    for t in range(T):
        a = arms[t]
        n_new = counts[a] + 1
        means[a] = (counts[a] * means[a] + rewards[t]) / n_new
        counts[a] = n_new
        if n_new >= 2:
            env = np.sqrt((3.0 * np.log(np.log(2.0 * n_new)) + 3.0 * loglog_horizon) / n_new)
            if np.abs(means[a] - mu[a]) > env:
                return False
    return True


@njit(cache=True)
def extension_kernel(mu, sigma, counts, means, m2, post_z, rew_z, steps, policy_code, gamma, log_horizon, watch_arm):
    """Continue an episode in place for up to `steps` rounds, stopping as
    soon as watch_arm is pulled. Returns (arms, rewards, n_done, found).

    State arrays are mutated. The caller supplies fresh normal blocks drawn
    from the same streams the episode used, so the extension is the exact
    continuation of the recorded run.
    """
    K = mu.shape[0]
    arms = np.empty(steps, dtype=np.int64)
    rewards = np.empty(steps, dtype=np.float64)
    for i in range(steps):
        best = 0
        best_val = -np.inf
        if policy_code == POLICY_UCB:
            for a in range(K):
                val = means[a] + np.sqrt(2.0 * log_horizon / counts[a])
                if val > best_val:
                    best_val = val
                    best = a
        else:
            for a in range(K):
                theta = means[a] + np.sqrt(gamma / counts[a]) * post_z[i, a]
                if theta > best_val:
                    best_val = theta
                    best = a
        x = mu[best] + sigma[best] * rew_z[i]
        arms[i] = best
        rewards[i] = x
        _update_inplace(counts, means, m2, best, x)
        if best == watch_arm:
            return arms[: i + 1], rewards[: i + 1], i + 1, True
    return arms, rewards, steps, False
