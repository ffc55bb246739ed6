"""Tour of the analytic machinery: closed forms, proxies, and brackets.

Everything here is executable math with no simulation dependency: the
two-arm selection probability against a Monte Carlo check, the geometric
waiting-time proxy and its bounds, the deviation envelope, and the
inequality brackets the analysis leans on.
"""
from __future__ import annotations

import argparse
import math

import numpy as np

from banditlab import (
    GammaSchedule,
    PolicyState,
    ProxyParams,
    check_gamma_condition,
    episode_streams,
    expected_pulls_bound,
    gamma_value,
    lil_envelope,
    log_sum_exp_bounds,
    mills_ratio_bounds,
    proxy_success_prob,
    proxy_success_prob_bounds,
    sample_proxy_waiting_time,
    selection_probability_closed_form,
    stable_ts_select,
)


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seed", type=int, default=41)
    args = parser.parse_args()
    streams = episode_streams(args.seed, 0)

    sched = GammaSchedule(4.0, 0.4)
    gamma = gamma_value(sched, 10_000)
    print(f"inflation at T=1e4 under the reference schedule: {gamma:.6f}")
    report = check_gamma_condition(sched, tuple(10**k for k in range(6, 10)))
    print(f"growth-condition ratios increasing on 1e6..1e9: {report.both_increasing}")

    # closed-form selection probability vs a Monte Carlo estimate
    n1, n2, delta = 120, 80, 0.4
    p = selection_probability_closed_form(delta, n1, n2, n1 + n2, gamma)
    state = PolicyState(
        counts=np.array([n1, n2], dtype=np.int64),
        means=np.array([delta, 0.0]),
        m2=np.zeros(2),
        t=n1 + n2,
    )
    m = 20_000
    freq = sum(stable_ts_select(state, gamma, streams.posterior) == 0 for _ in range(m)) / m
    print(f"\nP(pull arm 1) closed form {p:.4f}, Monte Carlo ({m} draws) {freq:.4f}")

    # geometric proxy for the wait until the gap arm is pulled again
    params = ProxyParams(gap=1.0, gamma=gamma, j=20, eps=0.2)
    prob = proxy_success_prob(params)
    lo, hi = proxy_success_prob_bounds(params)
    print(f"\nproxy success probability after pull 20: {prob:.4f}")
    print(f"bracket: {lo:.4f} <= {prob:.4f} <= min(1, {hi:.4f})")
    draws = [sample_proxy_waiting_time(prob, streams.auxiliary) for _ in range(10_000)]
    print(f"proxy waiting time: sample mean {np.mean(draws):.2f} vs 1/p {1 / prob:.2f}")

    print("\ndeviation envelope sqrt((3 loglog 2n + 3 loglog T)/n) at T=1e4:")
    for n in (8, 32, 128, 1024):
        print(f"  n={n:5d}: {lil_envelope(n, 10_000):.4f}")

    z = 2.0
    lower, tail, upper = mills_ratio_bounds(z)
    print(f"\ntail bracket at z={z}: {lower:.5f} <= {tail:.5f} <= {upper:.5f}")
    vec = [1.0, 3.0, 2.5]
    lo, val, hi = log_sum_exp_bounds(vec)
    print(f"log-sum-exp bracket for {vec}: {lo:.3f} <= {val:.3f} <= {hi:.3f}")

    bound = expected_pulls_bound(10_000, 1.0, gamma)
    print(f"\nworst-case pull bound for a gap-1 arm at T=1e4: {bound:.3g}")
    print(f"(loose by design: the normalizer 2*gamma*log(T)/gap^2 is only "
          f"{2 * gamma * math.log(10_000):.0f} here)")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
