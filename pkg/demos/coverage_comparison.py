"""Confidence-interval coverage: plain TS under-covers, inflated TS does not.

Two equal N(0,1) arms make plain Thompson sampling unstable: the interval
for each arm contains the true mean noticeably less often than nominal.
Inflating the posterior variance restores coverage. Desk scale by default
(seconds); raise --replications/--horizon to sharpen the contrast.
"""
from __future__ import annotations

import argparse

from banditlab import (
    BanditInstance,
    ExperimentConfig,
    GammaSchedule,
    PolicySpec,
    coverage_curve,
    run_experiment,
)


def coverage_at_95(instance, policy, T, reps, seed):
    config = ExperimentConfig(
        instance=instance, policy=policy, horizon=T, replications=reps,
        master_seed=seed, alphas=(0.05,), workers=0,
    )
    summaries = run_experiment(config)
    # a rare replication can leave an arm with one pull; count it as a miss
    return coverage_curve(summaries, instance, (0.05,), on_missing="count-miss")


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--horizon", type=int, default=2000)
    parser.add_argument("--replications", type=int, default=400)
    parser.add_argument("--seed", type=int, default=21)
    args = parser.parse_args()

    instance = BanditInstance.from_means((0.0, 0.0))
    sched = GammaSchedule(4.0, 0.4)

    print(f"two equal arms, T={args.horizon}, R={args.replications}, nominal 0.95\n")
    for policy in (PolicySpec.ts(), PolicySpec.stable_ts(sched)):
        points = coverage_at_95(instance, policy, args.horizon, args.replications, args.seed)
        label = policy.describe()
        for p in points:
            print(
                f"  {label:28s} arm {p.arm + 1}: coverage {p.coverage:.3f} "
                f"(stderr {p.stderr:.3f})"
            )
    print("\nplain TS sits several points below nominal; the inflated variant")
    print("tracks 0.95 within Monte Carlo noise")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
