"""Self-check suite behind the verify-theory subcommand.

Every check is deterministic given the master seed: inequality brackets on
randomized inputs, sampler identities against analytic moments, and the
growth condition of the default variance-inflation schedule. A check
returns a (statistic, threshold, verdict) row plus a short detail string;
the CLI renders the list as text and JSON and turns it into an exit code.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import episode_streams
from .inference import normal_cdf, normal_quantile
from .policies import GammaSchedule, check_gamma_condition
from .theory import (
    ProxyParams,
    log_sum_exp_bounds,
    mills_ratio_bounds,
    proxy_success_prob,
    proxy_success_prob_bounds,
    sample_proxy_waiting_time,
    selection_probability_closed_form,
)

__all__ = ["CheckResult", "run_theory_suite"]


@dataclass(frozen=True)
class CheckResult:
    """One row of the pass/fail table: the measured statistic, the bound it
    must not exceed, and the verdict (passed == statistic <= threshold)."""

    name: str
    passed: bool
    statistic: float
    threshold: float
    detail: str


def _check_mills_bracket(rng) -> CheckResult:
    z = rng.uniform(10_000) * 10.0
    z = np.clip(z, 1e-9, 10.0)
    bad = 0
    worst_rel_width = 0.0
    for zi in z:
        lower, tail, upper = mills_ratio_bounds(float(zi))
        bad += not (lower <= tail <= upper)
        if zi >= 5.0:
            worst_rel_width = max(worst_rel_width, (upper - lower) / tail)
    return CheckResult(
        "mills-ratio-bracket",
        bad == 0,
        float(bad),
        0.0,
        f"{bad} violations on {len(z)} points; rel width at z>=5 <= {worst_rel_width:.3g}",
    )


def _check_lse_bracket(rng) -> CheckResult:
    bad = 0
    for _ in range(10_000):
        n = 2 + int(rng.uniform() * 7)
        vec = (rng.uniform(n) - 0.5) * 100.0
        lower, value, upper = log_sum_exp_bounds(vec)
        bad += not (lower <= value <= upper)
    return CheckResult("log-sum-exp-bracket", bad == 0, float(bad), 0.0,
                       f"{bad} violations on 10000 vectors")


def _check_proxy_bracket() -> CheckResult:
    bad = 0
    cases = 0
    for gap, gamma in ((1.0, 9.7223278804), (0.5, 4.0), (2.0, 12.0)):
        eps = gap**2 / 4.0
        for j in range(0, 1001):
            params = ProxyParams(gap=gap, gamma=gamma, j=j, eps=eps)
            p = proxy_success_prob(params)
            p_plus, p_minus = proxy_success_prob_bounds(params)
            bad += not (p_plus <= p <= min(1.0, p_minus))
            cases += 1
    return CheckResult("proxy-probability-bracket", bad == 0, float(bad), 0.0,
                       f"{bad} violations on {cases} cases")


def _check_geometric_mean(rng) -> CheckResult:
    worst = 0.0
    m = 50_000
    for p in (0.9, 0.5, 0.1, 0.01):
        draws = [sample_proxy_waiting_time(p, rng) for _ in range(m)]
        mean = sum(draws) / m
        se = math.sqrt((1.0 - p) / (p * p * m))
        worst = max(worst, abs(mean - 1.0 / p) / max(se, 1e-300))
    return CheckResult("geometric-sampler-mean", worst <= 4.0, worst, 4.0,
                       f"worst deviation {worst:.2f} SE (limit 4)")


def _check_complementarity(rng) -> CheckResult:
    worst = 0.0
    for _ in range(20):
        n1 = 1 + int(rng.uniform() * 200)
        n2 = 1 + int(rng.uniform() * 200)
        t = n1 + n2 + int(rng.uniform() * 500)
        gamma = 0.5 + rng.uniform() * 12.0
        delta = (rng.uniform() - 0.5) * 6.0
        p = selection_probability_closed_form(delta, n1, n2, t, gamma)
        q = selection_probability_closed_form(-delta, n2, n1, t, gamma)
        worst = max(worst, abs(p + q - 1.0))
    return CheckResult("selection-probability-complement", worst <= 1e-12, worst, 1e-12,
                       f"worst |p + p_swapped - 1| = {worst:.2e}")


def _check_quantile_roundtrip() -> CheckResult:
    ps = np.concatenate([
        np.logspace(-12, -0.31, 5000),
        1.0 - np.logspace(-12, -0.31, 5000),
    ])
    worst = 0.0
    for p in ps:
        back = normal_cdf(normal_quantile(float(p)))
        worst = max(worst, abs(back - p) / p)
    return CheckResult("normal-quantile-roundtrip", worst <= 1e-9, worst, 1e-9,
                       f"worst relative error {worst:.2e} on {len(ps)} points")


def _check_growth_condition() -> CheckResult:
    report = check_gamma_condition(GammaSchedule(4.0, 0.4), (10**6, 10**7, 10**8, 10**9))
    flags = (
        report.both_increasing,
        GammaSchedule(4.0, 0.4).satisfies_growth_condition,
        not GammaSchedule(4.0, 0.5).satisfies_growth_condition,
        not GammaSchedule(4.0, 0.0).satisfies_growth_condition,
    )
    bad = sum(not f for f in flags)
    return CheckResult("gamma-growth-condition", bad == 0, float(bad), 0.0,
                       f"ratios increasing on 1e6..1e9: {report.both_increasing}")


def run_theory_suite(master_seed: int = 0) -> list[CheckResult]:
    """Run every check; deterministic for a fixed master seed."""
    rng = episode_streams(master_seed, 0).auxiliary
    return [
        _check_mills_bracket(rng),
        _check_lse_bracket(rng),
        _check_proxy_bracket(),
        _check_geometric_mean(rng),
        _check_complementarity(rng),
        _check_quantile_roundtrip(),
        _check_growth_condition(),
    ]
