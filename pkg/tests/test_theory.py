from __future__ import annotations

import math

import numpy as np
import pytest

from banditlab.core import (
    ArmSpec,
    BanditInstance,
    EstimateInsufficientError,
    episode_streams,
)
from banditlab.policies import (
    EpisodeExtension,
    GammaSchedule,
    PolicySpec,
    Trajectory,
    run_episode,
    run_episode_extended,
)
from banditlab.theory import (
    ProxyParams,
    empirical_regret,
    expected_pulls_bound,
    high_prob_events,
    lil_envelope,
    lil_event_holds,
    log_sum_exp_bounds,
    mills_ratio_bounds,
    proxy_success_prob,
    proxy_success_prob_bounds,
    sample_proxy_waiting_time,
    sandwich_statistic,
    selection_probability_closed_form,
    waiting_times,
)

_GAP = BanditInstance((ArmSpec(1.0, 1.0), ArmSpec(0.0, 1.0)))


def _synthetic(arm_seq, rewards=None, extension=None, instance=_GAP):
    arms = np.asarray(arm_seq, dtype=np.int64)
    if rewards is None:
        rewards = np.zeros(len(arms))
    counts = np.bincount(arms, minlength=instance.k).astype(np.int64)
    return Trajectory(
        arms=arms,
        rewards=np.asarray(rewards, dtype=np.float64),
        counts=counts,
        means=np.zeros(instance.k),
        m2=np.zeros(instance.k),
        instance=instance,
        policy=PolicySpec.ts(),
        master_seed=0,
        replication_index=0,
        extension=extension,
    )


def test_selection_probability_frozen():
    # mpmath: Phi(sqrt(100*100/(200*gamma))) at gamma = 4*(log 1e4)^0.4
    p = selection_probability_closed_form(1.0, 100, 100, 200, 9.7223278804)
    assert p == pytest.approx(0.988328523273, abs=1e-9)
    assert selection_probability_closed_form(0.0, 5, 7, 12, 3.0) == 0.5


def test_selection_probability_complement():
    for d, n1, n2, t, g in [(1.0, 100, 100, 200, 9.72), (0.3, 7, 50, 57, 2.0)]:
        p = selection_probability_closed_form(d, n1, n2, t, g)
        q = selection_probability_closed_form(-d, n1, n2, t, g)
        assert abs(p + q - 1.0) <= 1e-12


def test_selection_probability_domain():
    with pytest.raises(ValueError):
        selection_probability_closed_form(1.0, 0, 5, 10, 1.0)
    with pytest.raises(ValueError):
        selection_probability_closed_form(1.0, 5, 5, 9, 1.0)
    with pytest.raises(ValueError):
        selection_probability_closed_form(1.0, 5, 5, 10, 0.0)


def test_proxy_success_prob_frozen():
    # gap=1, gamma=10, j=20: exp(-1); bounds at eps=0.1: exp(-1.2), 3exp(-0.8)
    params = ProxyParams(gap=1.0, gamma=10.0, j=20, eps=0.1)
    assert proxy_success_prob(params) == pytest.approx(0.3678794412, abs=1e-9)
    lo, hi = proxy_success_prob_bounds(params)
    assert lo == pytest.approx(0.3011942119, abs=1e-9)
    assert hi == pytest.approx(1.347986892, abs=1e-8)
    assert proxy_success_prob(ProxyParams(gap=1.0, gamma=10.0, j=0)) == 1.0


def test_proxy_bracket_holds():
    for gap, gamma, eps in [(1.0, 9.7223278804, 0.1), (0.5, 4.0, 0.05), (2.0, 12.0, 1.0)]:
        for j in (0, 1, 5, 40, 300):
            params = ProxyParams(gap=gap, gamma=gamma, j=j, eps=eps)
            p = proxy_success_prob(params)
            lo, hi = proxy_success_prob_bounds(params)
            assert lo <= p <= min(1.0, hi)


def test_proxy_monotone_in_j():
    probs = [proxy_success_prob(ProxyParams(1.0, 5.0, j)) for j in range(30)]
    assert all(b < a for a, b in zip(probs, probs[1:]))


def test_proxy_params_validation():
    with pytest.raises(ValueError):
        ProxyParams(gap=0.0, gamma=1.0, j=1)
    with pytest.raises(ValueError):
        ProxyParams(gap=1.0, gamma=0.0, j=1)
    with pytest.raises(ValueError):
        ProxyParams(gap=1.0, gamma=1.0, j=-1)
    with pytest.raises(ValueError):
        ProxyParams(gap=1.0, gamma=1.0, j=1, eps=0.5)  # eps must be < gap^2/2
    with pytest.raises(ValueError):
        proxy_success_prob_bounds(ProxyParams(gap=1.0, gamma=1.0, j=1))


def test_geometric_sampler_degenerate_and_budget():
    rng = episode_streams(9, 0).auxiliary
    before = rng.uniforms_drawn
    assert sample_proxy_waiting_time(1.0, rng) == 1
    assert rng.uniforms_drawn == before + 1
    with pytest.raises(ValueError):
        sample_proxy_waiting_time(0.0, rng)
    with pytest.raises(ValueError):
        sample_proxy_waiting_time(1.2, rng)


def test_geometric_sampler_cdf_point():
    # P(tau <= 229 | p=0.01) = 1 - 0.99^229 = 0.8998941257 (50-digit)
    rng = episode_streams(10, 0).auxiliary
    m = 20_000
    draws = np.array([sample_proxy_waiting_time(0.01, rng) for _ in range(m)])
    freq = np.mean(draws <= 229)
    assert freq == pytest.approx(0.8998941257, abs=0.01)
    assert draws.min() >= 1


def test_waiting_times_synthetic():
    tr = _synthetic([0, 1, 0, 0, 1, 0, 1, 1])
    wt = waiting_times(tr, 1)
    assert wt.taus.tolist() == [1, 4, 2, 1]
    # partial sums recover the true pull rounds from n=2 on
    assert wt.partial_sum(1) == 1  # anchor convention
    assert wt.partial_sum(2) == 5
    assert wt.partial_sum(3) == 7
    assert wt.partial_sum(4) == 8
    with pytest.raises(ValueError):
        wt.partial_sum(5)
    with pytest.raises(ValueError):
        wt.partial_sum(0)


def test_waiting_times_extension_appends_next_pull():
    ext = EpisodeExtension(
        arm=1,
        arms=np.array([0, 0, 1], dtype=np.int64),
        rewards=np.zeros(3),
        next_pull_round=11,
        capped=False,
    )
    tr = _synthetic([0, 1, 0, 0, 1, 0, 0, 0], extension=ext)
    wt = waiting_times(tr, 1)
    assert wt.taus.tolist() == [1, 4, 6]
    assert wt.partial_sum(3) == 11


def test_waiting_times_domain():
    tr = _synthetic([0, 0, 0, 1])
    with pytest.raises(EstimateInsufficientError):
        waiting_times(tr, 1)
    with pytest.raises(ValueError):
        waiting_times(tr, 2)


def test_sandwich_synthetic_exact():
    # n=2 pulls at rounds 2 and 5, next pull at round 11, T=8, gamma=2:
    # the bracket is (ln 5, ln 8, ln 11)
    ext = EpisodeExtension(
        arm=1,
        arms=np.array([0, 0, 1], dtype=np.int64),
        rewards=np.zeros(3),
        next_pull_round=11,
        capped=False,
    )
    tr = _synthetic([0, 1, 0, 0, 1, 0, 0, 0], extension=ext)
    s = sandwich_statistic(tr, 1, 2.0)
    assert s.lower == pytest.approx(math.log(5))
    assert s.point == pytest.approx(math.log(8))
    assert s.upper == pytest.approx(math.log(11))
    assert not s.censored
    assert s.lower <= s.point <= s.upper


def test_sandwich_censored_uses_cap_round():
    ext = EpisodeExtension(
        arm=1,
        arms=np.zeros(4, dtype=np.int64),
        rewards=np.zeros(4),
        next_pull_round=None,
        capped=True,
    )
    tr = _synthetic([0, 1, 0, 0, 1, 0, 0, 0], extension=ext)
    s = sandwich_statistic(tr, 1, 2.0)
    assert s.censored
    assert s.upper == pytest.approx(math.log(12))  # T + continuation length


def test_sandwich_domain():
    ext = EpisodeExtension(
        arm=1, arms=np.array([1], dtype=np.int64), rewards=np.zeros(1),
        next_pull_round=9, capped=False,
    )
    tr = _synthetic([0, 1, 0, 0, 1, 0, 0, 0], extension=ext)
    with pytest.raises(ValueError):
        sandwich_statistic(tr, 0, 2.0)  # zero-gap arm
    with pytest.raises(ValueError):
        sandwich_statistic(tr, 1, 0.0)
    bare = _synthetic([0, 1, 0, 0, 1, 0, 0, 0])
    with pytest.raises(ValueError, match="continuation"):
        sandwich_statistic(bare, 1, 2.0)
    single = _synthetic([0, 1, 0, 0, 0, 0, 0, 0], extension=ext)
    with pytest.raises(EstimateInsufficientError):
        sandwich_statistic(single, 1, 2.0)


def test_lil_envelope_frozen():
    # 50-digit arithmetic at (n=8, T=1e4) and (n=32, T=1e4)
    assert lil_envelope(8, 10**4) == pytest.approx(1.10228879727, abs=1e-9)
    assert lil_envelope(32, 10**4) == pytest.approx(0.584613121673, abs=1e-9)
    with pytest.raises(ValueError):
        lil_envelope(1, 10**4)
    with pytest.raises(ValueError):
        lil_envelope(8, 15)


def _lil_replay(tr):
    # pure-python re-evaluation of the envelope event, round by round
    T = tr.horizon
    counts = np.zeros(tr.instance.k, dtype=np.int64)
    sums = np.zeros(tr.instance.k)
    for a, r in zip(tr.arms, tr.rewards):
        counts[a] += 1
        sums[a] += r
        n = int(counts[a])
        if n >= 2:
            dev = abs(sums[a] / n - tr.instance.means[a])
            if dev > lil_envelope(n, T):
                return False
    return True


@pytest.mark.parametrize("seed", [0, 1, 2, 3, 4])
def test_lil_event_matches_replay(seed):
    tr = run_episode(_GAP, PolicySpec.ts(), 300, episode_streams(60, seed))
    assert lil_event_holds(tr) == _lil_replay(tr)


def test_lil_event_domain():
    tr = _synthetic([0, 1, 0, 1])
    with pytest.raises(ValueError):
        lil_event_holds(tr)


def test_high_prob_events_consistency():
    sched = GammaSchedule(4.0, 0.4)
    tr = run_episode_extended(
        _GAP, PolicySpec.stable_ts(sched), 1000, episode_streams(61, 0),
        watch_arm=1, cap_multiple=50,
    )
    events = high_prob_events(tr, 1)
    assert set(events) == {"e1", "e2", "e3", "e4", "capped"}
    T, gap = 1000, 1.0
    log_t = math.log(T)
    rounds = tr.pull_rounds(1)
    assert events["e1"] == (tr.counts[1] >= log_t / (2 * gap**2))
    window_start = math.exp(math.sqrt(log_t))
    at_start = int(np.sum(rounds <= window_start))
    assert events["e2"] == (at_start >= math.sqrt(log_t) / (4 * gap**2))
    at_end = int(tr.counts[1]) + (0 if tr.extension.capped else 1)
    assert events["e3"] == (at_end <= log_t**2)
    assert events["e4"] == lil_event_holds(tr)
    assert events["capped"] == tr.extension.capped


def test_high_prob_events_zero_gap_rejected():
    tr = run_episode(_GAP, PolicySpec.ts(), 100, episode_streams(61, 1))
    with pytest.raises(ValueError):
        high_prob_events(tr, 0)


def test_mills_ratio_frozen():
    # z=1: (phi/2, 1-Phi(1), phi) = (0.1209853623, 0.1586552539, 0.2419707245)
    lo, tail, hi = mills_ratio_bounds(1.0)
    assert lo == pytest.approx(0.1209853623, abs=1e-9)
    assert tail == pytest.approx(0.1586552539, abs=1e-9)
    assert hi == pytest.approx(0.2419707245, abs=1e-9)
    assert lo < tail < hi
    # relative bracket width shrinks like 2/z^2 in the tail
    lo5, tail5, hi5 = mills_ratio_bounds(5.0)
    assert (hi5 - lo5) / tail5 == pytest.approx(0.0398962, abs=1e-6)


def test_mills_ratio_domain():
    for z in (0.0, -1.0):
        with pytest.raises(ValueError):
            mills_ratio_bounds(z)


def test_log_sum_exp_bounds():
    lo, mid, hi = log_sum_exp_bounds([0.0, 0.0])
    assert lo == 0.0
    assert mid == pytest.approx(math.log(2), abs=1e-12)
    assert hi == pytest.approx(math.log(2), abs=1e-12)
    x = 3.7
    single = log_sum_exp_bounds([x])
    assert single == (x, pytest.approx(x), x)
    # max-shifting keeps huge entries finite
    lo, mid, hi = log_sum_exp_bounds([1e300, 1e300 - 5.0])
    assert math.isfinite(mid) and lo <= mid <= hi
    with pytest.raises(ValueError):
        log_sum_exp_bounds([])


def test_log_sum_exp_bracket_random():
    rng = episode_streams(62, 0).auxiliary
    for _ in range(200):
        n = 2 + int(rng.uniform() * 7)
        a = (rng.standard_normal(n) * 50.0).tolist()
        lo, mid, hi = log_sum_exp_bounds(a)
        assert lo <= mid <= hi + 1e-12


def test_expected_pulls_bound_frozen():
    # 50-digit arithmetic at T=1e4, gap=1, gamma=9.7228
    assert expected_pulls_bound(10**4, 1.0, 9.7228) == pytest.approx(
        5594198.50856, abs=1e-3
    )
    assert expected_pulls_bound(2 * 10**4, 1.0, 9.7228) > expected_pulls_bound(
        10**4, 1.0, 9.7228
    )


def test_expected_pulls_bound_domain():
    with pytest.raises(ValueError):
        expected_pulls_bound(10**4, 0.0, 1.0)
    with pytest.raises(ValueError):
        expected_pulls_bound(10**4, 1.0, 0.0)
    with pytest.raises(ValueError):
        expected_pulls_bound(0, 1.0, 1.0)


def test_empirical_regret_synthetic():
    tr1 = _synthetic([0, 1, 0, 0], rewards=[1.0, 0.0, 1.0, 1.0])
    tr2 = _synthetic([0, 1, 1, 0], rewards=[0.5, 0.5, 0.5, 0.5])
    summary = empirical_regret([tr1, tr2], _GAP)
    assert summary.mean_regret == pytest.approx(1.5)
    assert summary.stderr == pytest.approx(0.5)
    assert summary.mean_pseudo_regret == pytest.approx(1.5)
    assert summary.pseudo_stderr == pytest.approx(0.5)
    assert summary.n_replications == 2


def test_empirical_regret_single_and_errors():
    tr1 = _synthetic([0, 1, 0, 0], rewards=[1.0, 0.0, 1.0, 1.0])
    single = empirical_regret([tr1], _GAP)
    assert single.stderr is None and single.pseudo_stderr is None
    with pytest.raises(ValueError):
        empirical_regret([], _GAP)
    other = BanditInstance((ArmSpec(2.0, 1.0), ArmSpec(0.0, 1.0)))
    with pytest.raises(ValueError):
        empirical_regret([tr1], other)
    short = _synthetic([0, 1])
    with pytest.raises(ValueError):
        empirical_regret([tr1, short], _GAP)
