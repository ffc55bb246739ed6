"""Monte Carlo simulation and inference for Gaussian multi-armed bandits.

Episode simulation for Thompson sampling, its variance-inflated variant,
and a UCB baseline; confidence intervals and coverage aggregation for
adaptively collected data; pull-count stability diagnostics; and
executable forms of the quantities the analysis manipulates (waiting
times, sandwich statistics, deviation envelopes, probability brackets).
"""
from __future__ import annotations

from ._version import __version__
from .checks import CheckResult, run_theory_suite
from .config import DEFAULT_ALPHAS, ConfigError, ExperimentConfig, parse_config
from .core import (
    PURPOSES,
    ArmSpec,
    BanditInstance,
    EstimateInsufficientError,
    RngStream,
    Streams,
    UnsupportedByTheoryError,
    episode_streams,
    gaps,
    optimal_set,
    sample_reward,
)
from .figures import DEFAULT_FIGURE_SEED, FOUR_ARM_MEANS, reference_schedule, reproduce_figure
from .inference import (
    DEFAULT_LEVELS,
    ArmEstimate,
    ConfidenceInterval,
    CoveragePoint,
    arm_estimates,
    confidence_interval,
    coverage_curve,
    normal_cdf,
    normal_quantile,
    standardized_error,
)
from .output import (
    coverage_csv_text,
    emit_results,
    histogram_payload,
    metadata_text,
    replication_csv_text,
)
from .policies import (
    EpisodeExtension,
    GammaConditionReport,
    GammaSchedule,
    PolicySpec,
    PolicyState,
    Trajectory,
    check_gamma_condition,
    gamma_value,
    run_episode,
    run_episode_extended,
    stable_ts_select,
    ts_select,
    ucb_select,
    update,
)
from .runner import ReplicationSummary, run_experiment, summarize_replication
from .stability import (
    ConcentrationSummary,
    PullRatioSample,
    concentration_summary,
    ecdf,
    ks_statistic,
    normalized_pull_ratios,
    pull_count_normalizer,
)
from .theory import (
    ProxyParams,
    RegretSummary,
    SandwichStatistic,
    WaitingTimes,
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

__all__ = [
    "__version__",
    "ArmSpec",
    "BanditInstance",
    "RngStream",
    "Streams",
    "PURPOSES",
    "episode_streams",
    "sample_reward",
    "gaps",
    "optimal_set",
    "EstimateInsufficientError",
    "UnsupportedByTheoryError",
    "GammaSchedule",
    "GammaConditionReport",
    "check_gamma_condition",
    "gamma_value",
    "PolicySpec",
    "PolicyState",
    "update",
    "ts_select",
    "stable_ts_select",
    "ucb_select",
    "Trajectory",
    "EpisodeExtension",
    "run_episode",
    "run_episode_extended",
    "DEFAULT_LEVELS",
    "ArmEstimate",
    "ConfidenceInterval",
    "CoveragePoint",
    "arm_estimates",
    "confidence_interval",
    "coverage_curve",
    "normal_cdf",
    "normal_quantile",
    "standardized_error",
    "PullRatioSample",
    "ConcentrationSummary",
    "pull_count_normalizer",
    "normalized_pull_ratios",
    "concentration_summary",
    "ks_statistic",
    "ecdf",
    "ProxyParams",
    "WaitingTimes",
    "SandwichStatistic",
    "RegretSummary",
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
    "ConfigError",
    "ExperimentConfig",
    "parse_config",
    "DEFAULT_ALPHAS",
    "ReplicationSummary",
    "summarize_replication",
    "run_experiment",
    "emit_results",
    "replication_csv_text",
    "coverage_csv_text",
    "histogram_payload",
    "metadata_text",
    "CheckResult",
    "run_theory_suite",
    "DEFAULT_FIGURE_SEED",
    "FOUR_ARM_MEANS",
    "reference_schedule",
    "reproduce_figure",
]
