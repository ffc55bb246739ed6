"""Command-line entry point.

Subcommands: simulate, coverage, stability, regret, verify-theory,
reproduce-figure. Flags can also be supplied through environment
variables prefixed BANDITLAB_ (BANDITLAB_CONFIG, BANDITLAB_SEED,
BANDITLAB_REPLICATIONS, BANDITLAB_HORIZON, BANDITLAB_WORKERS,
BANDITLAB_OUT, BANDITLAB_FULL); an explicit flag wins over its variable.
verify-theory prints the check table and also writes it as JSON
(verify_theory.json under --out, default results/).

Exit codes: 0 success, 1 a run or asserted check failed, 2 usage or
configuration error.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import replace

import numpy as np

from .checks import run_theory_suite
from .config import ConfigError, ExperimentConfig, parse_config
from .core import EstimateInsufficientError, UnsupportedByTheoryError
from .figures import reproduce_figure
from .inference import coverage_curve
from .output import emit_results, histogram_payload
from .runner import run_experiment
from .stability import concentration_summary, normalized_pull_ratios, pull_count_normalizer

ENV_PREFIX = "BANDITLAB_"

__all__ = ["main", "build_parser"]


def _env(name: str) -> str | None:
    return os.environ.get(ENV_PREFIX + name)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="banditlab",
        description="Monte Carlo simulation and inference for Gaussian bandits.",
        epilog="Flags fall back to BANDITLAB_-prefixed environment variables.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(sp: argparse.ArgumentParser, with_config: bool = True) -> None:
        if with_config:
            sp.add_argument("--config", help="path to a TOML experiment config")
        sp.add_argument("--seed", type=int, default=None, help="master seed override")
        sp.add_argument("--replications", type=int, default=None)
        sp.add_argument("--horizon", type=int, default=None)
        sp.add_argument("--workers", type=int, default=None, help="0 = auto")
        sp.add_argument("--out", default=None, help="output directory override")
        sp.add_argument("--full", action="store_true", default=None,
                        help="use the full-scale replication count in presets")

    for name, blurb in (
        ("simulate", "run the experiment and write per-replication results"),
        ("coverage", "run the experiment and write the coverage curve"),
        ("stability", "run the experiment and write pull-ratio diagnostics"),
        ("regret", "run the experiment and report regret"),
    ):
        add_common(sub.add_parser(name, help=blurb))

    add_common(sub.add_parser("verify-theory", help="run the deterministic self-check suite"),
               with_config=False)

    fig = sub.add_parser("reproduce-figure", help="run one of the preset experiments")
    fig.add_argument("figure", type=int, choices=(1, 2, 3, 4))
    add_common(fig, with_config=False)
    return parser


def _resolved(args: argparse.Namespace) -> dict:
    """Merge flags with environment variables (flag wins)."""
    def pick_int(flag_value, env_name):
        if flag_value is not None:
            return flag_value
        raw = _env(env_name)
        return int(raw) if raw is not None else None

    full = args.full
    if full is None:
        raw = _env("FULL")
        full = raw is not None and raw.strip().lower() not in ("", "0", "false", "no")
    return {
        "config": getattr(args, "config", None) or _env("CONFIG"),
        "seed": pick_int(args.seed, "SEED"),
        "replications": pick_int(args.replications, "REPLICATIONS"),
        "horizon": pick_int(args.horizon, "HORIZON"),
        "workers": pick_int(args.workers, "WORKERS"),
        "out": args.out or _env("OUT"),
        "full": full,
    }


def _load_config(opts: dict) -> ExperimentConfig:
    if not opts["config"]:
        raise ConfigError("--config (or BANDITLAB_CONFIG) is required for this subcommand")
    config = parse_config(opts["config"])
    overrides = {}
    if opts["seed"] is not None:
        overrides["master_seed"] = opts["seed"]
    if opts["replications"] is not None:
        overrides["replications"] = opts["replications"]
    if opts["horizon"] is not None:
        overrides["horizon"] = opts["horizon"]
    if opts["workers"] is not None:
        overrides["workers"] = opts["workers"]
    if opts["out"] is not None:
        overrides["out_dir"] = opts["out"]
    return replace(config, **overrides) if overrides else config


def _cmd_simulate(config: ExperimentConfig) -> int:
    summaries = run_experiment(config)
    regret = np.array([s.realized_regret for s in summaries])
    paths = emit_results(config, summaries, extras={"subcommand": "simulate"})
    print(f"{config.replications} replications, mean realized regret "
          f"{regret.mean():.6g}")
    for p in paths:
        print(f"wrote {p}")
    return 0


def _cmd_coverage(config: ExperimentConfig) -> int:
    summaries = run_experiment(config)
    points = coverage_curve(summaries, config.instance, config.alphas)
    paths = emit_results(config, summaries, coverage=points,
                         extras={"subcommand": "coverage"})
    shown = min(points, key=lambda p: abs(p.level - 0.95)).level
    for p in points:
        if p.level == shown:
            print(f"arm {p.arm + 1}: coverage {p.coverage:.4f} at level {p.level:g} "
                  f"(stderr {p.stderr:.4f})")
    for p in paths:
        print(f"wrote {p}")
    return 0


def _cmd_stability(config: ExperimentConfig) -> int:
    summaries = run_experiment(config)
    histograms = {}
    concentration = {}
    unsupported = []
    for a in range(config.instance.k):
        try:
            norm = pull_count_normalizer(config.instance, config.policy.schedule,
                                         config.horizon, a, config.policy.kind)
        except UnsupportedByTheoryError:
            # no established limit: fall back to the raw fraction of T
            norm = float(config.horizon)
            unsupported.append(a + 1)
        samples = normalized_pull_ratios(summaries, a, norm)
        histograms[f"histogram_arm{a + 1}"] = histogram_payload(
            [s.value for s in samples], arm=a, normalizer=norm,
            policy=config.policy.describe(), horizon=config.horizon,
            seed=config.master_seed, bins=config.histogram_bins,
        )
        if config.replications >= 2:
            summary = concentration_summary(samples)
            concentration[f"arm_{a + 1}"] = {
                "mean": summary.mean,
                "std": summary.std,
                "fraction_within": summary.fraction_within,
                "epsilon": summary.epsilon,
            }
            tag = " (unsupported-by-theory, normalizer T)" if a + 1 in unsupported else ""
            print(f"arm {a + 1}: ratio mean {summary.mean:.4f}, std {summary.std:.4f}, "
                  f"within ±{summary.epsilon:g}: {summary.fraction_within:.3f}{tag}")
    extras = {"subcommand": "stability", "concentration": concentration}
    if unsupported:
        extras["unsupported_by_theory_arms"] = unsupported
    paths = emit_results(config, summaries, histograms=histograms, extras=extras)
    for p in paths:
        print(f"wrote {p}")
    return 0


def _cmd_regret(config: ExperimentConfig) -> int:
    summaries = run_experiment(config)
    realized = np.array([s.realized_regret for s in summaries])
    pseudo = np.array([s.pseudo_regret for s in summaries])
    r = len(summaries)
    stats = {
        "mean_regret": float(realized.mean()),
        "stderr": float(realized.std(ddof=1) / math.sqrt(r)) if r >= 2 else None,
        "mean_pseudo_regret": float(pseudo.mean()),
        "pseudo_stderr": float(pseudo.std(ddof=1) / math.sqrt(r)) if r >= 2 else None,
        "n_replications": r,
    }
    paths = emit_results(config, summaries, extras={"subcommand": "regret",
                                                    "regret": stats})
    print(f"mean realized regret {stats['mean_regret']:.6g}"
          + (f" ± {stats['stderr']:.3g}" if stats["stderr"] is not None else ""))
    print(f"mean pseudo regret   {stats['mean_pseudo_regret']:.6g}"
          + (f" ± {stats['pseudo_stderr']:.3g}" if stats["pseudo_stderr"] is not None else ""))
    for p in paths:
        print(f"wrote {p}")
    return 0


def _cmd_verify_theory(opts: dict) -> int:
    seed = opts["seed"] if opts["seed"] is not None else 0
    results = run_theory_suite(seed)
    rows = [
        {
            "check": res.name,
            "statistic": res.statistic,
            "threshold": res.threshold,
            "verdict": "PASS" if res.passed else "FAIL",
        }
        for res in results
    ]
    for res in results:
        print(f"{'PASS' if res.passed else 'FAIL'} {res.name}: "
              f"statistic {res.statistic:.6g} vs threshold {res.threshold:.6g}; {res.detail}")
    failed = sum(not res.passed for res in results)
    print(f"{len(results) - failed}/{len(results)} checks passed")
    target = opts["out"] or "results"
    text = json.dumps({"master_seed": seed, "checks": rows}, indent=2, sort_keys=True) + "\n"
    os.makedirs(target, exist_ok=True)
    path = os.path.join(target, "verify_theory.json")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    print(f"wrote {path}")
    return 0 if failed == 0 else 1


def _cmd_reproduce_figure(args: argparse.Namespace, opts: dict) -> int:
    out = opts["out"] or f"results/figure-{args.figure}"
    paths = reproduce_figure(
        args.figure, out,
        full=bool(opts["full"]),
        master_seed=opts["seed"],
        replications=opts["replications"],
        horizon=opts["horizon"],
        workers=opts["workers"] if opts["workers"] is not None else 0,
    )
    for p in paths:
        print(f"wrote {p}")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    opts = _resolved(args)
    try:
        if args.command == "verify-theory":
            return _cmd_verify_theory(opts)
        if args.command == "reproduce-figure":
            return _cmd_reproduce_figure(args, opts)
        config = _load_config(opts)
        handler = {
            "simulate": _cmd_simulate,
            "coverage": _cmd_coverage,
            "stability": _cmd_stability,
            "regret": _cmd_regret,
        }[args.command]
        return handler(config)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (EstimateInsufficientError, UnsupportedByTheoryError, RuntimeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
