"""Result persistence: CSV and JSON, deterministic byte for byte.

Numbers are written with 9 significant digits, '.' decimal separator, LF
line endings. Every file's content is built fully in memory before the
first byte is written, so an unwritable path fails before any partial
file exists. Arms are labeled 1-based in all outputs (the Python API is
0-based).

Run metadata echoes the experiment description but deliberately omits
workers and out_dir: those steer execution and placement, never results,
and including them would break byte-identity across worker counts.
"""
from __future__ import annotations

import json
import os

import numpy as np

from ._version import __version__
from .config import ExperimentConfig

__all__ = [
    "emit_results",
    "replication_csv_text",
    "coverage_csv_text",
    "histogram_payload",
    "metadata_text",
]


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return format(float(value), ".9g")


def _round9(value: float) -> float:
    return float(format(float(value), ".9g"))


def _round_floats(obj):
    if isinstance(obj, bool):
        return obj
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return _round9(obj)
    if isinstance(obj, dict):
        return {key: _round_floats(val) for key, val in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round_floats(val) for val in obj]
    return obj


def replication_csv_text(summaries, config: ExperimentConfig) -> str:
    """One row per (replication, arm); interval columns per alpha level."""
    summaries = list(summaries)
    if not summaries:
        raise ValueError("need at least one summary")
    alphas = summaries[0].alphas
    header = ["replication", "arm", "n", "mu_hat", "sigma_hat", "std_err"]
    for alpha in alphas:
        label = _fmt(alpha)
        header += [f"ci_lo_{label}", f"ci_hi_{label}", f"covered_{label}"]
    lines = [",".join(header)]
    for s in summaries:
        for a in range(len(s.counts)):
            row = [
                str(s.replication),
                str(a + 1),
                str(s.counts[a]),
                _fmt(s.mu_hat[a]),
                _fmt(s.sigma_hat[a]),
                _fmt(s.std_errs[a]),
            ]
            true_mean = config.instance.arms[a].mean
            for interval in s.intervals[a]:
                if interval is None:
                    row += ["", "", ""]
                else:
                    lo, hi = interval
                    row += [_fmt(lo), _fmt(hi), "1" if lo <= true_mean <= hi else "0"]
            lines.append(",".join(row))
    return "\n".join(lines) + "\n"


def coverage_csv_text(points) -> str:
    points = list(points)
    if not points:
        raise ValueError("need at least one coverage point")
    lines = ["arm,level,coverage,stderr"]
    for p in points:
        lines.append(",".join([str(p.arm + 1), _fmt(p.level), _fmt(p.coverage), _fmt(p.stderr)]))
    return "\n".join(lines) + "\n"


def histogram_payload(values, *, arm: int, normalizer: float, policy: str,
                      horizon: int, seed: int, bins: int) -> dict:
    """Fixed-bin-count histogram of one arm's diagnostic values."""
    values = np.asarray(list(values), dtype=np.float64)
    if values.size == 0:
        raise ValueError("need at least one value")
    if bins < 1:
        raise ValueError("bins must be >= 1")
    counts, edges = np.histogram(values, bins=bins)
    return {
        "arm": arm + 1,
        "normalizer": _round9(normalizer),
        "bins": [
            {"lo": _round9(edges[i]), "hi": _round9(edges[i + 1]), "count": int(counts[i])}
            for i in range(len(counts))
        ],
        "n_samples": int(values.size),
        "policy": policy,
        "T": int(horizon),
        "seed": int(seed),
    }


def _experiment_identity(config: ExperimentConfig) -> dict:
    mapping = config.to_mapping()
    mapping.pop("workers")
    mapping.pop("out_dir")
    return mapping


def metadata_text(config: ExperimentConfig, extras: dict | None = None) -> str:
    payload = {"version": __version__, "experiment": _experiment_identity(config)}
    if extras:
        payload["extras"] = extras
    return json.dumps(_round_floats(payload), indent=2, sort_keys=True) + "\n"


def emit_results(config: ExperimentConfig, summaries, *, coverage=None,
                 histograms: dict | None = None, extras: dict | None = None,
                 out_dir: str | None = None) -> list[str]:
    """Write the run's files and return their paths.

    Always writes replications.csv and run_metadata.json; coverage points
    add coverage.csv; histograms is a mapping of filename stem to payload
    dict, one JSON file each. Re-emitting identical inputs reproduces
    identical bytes.
    """
    target = config.out_dir if out_dir is None else out_dir
    files: list[tuple[str, str]] = [
        ("replications.csv", replication_csv_text(summaries, config)),
        ("run_metadata.json", metadata_text(config, extras)),
    ]
    if coverage is not None:
        files.append(("coverage.csv", coverage_csv_text(coverage)))
    for stem, payload in (histograms or {}).items():
        files.append((f"{stem}.json", json.dumps(_round_floats(payload), indent=2,
                                                 sort_keys=True) + "\n"))
    os.makedirs(target, exist_ok=True)
    written = []
    for name, text in files:
        path = os.path.join(target, name)
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        written.append(path)
    return written
