"""Experiment configuration: TOML files with one [[arms]] table per arm.

The format is deliberately small: a flat table of scalars plus an arms
array. Unknown keys are rejected so typos fail loudly instead of silently
running the default.
"""
from __future__ import annotations

import os
from dataclasses import dataclass

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .core import ArmSpec, BanditInstance
from .inference import DEFAULT_LEVELS
from .policies import GammaSchedule, PolicySpec

__all__ = ["ConfigError", "ExperimentConfig", "parse_config", "DEFAULT_ALPHAS"]


class ConfigError(ValueError):
    """Malformed or invalid experiment configuration."""


# Miscoverage grid matching the default confidence-level grid 0.75..0.99.
DEFAULT_ALPHAS: tuple[float, ...] = tuple(round(1.0 - lvl, 10) for lvl in DEFAULT_LEVELS)

_REQUIRED = ("arms", "policy", "horizon", "replications", "master_seed")
_KNOWN = _REQUIRED + ("gamma_c", "gamma_beta", "alphas", "out_dir", "workers", "histogram_bins")
_POLICY_KINDS = ("ts", "stable_ts", "ucb")


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything one Monte Carlo run needs, validated on construction.

    workers and out_dir steer execution and file placement only; they never
    influence the simulated numbers (see the output module for what gets
    echoed into run metadata).
    """

    instance: BanditInstance
    policy: PolicySpec
    horizon: int
    replications: int
    master_seed: int
    alphas: tuple[float, ...] = DEFAULT_ALPHAS
    out_dir: str = "results"
    workers: int = 0
    histogram_bins: int = 50

    def __post_init__(self) -> None:
        if self.horizon < self.instance.k:
            raise ConfigError(
                f"T < K: horizon {self.horizon} is smaller than the arm count {self.instance.k}"
            )
        if self.replications < 1:
            raise ConfigError("replications must be >= 1")
        if not 0 <= self.master_seed < 2**64:
            raise ConfigError("master_seed must fit in an unsigned 64-bit integer")
        alphas = tuple(float(a) for a in self.alphas)
        if not alphas:
            raise ConfigError("alphas must be non-empty")
        if any(not 0.0 < a < 1.0 for a in alphas):
            raise ConfigError("every alpha must be in (0,1)")
        object.__setattr__(self, "alphas", alphas)
        if self.workers < 0:
            raise ConfigError("workers must be >= 0 (0 = auto)")
        if self.histogram_bins < 1:
            raise ConfigError("histogram_bins must be >= 1")

    def to_mapping(self) -> dict:
        """Round-trippable plain-dict form (same keys the TOML format uses)."""
        out = {
            "arms": [{"mean": a.mean, "variance": a.variance} for a in self.instance.arms],
            "policy": self.policy.kind,
            "horizon": self.horizon,
            "replications": self.replications,
            "master_seed": self.master_seed,
            "alphas": list(self.alphas),
            "out_dir": self.out_dir,
            "workers": self.workers,
            "histogram_bins": self.histogram_bins,
        }
        if self.policy.schedule is not None:
            out["gamma_c"] = self.policy.schedule.coefficient
            out["gamma_beta"] = self.policy.schedule.exponent
        return out


def _as_int(raw: dict, key: str) -> int:
    value = raw[key]
    # bool is an int subclass; "horizon = true" must not parse
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{key}: expected an integer, got {value!r}")
    return value


def _as_float(raw: dict, key: str) -> float:
    value = raw[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{key}: expected a number, got {value!r}")
    return float(value)


def _parse_arms(raw: dict) -> BanditInstance:
    arms = raw["arms"]
    if not isinstance(arms, list) or not arms:
        raise ConfigError("arms: expected a non-empty array of tables")
    specs = []
    for i, entry in enumerate(arms):
        if not isinstance(entry, dict):
            raise ConfigError(f"arms[{i}]: expected a table")
        unknown = set(entry) - {"mean", "variance"}
        if unknown:
            raise ConfigError(f"arms[{i}]: unknown key(s) {sorted(unknown)}")
        if "mean" not in entry:
            raise ConfigError(f"arms[{i}]: missing required key 'mean'")
        mean = entry["mean"]
        variance = entry.get("variance", 1.0)
        for key, value in (("mean", mean), ("variance", variance)):
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise ConfigError(f"arms[{i}].{key}: expected a number, got {value!r}")
        try:
            specs.append(ArmSpec(float(mean), float(variance)))
        except ValueError as exc:
            raise ConfigError(f"arms[{i}]: {exc}") from exc
    try:
        return BanditInstance(tuple(specs))
    except ValueError as exc:
        raise ConfigError(f"arms: {exc}") from exc


def _parse_policy(raw: dict) -> PolicySpec:
    kind = raw["policy"]
    if kind not in _POLICY_KINDS:
        raise ConfigError(f"policy: expected one of {list(_POLICY_KINDS)}, got {kind!r}")
    has_c, has_beta = "gamma_c" in raw, "gamma_beta" in raw
    if kind == "stable_ts":
        if not (has_c and has_beta):
            raise ConfigError("policy 'stable_ts' requires both gamma_c and gamma_beta")
        try:
            schedule = GammaSchedule(_as_float(raw, "gamma_c"), _as_float(raw, "gamma_beta"))
        except ValueError as exc:
            raise ConfigError(f"gamma schedule: {exc}") from exc
        return PolicySpec.stable_ts(schedule)
    if has_c or has_beta:
        raise ConfigError(f"gamma_c/gamma_beta only apply to policy 'stable_ts', not {kind!r}")
    return PolicySpec.ts() if kind == "ts" else PolicySpec.ucb()


def parse_config(source: str | os.PathLike) -> ExperimentConfig:
    """Parse a TOML config from a file path or from literal TOML text.

    A str containing a newline or '=' is treated as TOML text; anything
    else must be a readable path. Syntax errors surface with the parser's
    line/column; semantic errors name the offending field.
    """
    if isinstance(source, str) and ("\n" in source or "=" in source):
        text = source
    else:
        with open(os.fspath(source), "rb") as fh:
            text = fh.read().decode("utf-8")
    try:
        raw = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"config syntax: {exc}") from exc

    unknown = set(raw) - set(_KNOWN)
    if unknown:
        raise ConfigError(f"unknown key(s): {sorted(unknown)}")
    missing = [key for key in _REQUIRED if key not in raw]
    if missing:
        raise ConfigError(f"missing required key(s): {missing}")

    instance = _parse_arms(raw)
    policy = _parse_policy(raw)
    alphas: tuple[float, ...] = DEFAULT_ALPHAS
    if "alphas" in raw:
        if not isinstance(raw["alphas"], list) or not raw["alphas"]:
            raise ConfigError("alphas: expected a non-empty array of numbers")
        for j, a in enumerate(raw["alphas"]):
            if isinstance(a, bool) or not isinstance(a, (int, float)):
                raise ConfigError(f"alphas[{j}]: expected a number, got {a!r}")
        alphas = tuple(float(a) for a in raw["alphas"])

    out_dir = raw.get("out_dir", "results")
    if not isinstance(out_dir, str):
        raise ConfigError(f"out_dir: expected a string, got {out_dir!r}")

    return ExperimentConfig(
        instance=instance,
        policy=policy,
        horizon=_as_int(raw, "horizon"),
        replications=_as_int(raw, "replications"),
        master_seed=_as_int(raw, "master_seed"),
        alphas=alphas,
        out_dir=out_dir,
        workers=_as_int(raw, "workers") if "workers" in raw else 0,
        histogram_bins=_as_int(raw, "histogram_bins") if "histogram_bins" in raw else 50,
    )
