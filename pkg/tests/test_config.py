from __future__ import annotations

from pathlib import Path

import pytest

from banditlab.config import DEFAULT_ALPHAS, ConfigError, ExperimentConfig, parse_config
from banditlab.core import ArmSpec, BanditInstance
from banditlab.inference import DEFAULT_LEVELS
from banditlab.policies import PolicySpec

_MINIMAL = """
policy = "ts"
horizon = 100
replications = 10
master_seed = 1

[[arms]]
mean = 1.0

[[arms]]
mean = 0.0
variance = 2.0
"""


def test_minimal_config_parses():
    cfg = parse_config(_MINIMAL)
    assert cfg.instance.k == 2
    assert cfg.instance.arms[0].mean == 1.0
    assert cfg.instance.arms[0].variance == 1.0  # default
    assert cfg.instance.arms[1].variance == 2.0
    assert cfg.policy.kind == "ts"
    assert cfg.horizon == 100
    assert cfg.replications == 10
    assert cfg.master_seed == 1
    assert cfg.alphas == DEFAULT_ALPHAS
    assert cfg.out_dir == "results"
    assert cfg.workers == 0
    assert cfg.histogram_bins == 50


def test_default_alphas_complement_levels():
    assert len(DEFAULT_ALPHAS) == len(DEFAULT_LEVELS)
    for alpha, level in zip(DEFAULT_ALPHAS, DEFAULT_LEVELS):
        assert alpha == pytest.approx(1.0 - level, abs=1e-10)


def test_horizon_below_arm_count():
    text = _MINIMAL.replace("horizon = 100", "horizon = 1")
    with pytest.raises(ConfigError, match="T < K"):
        parse_config(text)


def test_unknown_key_named_in_error():
    with pytest.raises(ConfigError, match="horizzon"):
        parse_config("horizzon = 5\n" + _MINIMAL)


def test_missing_required_keys_listed():
    with pytest.raises(ConfigError, match="master_seed"):
        parse_config('policy = "ts"\nhorizon = 100\nreplications = 10\n[[arms]]\nmean = 0.0\n')


def test_syntax_error_carries_location():
    with pytest.raises(ConfigError, match="line"):
        parse_config('policy = "ts\nhorizon = 100\n')


def test_gamma_keys_rejected_for_plain_ts():
    # top-level keys go before the arms tables in TOML
    with pytest.raises(ConfigError, match="stable_ts"):
        parse_config("gamma_c = 4.0\ngamma_beta = 0.4\n" + _MINIMAL)


def test_stable_ts_requires_both_gamma_keys():
    text = _MINIMAL.replace('policy = "ts"', 'policy = "stable_ts"')
    with pytest.raises(ConfigError, match="gamma_c"):
        parse_config(text)
    with pytest.raises(ConfigError, match="gamma_beta"):
        parse_config("gamma_c = 4.0\n" + text)
    cfg = parse_config("gamma_c = 4.0\ngamma_beta = 0.4\n" + text)
    assert cfg.policy.kind == "stable_ts"
    assert cfg.policy.schedule.coefficient == 4.0
    assert cfg.policy.schedule.exponent == 0.4


def test_unknown_policy_kind():
    with pytest.raises(ConfigError, match="policy"):
        parse_config(_MINIMAL.replace('"ts"', '"greedy"'))


def test_booleans_are_not_integers():
    with pytest.raises(ConfigError, match="horizon"):
        parse_config(_MINIMAL.replace("horizon = 100", "horizon = true"))
    with pytest.raises(ConfigError, match="mean"):
        parse_config(_MINIMAL.replace("mean = 1.0", "mean = false"))


def test_arm_table_validation():
    with pytest.raises(ConfigError, match=r"arms\[0\]"):
        parse_config(_MINIMAL.replace("mean = 1.0", "median = 1.0"))
    with pytest.raises(ConfigError, match=r"arms\[1\]"):
        parse_config(_MINIMAL.replace("variance = 2.0", "variance = -2.0"))
    no_arms = 'policy = "ts"\nhorizon = 100\nreplications = 10\nmaster_seed = 1\narms = []\n'
    with pytest.raises(ConfigError, match="arms"):
        parse_config(no_arms)


def test_alpha_validation():
    with pytest.raises(ConfigError, match="alphas"):
        parse_config("alphas = []\n" + _MINIMAL)
    with pytest.raises(ConfigError, match="alpha"):
        parse_config("alphas = [0.05, 1.5]\n" + _MINIMAL)
    cfg = parse_config("alphas = [0.05, 0.01]\n" + _MINIMAL)
    assert cfg.alphas == (0.05, 0.01)


def test_direct_construction_validation():
    inst = BanditInstance((ArmSpec(1.0, 1.0), ArmSpec(0.0, 1.0)))
    with pytest.raises(ConfigError):
        ExperimentConfig(inst, PolicySpec.ts(), 100, 0, 1)
    with pytest.raises(ConfigError):
        ExperimentConfig(inst, PolicySpec.ts(), 100, 10, 2**64)
    with pytest.raises(ConfigError):
        ExperimentConfig(inst, PolicySpec.ts(), 100, 10, 1, workers=-1)
    with pytest.raises(ConfigError):
        ExperimentConfig(inst, PolicySpec.ts(), 100, 10, 1, histogram_bins=0)


def test_reference_config_file():
    path = Path(__file__).resolve().parent.parent / "configs" / "four_arm_reference.toml"
    cfg = parse_config(path)
    assert cfg.policy.kind == "stable_ts"
    assert cfg.policy.schedule.coefficient == 4.0
    assert cfg.policy.schedule.exponent == 0.4
    assert [a.mean for a in cfg.instance.arms] == [1.0, 1.0, 0.5, 0.0]
    assert all(a.variance == 1.0 for a in cfg.instance.arms)
    assert cfg.horizon == 10_000
    assert cfg.replications == 10_000


def test_to_mapping_round_trip():
    text = "alphas = [0.05]\nworkers = 2\nout_dir = \"elsewhere\"\n" + _MINIMAL
    cfg = parse_config(text)
    mapping = cfg.to_mapping()
    assert mapping["policy"] == "ts"
    assert "gamma_c" not in mapping
    assert mapping["arms"][1] == {"mean": 0.0, "variance": 2.0}
    assert mapping["workers"] == 2
    sts = parse_config(
        "gamma_c = 4.0\ngamma_beta = 0.4\n"
        + _MINIMAL.replace('policy = "ts"', 'policy = "stable_ts"')
    )
    sts_map = sts.to_mapping()
    assert sts_map["gamma_c"] == 4.0
    assert sts_map["gamma_beta"] == 0.4


def test_path_and_text_sources(tmp_path):
    path = tmp_path / "exp.toml"
    path.write_text(_MINIMAL)
    from_path = parse_config(path)
    from_text = parse_config(_MINIMAL)
    assert from_path == from_text
    with pytest.raises(OSError):
        parse_config(tmp_path / "absent.toml")
