from pathlib import Path

import pytest

from censored_pricing.config import ConfigError, config_from_dict, load_config, parse_seeds
from censored_pricing.policies import C20CB, ExploreThenCommit, OraclePolicy, UCBGrid

CONFIGS = Path(__file__).resolve().parents[1] / "configs"


def base(**run):
    return {
        "instance": {"a": 10, "b": 1, "a_max": 10, "b_min": 1, "b_max": 1, "c": 1, "p_max": 6, "gamma_min": 5.5,
                     "noise": {"kind": "uniform"},
                     "inventory": {"kind": "iid-uniform-in-band", "lo": 5.5, "hi": 8.5}},
        "policy": {"name": "c20cb"},
        "run": {"T": 1000, **run},
    }


def test_shipped_configs_load():
    for name in ("canonical.toml", "canonical-iid.toml"):
        cfg = load_config(CONFIGS / name)
        assert cfg.validation().ok
        assert cfg.T == 10_000 and cfg.seeds == tuple(range(1, 21))
    inv = load_config(CONFIGS / "canonical.toml").instance.inventory
    assert (inv.kind, inv.epoch) == ("piecewise-adversarial", 20)


def test_seed_forms():
    assert config_from_dict(base(seeds=[3, 1])).seeds == (3, 1)
    assert config_from_dict(base(seed_base=5, seed_count=3)).seeds == (5, 6, 7)
    assert config_from_dict(base()).seeds == (1,)
    with pytest.raises(ConfigError):
        config_from_dict(base(seeds=[1], seed_base=2))
    with pytest.raises(ConfigError):
        config_from_dict(base(seeds=[]))
    assert parse_seeds("1..4") == (1, 2, 3, 4)
    assert parse_seeds("7, 9") == (7, 9)
    with pytest.raises(ConfigError):
        parse_seeds("5..1")


def test_unknown_keys_rejected():
    d = base()
    d["policy"]["scael"] = 0.1
    with pytest.raises(ConfigError, match="policy.scael"):
        config_from_dict(d)
    d = base()
    d["extra"] = {"x": 1}
    with pytest.raises(ConfigError, match="extra.x"):
        config_from_dict(d)


def test_minimum_horizon_and_fields():
    with pytest.raises(ConfigError):
        config_from_dict(base() | {"run": {"T": 63}})
    d = base()
    del d["instance"]["a"]
    with pytest.raises(ConfigError, match="a"):
        config_from_dict(d)
    with pytest.raises(ConfigError):
        config_from_dict(base(trace="verbose"))
    d = base()
    d["policy"]["name"] = "thompson"
    with pytest.raises(ConfigError):
        config_from_dict(d)


def test_policy_construction():
    cfg = config_from_dict(base())
    assert isinstance(cfg.build_policy(1), C20CB)
    etc = cfg.with_policy(name="etc").with_horizon(10_000).build_policy(1)
    assert isinstance(etc, ExploreThenCommit) and etc.window == 100
    ucb = cfg.with_policy(name="ucb").with_horizon(1000).build_policy(1)
    assert isinstance(ucb, UCBGrid) and len(ucb.prices) == 10
    assert isinstance(cfg.with_policy(name="oracle").build_policy(1), OraclePolicy)
    assert cfg.with_policy(scale=0.5).schedule().scale == 0.5


def test_noise_and_replay_paths(tmp_path):
    (tmp_path / "levels.txt").write_text("6.0\n7.0\n")
    (tmp_path / "c.toml").write_text(
        "[instance]\na=10\nb=1\na_max=10\nb_min=1\nb_max=1\nc=1\np_max=6\ngamma_min=5.5\n"
        "[instance.noise]\nkind='truncated-gaussian'\nsigma=0.3\n"
        "[instance.inventory]\nkind='replay-from-file'\npath='levels.txt'\n"
        "[run]\nT=64\n"
    )
    cfg = load_config(tmp_path / "c.toml")
    assert cfg.instance.noise.sigma == 0.3
    assert (cfg.instance.inventory.lo, cfg.instance.inventory.hi) == (6.0, 7.0)
    (tmp_path / "bad.toml").write_text("[run\nT=1")
    with pytest.raises(ConfigError):
        load_config(tmp_path / "bad.toml")
