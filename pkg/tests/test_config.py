import json
from pathlib import Path

import pytest

from wsnfusion.config import SimConfig, apply_overrides, config_from_dict, load_config
from wsnfusion.errors import ConfigError

DEFAULT_FILE = Path(__file__).resolve().parents[1] / "configs" / "default.json"


def test_defaults_round_trip_through_dict():
    config = SimConfig()
    assert config_from_dict(config.to_dict()) == config
    assert config.to_dict()["radio"]["d0"] is None


def test_shipped_default_file_matches_defaults():
    assert load_config(DEFAULT_FILE) == SimConfig()


def test_pinned_crossover_is_written_out():
    config = load_config(overrides=["radio.d0=100"])
    assert config.radio.d0 == 100.0
    assert config.to_dict()["radio"]["d0"] == 100.0


def test_overrides_and_seed():
    config = load_config(overrides=["rounds=10", "radio.e_fs=1e-11", "bs_position=[0, 0]"], seed=7)
    assert config.rounds == 10
    assert config.radio.e_fs == 1e-11
    assert config.bs_position == (0.0, 0.0)
    assert config.seed == 7
    assert config.digest() != SimConfig().digest()


def test_unknown_keys_rejected():
    with pytest.raises(ConfigError, match="bogus"):
        load_config(overrides=["bogus=1"])
    with pytest.raises(ConfigError, match="radio.bogus"):
        config_from_dict({"radio": {"bogus": 1}})
    with pytest.raises(ConfigError):
        apply_overrides({}, ["no_equals_sign"])
    with pytest.raises(ConfigError):
        apply_overrides({"rounds": 3}, ["rounds.sub=1"])


def test_invalid_values_rejected():
    for bad in (["ch_percentile=1.0"], ["rounds=-1"], ["energy_form=\"eq7\""], ["n_sensors=0", "n_relays=0"]):
        with pytest.raises(ConfigError):
            load_config(overrides=bad)


def test_file_errors(tmp_path):
    with pytest.raises(ConfigError, match="not found"):
        load_config(tmp_path / "nope.json")
    broken = tmp_path / "broken.json"
    broken.write_text("{")
    with pytest.raises(ConfigError):
        load_config(broken)
    partial = tmp_path / "partial.json"
    partial.write_text(json.dumps({"rounds": 5, "radio": {"e_elec": 4e-8}}))
    config = load_config(partial)
    assert (config.rounds, config.radio.e_elec, config.radio.e_fs) == (5, 4e-8, 10e-12)


def test_digest_is_stable():
    assert SimConfig().digest() == SimConfig().digest()
    assert len(SimConfig().digest()) == 16


def test_fuzzy_sets_are_configurable():
    config = load_config(overrides=["fuzzy_sets.low=[0, 0, 0.1, 0.3]"])
    assert config.trapezoids["low"].c == 0.1
    assert config.trapezoids["high"] == SimConfig().trapezoids["high"]
    assert config_from_dict(config.to_dict()) == config
    with pytest.raises(ConfigError):
        load_config(overrides=["fuzzy_sets.low=[0.5, 0.2, 0.6, 0.7]"])
    with pytest.raises(ConfigError):
        load_config(overrides=["fuzzy_sets.low=[0, 1]"])
