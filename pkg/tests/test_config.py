"""Config schema: defaults, strict validation, canonical echo."""

import json

import pytest

from lorembed.config import (ConfigError, EXPERIMENTS, TOLERANCE_NAMES,
                             config_from_dict, default_config, load_config)


def test_defaults():
    cfg = default_config()
    assert cfg.spacetime.dimension == 2
    assert cfg.spacetime.t_min == -1.0 and cfg.spacetime.t_max == 1.0
    assert cfg.spacetime.circumferences == (4.0,)
    assert cfg.spacetime.is_constant_warp
    assert cfg.n_t == 64 and cfg.n_s == 64
    assert cfg.fspec == "h"
    assert cfg.radius == 5
    assert cfg.seed == 0 and cfg.trials == 500
    assert cfg.experiment is None
    assert cfg.tolerances == {} and cfg.outputs == {}


def test_unknown_keys_rejected():
    with pytest.raises(ConfigError):
        config_from_dict({"grid_size": 64})
    with pytest.raises(ConfigError):
        config_from_dict({"spacetime": {"dim": 2}})
    with pytest.raises(ConfigError):
        config_from_dict({"grid": {"nx": 8}})
    with pytest.raises(ConfigError):
        config_from_dict({"outputs": {"log": "x.txt"}})


def test_type_and_range_validation():
    with pytest.raises(ConfigError):
        config_from_dict({"spacetime": {"dimension": 1}})
    with pytest.raises(ConfigError):
        config_from_dict({"spacetime": {"t_min": "0"}})
    with pytest.raises(ConfigError):
        config_from_dict({"spacetime": {"t_min": True}})
    with pytest.raises(ConfigError):
        config_from_dict({"grid": {"n_t": 3}})
    with pytest.raises(ConfigError):
        config_from_dict({"grid": {"n_t": 16.0}})
    with pytest.raises(ConfigError):
        config_from_dict({"radius": 0})
    with pytest.raises(ConfigError):
        config_from_dict({"seed": -1})
    with pytest.raises(ConfigError):
        config_from_dict({"trials": 0})
    # slab with nonpositive warp is a schema error, not a crash
    with pytest.raises(ConfigError):
        config_from_dict({"spacetime": {"warp_coeffs": [-1.0]}})
    with pytest.raises(ConfigError):
        config_from_dict({"spacetime": {"circumferences": []}})


def test_fspec_validation():
    cfg = config_from_dict({"fspec": "fr:0.4"})
    assert cfg.fspec == "fr:0.4"
    with pytest.raises(ConfigError):
        config_from_dict({"fspec": "quartic"})
    with pytest.raises(ConfigError):
        config_from_dict({"fspec": 4})


def test_tolerances():
    cfg = config_from_dict({"tolerances": {"sigma_rel_err": 0.05}})
    assert cfg.tolerance("sigma_rel_err", 0.02) == 0.05
    assert cfg.tolerance("noldus_ratio", 0.05) == 0.05
    with pytest.raises(KeyError):
        cfg.tolerance("not_a_tolerance", 1.0)
    with pytest.raises(ConfigError):
        config_from_dict({"tolerances": {"bogus": 0.1}})
    with pytest.raises(ConfigError):
        config_from_dict({"tolerances": {"sigma_rel_err": -0.1}})
    with pytest.raises(ConfigError):
        config_from_dict({"tolerances": {"sigma_rel_err": float("nan")}})
    assert all(isinstance(name, str) for name in TOLERANCE_NAMES)


def test_experiment_names():
    for name in EXPERIMENTS:
        assert config_from_dict({"experiment": name}).experiment == name
    with pytest.raises(ConfigError):
        config_from_dict({"experiment": "verify-everything"})


def test_canonical_echo_roundtrip():
    doc = {"spacetime": {"dimension": 2, "t_min": 0.0, "t_max": 1.0,
                         "circumferences": [0.6], "warp_coeffs": [1.0, 0.5]},
           "grid": {"n_t": 32, "n_s": 16},
           "fspec": "abs",
           "radius": 3,
           "tolerances": {"chron_accuracy": 0.95},
           "experiment": "invariants",
           "seed": 7,
           "trials": 12,
           "outputs": {"report": "r.json"}}
    cfg = config_from_dict(doc)
    echo = cfg.to_dict()
    cfg2 = config_from_dict(echo)
    assert cfg2.to_dict() == echo
    assert cfg2.spacetime == cfg.spacetime


def test_load_config(tmp_path):
    p = tmp_path / "ok.json"
    p.write_text(json.dumps({"seed": 3}))
    assert load_config(str(p)).seed == 3
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ConfigError):
        load_config(str(bad))
    with pytest.raises(ConfigError):
        load_config(str(tmp_path / "missing.json"))
    notdict = tmp_path / "list.json"
    notdict.write_text("[1, 2]")
    with pytest.raises(ConfigError):
        load_config(str(notdict))
