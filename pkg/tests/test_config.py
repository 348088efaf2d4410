import json

import pytest

from lichlab.config import BUNDLED, ConfigError, RunConfig, config_hash


@pytest.mark.parametrize("name", BUNDLED)
def test_bundled_configs_load(name):
    cfg = RunConfig.bundled(name)
    assert cfg.build_model().R_max == 8.0
    assert len(cfg.hash) == 64


def test_hash_ignores_key_order():
    assert config_hash({"a": 1, "b": [1, 2]}) == config_hash({"b": [1, 2], "a": 1})


@pytest.mark.parametrize("patch, match", [
    ({"model": {"kind": "sphere"}}, "model.kind"),
    ({"model": {"kind": "euclidean", "m": 1}}, "model.m"),
    ({"model": {"kind": "euclidean", "R_max": -1}}, "R_max"),
    ({"model": {"kind": "riccati", "R_max": 5}}, "model.F"),
    ({"model": {"kind": "riccati", "F": -1.0, "R_max": 5}}, "not positive"),
    ({"grid_n": 2}, "grid_n"),
])
def test_invalid_configs(patch, match):
    raw = json.loads(json.dumps(RunConfig.bundled("pinched").raw))
    raw.update(patch)
    with pytest.raises(ConfigError, match=match):
        RunConfig.from_dict(raw)


def test_negative_b_rejected():
    raw = json.loads(json.dumps(RunConfig.bundled("pinched").raw))
    raw["coefficients"]["b"] = "1 - r"
    with pytest.raises(ConfigError, match="nonnegative"):
        RunConfig.from_dict(raw)
